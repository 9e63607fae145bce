use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    report: &'a Value,
}

/// Leaves of `v` as `path,value` rows, paths joined with `.`.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(outcome: &Outcome) -> String {
    match outcome.config.format {
        Format::Json => {
            let env = Envelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                command: &outcome.config.command,
                config: &outcome.config,
                report: &outcome.report,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            match &outcome.gaps {
                Some(rows) => {
                    s.push_str("sample_index,gap\n");
                    for (i, g) in rows {
                        s.push_str(&format!("{i},{g:e}\n"));
                    }
                }
                None => {
                    let mut rows = Vec::new();
                    flatten("", &outcome.report, &mut rows);
                    s.push_str("key,value\n");
                    for (k, v) in rows {
                        s.push_str(&format!("{},{}\n", quote(&k), quote(&v)));
                    }
                }
            }
            s
        }
    }
}

pub fn emit(outcome: &Outcome) -> Result<(), CliError> {
    let text = render(outcome);
    match &outcome.config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}
