use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{Field, Format, Global, OperatorArgs};
use crate::CliError;

/// `--config` file contents. Every field is optional; flags win.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    spec_path: Option<PathBuf>,
    builtin: Option<String>,
    field: Option<Field>,
    n: Option<usize>,
    k: Option<usize>,
    p: Option<usize>,
    matrix_path: Option<PathBuf>,
    samples: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

/// Resolved run settings, echoed in the report envelope.
#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_path: Option<PathBuf>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Command-specific options.
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub options: serde_json::Map<String, serde_json::Value>,
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::usage(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

impl RunConfig {
    pub fn resolve(
        command: &str,
        global: &Global,
        op: Option<&OperatorArgs>,
    ) -> Result<Self, CliError> {
        let file = match &global.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::usage(format!(
                    "config file is for command `{c}`, not `{command}`"
                )));
            }
        }
        let op = op.cloned().unwrap_or_default();
        let cfg = RunConfig {
            command: command.to_string(),
            spec_path: op.spec.or(file.spec_path),
            builtin: op.builtin.or(file.builtin),
            field: op.field.or(file.field),
            n: op.n.or(file.n),
            k: op.k.or(file.k),
            p: op.p.or(file.p),
            matrix_path: op.matrix.or(file.matrix_path),
            samples: global.samples.or(file.samples).unwrap_or(1000),
            seed: global.seed.or(file.seed).unwrap_or(42),
            tol: global.tol.or(file.tol).unwrap_or(1e-8),
            output: global.out.clone().or(file.output),
            format: global.format.or(file.format).unwrap_or_default(),
            options: serde_json::Map::new(),
        };
        if cfg.samples == 0 {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        if cfg.tol.is_nan() || cfg.tol <= 0.0 {
            return Err(CliError::usage("--tol must be positive"));
        }
        Ok(cfg)
    }

    pub fn option(mut self, key: &str, value: impl Serialize) -> Self {
        self.options.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable option"),
        );
        self
    }
}
