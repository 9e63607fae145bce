use gd_core::majorize::counterexample_operator;
use gd_core::operators::{read_spec, OperatorSpec, Space};

use crate::args::Field;
use crate::config::RunConfig;
use crate::CliError;

fn space(cfg: &RunConfig) -> Result<Space, CliError> {
    let n = cfg
        .n
        .ok_or_else(|| CliError::usage("this built-in needs --n"))?;
    Ok(match cfg.field.unwrap_or_default() {
        Field::Real => Space::real(n),
        Field::Complex => Space::complex(n),
        Field::Quaternion => Space::quaternionic(n),
    })
}

/// `sigma-k` takes `--k`; `sigma-<k>` is accepted as well.
fn builtin(name: &str, cfg: &RunConfig) -> Result<OperatorSpec, CliError> {
    let spec = match name {
        "det" => OperatorSpec::det(space(cfg)?),
        "pfold" => {
            let p = cfg.p.ok_or_else(|| CliError::usage("pfold needs --p"))?;
            OperatorSpec::pfold(space(cfg)?, p)
        }
        "lagrangian-ma" => {
            let n = cfg
                .n
                .ok_or_else(|| CliError::usage("lagrangian-ma needs --n"))?;
            OperatorSpec::lagrangian_ma(n)
        }
        "counterexample" => Ok(counterexample_operator()),
        _ => {
            let k = match name.strip_prefix("sigma-") {
                Some("k") => cfg.k.ok_or_else(|| CliError::usage("sigma-k needs --k"))?,
                Some(digits) => digits
                    .parse()
                    .map_err(|_| CliError::usage(format!("unknown built-in `{name}`")))?,
                None => {
                    return Err(CliError::usage(format!(
                        "unknown built-in `{name}` (expected sigma-k, det, pfold, lagrangian-ma or counterexample)"
                    )))
                }
            };
            OperatorSpec::sigma(space(cfg)?, k)
        }
    };
    spec.map_err(CliError::from)
}

pub fn load_operator(cfg: &RunConfig) -> Result<OperatorSpec, CliError> {
    match (&cfg.spec_path, &cfg.builtin) {
        (Some(_), Some(_)) => Err(CliError::usage(
            "give either a spec file or --builtin, not both",
        )),
        (Some(path), None) => read_spec(path).map_err(|e| CliError::at(path, e)),
        (None, Some(name)) => builtin(name, cfg),
        (None, None) => Err(CliError::usage(
            "no operator: give a spec file or --builtin",
        )),
    }
}
