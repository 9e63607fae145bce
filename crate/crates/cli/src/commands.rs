use std::path::Path;

use serde_json::{json, Value};

use gd_core::cones::{
    central_ray_check, central_ray_search, exhaustion_convexity_check, exhaustion_value,
    open_polar_test, prelevel_check, sup_inequality_check, ConeSampler, SearchOptions,
};
use gd_core::garding::{barrier_harness, garding_spectrum, in_garding_cone, is_hyperbolic};
use gd_core::garding::{discriminant_identity_check, guler_check, log_derivative};
use gd_core::linalg::{read_matrix, SymmetricMatrix};
use gd_core::majorize::{
    check_basic_lemma, counterexample_ratio, counterexample_scan, majorization_gaps,
    majorization_harness, pogorelov_k, pogorelov_verify, GammaMode, PogorelovGrid,
};
use gd_core::operators::OperatorSpec;
use gd_core::parallel::Exec;
use gd_core::sampling::ScaleRange;

use crate::args::*;
use crate::builtin::load_operator;
use crate::config::RunConfig;
use crate::CliError;

/// Result of one command before it is written out.
pub struct Outcome {
    pub config: RunConfig,
    pub pass: bool,
    pub report: Value,
    /// `(sample_index, gap)` rows for CSV output, when the command has them.
    pub gaps: Option<Vec<(usize, f64)>>,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn matrix(path: &Path) -> Result<SymmetricMatrix, CliError> {
    read_matrix(path).map_err(|e| CliError::at(path, e))
}

fn required_matrix(cfg: &RunConfig, what: &str) -> Result<SymmetricMatrix, CliError> {
    match &cfg.matrix_path {
        Some(p) => matrix(p),
        None => Err(CliError::usage(format!("{what} needs --matrix"))),
    }
}

fn header(f: &OperatorSpec) -> Value {
    json!({ "operator": f.describe(), "degree": f.degree() })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn run(command: Command, exec: Exec) -> Result<Outcome, CliError> {
    match command {
        Command::Check(c) => check(RunConfig::resolve("check", &c.global, Some(&c.op))?, exec),
        Command::Majorize(c) => {
            let mode = match c.gamma_mode {
                GammaArg::Identity => GammaMode::FromIdentity,
                GammaArg::Unit => GammaMode::Unit,
            };
            let cfg =
                RunConfig::resolve("majorize", &c.global, Some(&c.op))?.option("gamma_mode", mode);
            majorize(cfg, mode, exec)
        }
        Command::Eigs(c) => {
            let cfg = RunConfig::resolve("eigs", &c.global, Some(&c.op))?;
            let cfg = match &c.base {
                Some(b) => cfg.option("base", b),
                None => cfg,
            };
            eigs(cfg, c.base.as_deref())
        }
        Command::Barrier(c) => {
            let mut cfg = RunConfig::resolve("barrier", &c.global, Some(&c.op))?
                .option("order", c.order)
                .option("l", c.l);
            if let Some(d) = &c.direction {
                cfg = cfg.option("direction", d);
            }
            barrier(cfg, c.direction.as_deref(), c.order, c.l, exec)
        }
        Command::CentralRay(c) => {
            let mut cfg = RunConfig::resolve("central-ray", &c.global, Some(&c.op))?;
            if c.search {
                cfg = cfg
                    .option("search", true)
                    .option("restarts", c.restarts)
                    .option("diagonal", c.diagonal);
            }
            central_ray(cfg, c.search.then_some((c.restarts, c.diagonal)), exec)
        }
        Command::Exhaustion(c) => {
            let mut cfg =
                RunConfig::resolve("exhaustion", &c.global, Some(&c.op))?.option("c", c.c);
            if let Some(p) = &c.point {
                cfg = cfg.option("point", p);
            }
            exhaustion(cfg, c.c, c.point.as_deref(), exec)
        }
        Command::Counterexample(CounterexampleCmd::Ratio { global, s, gamma }) => {
            let cfg = RunConfig::resolve("counterexample ratio", &global, None)?
                .option("gamma", gamma)
                .option("s", &s);
            ratio(cfg, &s, gamma)
        }
        Command::Counterexample(CounterexampleCmd::Pogorelov {
            global,
            big_n,
            n,
            eps,
        }) => {
            let cfg = RunConfig::resolve("counterexample pogorelov", &global, None)?
                .option("N", big_n)
                .option("n", n)
                .option("eps", eps);
            pogorelov(cfg, big_n, n, eps)
        }
    }
}

fn check(cfg: RunConfig, exec: Exec) -> Result<Outcome, CliError> {
    let f = load_operator(&cfg)?;
    let hyper = is_hyperbolic(&f, cfg.samples, cfg.seed, cfg.tol, exec);
    let lemma = f.defining_polynomial().map(|p| check_basic_lemma(&p));
    let in_cone = match &cfg.matrix_path {
        Some(p) => Some(in_garding_cone(&f, &matrix(p)?, cfg.tol)?),
        None => None,
    };
    let pass = hyper.pass && lemma.as_ref().is_none_or(|l| l.pass) && in_cone.unwrap_or(true);
    let report = merge(
        header(&f),
        json!({
            "pass": pass,
            "hyperbolicity": to_value(&hyper),
            "coefficient_conditions": lemma.as_ref().map(to_value),
            "in_cone": in_cone,
        }),
    );
    Ok(Outcome {
        config: cfg,
        pass,
        report,
        gaps: None,
    })
}

fn majorize(cfg: RunConfig, mode: GammaMode, exec: Exec) -> Result<Outcome, CliError> {
    let f = load_operator(&cfg)?;
    let range = ScaleRange::default();
    let r = majorization_harness(&f, cfg.samples, cfg.seed, range, mode, exec)?;
    let gaps = match cfg.format {
        Format::Csv => Some(majorization_gaps(
            &f,
            cfg.samples,
            cfg.seed,
            range,
            mode,
            exec,
        )?),
        Format::Json => None,
    };
    Ok(Outcome {
        pass: r.pass,
        report: merge(header(&f), to_value(&r)),
        gaps,
        config: cfg,
    })
}

fn eigs(cfg: RunConfig, base: Option<&Path>) -> Result<Outcome, CliError> {
    let f = load_operator(&cfg)?;
    let b = required_matrix(&cfg, "eigs")?;
    let a = match base {
        Some(p) => matrix(p)?,
        None => f.identity(),
    };
    let s = garding_spectrum(&f, &a, &b)?;
    let pass = s.hyperbolicity_residual <= cfg.tol.max(1e-7);
    let report = merge(header(&f), merge(json!({ "pass": pass }), to_value(&s)));
    Ok(Outcome {
        config: cfg,
        pass,
        report,
        gaps: None,
    })
}

fn barrier(
    cfg: RunConfig,
    direction: Option<&Path>,
    order: usize,
    l: usize,
    exec: Exec,
) -> Result<Outcome, CliError> {
    let f = load_operator(&cfg)?;
    match (&cfg.matrix_path, direction) {
        (Some(a), Some(b)) => {
            let (a, b) = (matrix(a)?, matrix(b)?);
            let derivs = (1..=order)
                .map(|k| log_derivative(&f, &a, &b, k))
                .collect::<Result<Vec<_>, _>>()?;
            let guler = guler_check(&f, &a, &b, order, l)?;
            let disc = discriminant_identity_check(&f, &a, &b)?;
            let pass = guler.pass && disc.pass;
            let report = merge(
                header(&f),
                json!({
                    "pass": pass,
                    "log_derivatives": derivs,
                    "guler": to_value(&guler),
                    "discriminant": to_value(&disc),
                }),
            );
            Ok(Outcome {
                config: cfg,
                pass,
                report,
                gaps: None,
            })
        }
        (None, None) => {
            let r = barrier_harness(&f, cfg.samples, cfg.seed, order, l, exec)?;
            Ok(Outcome {
                pass: r.pass,
                report: merge(header(&f), to_value(&r)),
                gaps: None,
                config: cfg,
            })
        }
        _ => Err(CliError::usage(
            "barrier takes both --matrix and --direction, or neither",
        )),
    }
}

fn diagonal_basis(n: usize) -> Vec<SymmetricMatrix> {
    (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            SymmetricMatrix::diag(&d)
        })
        .collect()
}

fn central_ray(
    cfg: RunConfig,
    search: Option<(usize, bool)>,
    exec: Exec,
) -> Result<Outcome, CliError> {
    let f = load_operator(&cfg)?;
    let check = central_ray_check(&f, cfg.samples, cfg.seed, exec)?;
    let mut pass = check.pass;
    let mut report = merge(header(&f), to_value(&check));
    if let Some((restarts, diagonal)) = search {
        let opts = SearchOptions {
            restarts,
            basis: diagonal.then(|| diagonal_basis(f.domain().dim())),
            ..Default::default()
        };
        let found = central_ray_search(&f, cfg.seed, &opts, exec)?;
        let b0 = found.point()?;
        let sup = sup_inequality_check(&f, &b0, cfg.samples, cfg.seed, exec);
        // The trajectory is bulky; keep its length only.
        let mut found_value = to_value(&found);
        if let Value::Object(m) = &mut found_value {
            m.insert("trace".into(), json!(found.trace.len()));
        }
        pass = if diagonal { sup.pass } else { pass && sup.pass };
        report = merge(
            report,
            json!({ "pass": pass, "search": found_value, "sup_inequality": to_value(&sup) }),
        );
    }
    Ok(Outcome {
        config: cfg,
        pass,
        report,
        gaps: None,
    })
}

fn exhaustion(
    cfg: RunConfig,
    c: f64,
    point: Option<&Path>,
    exec: Exec,
) -> Result<Outcome, CliError> {
    let g = load_operator(&cfg)?;
    let y = match &cfg.matrix_path {
        Some(p) => matrix(p)?,
        None => g.identity(),
    };
    let calibration = cfg.samples.min(2000);
    let polar = open_polar_test(
        &y,
        &ConeSampler::operator(&g),
        cfg.samples,
        cfg.seed,
        0.0,
        exec,
    )?;
    let prelevel = prelevel_check(&g, &y, c, cfg.samples, calibration, cfg.seed, exec)?;
    let convexity = exhaustion_convexity_check(&g, &y, cfg.samples, cfg.seed, exec)?;
    let psi = match point {
        Some(p) => Some(exhaustion_value(&g, &y, &matrix(p)?)?),
        None => None,
    };
    let pass = polar.pass && prelevel.pass && convexity.pass;
    let report = merge(
        header(&g),
        json!({
            "pass": pass,
            "polar": to_value(&polar),
            "prelevel": to_value(&prelevel),
            "convexity": to_value(&convexity),
            "psi_at_point": psi,
        }),
    );
    Ok(Outcome {
        config: cfg,
        pass,
        report,
        gaps: None,
    })
}

/// Passes when the scan finds a violating `s`, i.e. the counterexample is
/// reproduced for the given `gamma`.
fn ratio(cfg: RunConfig, s: &[f64], gamma: f64) -> Result<Outcome, CliError> {
    let scan = counterexample_scan(gamma)?;
    let extra = s
        .iter()
        .map(|&s| {
            Ok(json!({ "s": s, "ratio": counterexample_ratio(s)?, "formula": s.powf(1.0 / 6.0) }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let pass = scan.reproduced;
    let report = merge(json!({ "pass": pass, "requested": extra }), to_value(&scan));
    Ok(Outcome {
        config: cfg,
        pass,
        report,
        gaps: None,
    })
}

fn pogorelov(cfg: RunConfig, big_n: u32, n: usize, eps: f64) -> Result<Outcome, CliError> {
    let grid = PogorelovGrid {
        seed: cfg.seed,
        ..Default::default()
    };
    let r = pogorelov_verify(big_n, n, eps, &grid)?;
    let report = merge(json!({ "k": pogorelov_k(big_n, n) }), to_value(&r));
    Ok(Outcome {
        config: cfg,
        pass: r.pass,
        report,
        gaps: None,
    })
}
