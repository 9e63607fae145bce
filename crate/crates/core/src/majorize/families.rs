use crate::error::{Error, Result};
use crate::operators::{OpNode, OperatorSpec};
use crate::parallel::Exec;
use crate::poly::SparseSymPoly;
use crate::report::CheckReport;
use crate::sampling::ScaleRange;

use super::basic::check_basic_lemma;
use super::harness::{majorization_harness, GammaMode};

fn combined(spec: &OperatorSpec) -> &SparseSymPoly {
    match spec.node() {
        OpNode::TensorProduct { combined, .. } | OpNode::ConvexCombo { combined, .. } => combined,
        _ => unreachable!("built by tensor or convex_combo"),
    }
}

/// Builds the block product of `q` and `r` (when their central-ray
/// constants agree) and their weighted block sum (when their degrees
/// agree), checks each against the coefficient hypotheses, and runs the
/// majorization harness on the induced ascending-eigenvalue operator.
///
/// Fails with [`Error::Precondition`] when neither combinator applies or
/// an input fails the hypotheses other than normalization.
pub fn ordered_eig_family_check(
    q: &SparseSymPoly,
    r: &SparseSymPoly,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<CheckReport> {
    for (name, p) in [("q", q), ("r", r)] {
        let rep = check_basic_lemma(&p.normalized()?);
        if !rep.pass {
            return Err(Error::precondition(format!(
                "{name} fails the coefficient hypotheses"
            )));
        }
    }
    let mut specs = Vec::new();
    let mut report = CheckReport::new(0, seed);
    match OperatorSpec::tensor(q.clone(), r.clone()) {
        Ok(s) => specs.push(("tensor_", s)),
        Err(e) => report.set(
            "tensor_rejected",
            if matches!(e, Error::Precondition(_)) {
                1.0
            } else {
                f64::NAN
            },
        ),
    }
    if q.degree() == r.degree() {
        specs.push(("convex_", OperatorSpec::convex_combo(q.clone(), r.clone())?));
    } else {
        report.set("convex_rejected", 1.0);
    }
    if specs.is_empty() {
        return Err(Error::precondition(
            "neither combinator applies: central-ray constants and degrees both differ",
        ));
    }
    for (prefix, spec) in specs {
        let lemma = check_basic_lemma(combined(&spec));
        let maj = majorization_harness(
            &spec,
            samples,
            seed,
            ScaleRange::default(),
            GammaMode::FromIdentity,
            exec,
        )?;
        let mut sub = CheckReport::new(samples, seed);
        sub.observe(maj.min_relative_gap, || {
            maj.witness.clone().expect("at least one sample")
        });
        sub.set("basic_lemma_pass", if lemma.pass { 1.0 } else { 0.0 });
        sub.set("k", lemma.k);
        sub.set("min_gap", maj.min_gap);
        sub.set("degree", spec.degree() as f64);
        let mut sub = sub.finish(1e-9);
        sub.pass &= lemma.pass && maj.pass;
        report = report.merge(sub, prefix);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_means_tensor() {
        let p1 = SparseSymPoly::power_mean(1).unwrap();
        let p2 = SparseSymPoly::power_mean(2).unwrap();
        let r = ordered_eig_family_check(&p1, &p2, 100, 3, Exec::Parallel).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.residuals["convex_rejected"], 1.0);
        assert_eq!(r.residuals["tensor_degree"], 3.0);
    }

    #[test]
    fn means_convex() {
        let m = SparseSymPoly::mean(2).unwrap();
        let r = ordered_eig_family_check(&m, &m, 50, 3, Exec::Parallel).unwrap();
        assert!(r.pass, "{r:?}");
        let spec = OperatorSpec::convex_combo(m.clone(), m).unwrap();
        let four = SparseSymPoly::mean(4).unwrap();
        assert!(combined(&spec)
            .terms()
            .zip(four.terms())
            .all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() < 1e-15));
    }

    #[test]
    fn mismatched_degree_rejected() {
        let p1 = SparseSymPoly::power_mean(1).unwrap();
        let p2 = SparseSymPoly::power_mean(2).unwrap();
        assert!(matches!(
            OperatorSpec::convex_combo(p1, p2),
            Err(Error::Precondition(_))
        ));
    }
}
