use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, SymmetricMatrix};
use crate::operators::eval::{domain_det, evaluate_unchecked};
use crate::operators::{OpNode, OperatorSpec};
use crate::parallel::{map_indexed, Exec};
use crate::report::{CheckReport, Witness};
use crate::sampling::{lagrangian_positive, random_spd, ScaleRange};

/// Constant in front of `det(A)^{1/n}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// `gamma = F(I)^{1/N}`; equality at `A = I`.
    #[default]
    FromIdentity,
    /// `gamma = 1`.
    Unit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub pass: bool,
    pub gamma: f64,
    pub gamma_mode: GammaMode,
    pub samples: usize,
    pub seed: u64,
    /// `min (F(A)^{1/N} - gamma det(A)^{1/n})`.
    pub min_gap: f64,
    /// Smallest gap divided by `max(1, gamma det(A)^{1/n})`; pass needs `>= -1e-9`.
    pub min_relative_gap: f64,
    pub witness: Option<Witness>,
    /// Gap at `A = I`.
    pub identity_gap: f64,
    /// `n` in the exponent: eigenvalue count over the operator's field.
    pub det_exponent_n: usize,
}

/// `F(A)^{1/N}` and `det(A)^{1/n}` over the operator's field.
pub fn majorization_sides(f: &OperatorSpec, a: &SymmetricMatrix) -> Result<(f64, f64)> {
    let domain = f.domain();
    let n = domain.field_n() as f64;
    let big_n = f.degree() as f64;
    let fa = evaluate_unchecked(f, a)?;
    let det = domain_det(a, domain)?;
    Ok((fa.powf(1.0 / big_n), det.powf(1.0 / n)))
}

/// Positive sample for `f`: structure-projected positive definite, or
/// `t I + S` for the Lagrangian operator.
pub fn positive_sample<R: rand::Rng + ?Sized>(
    f: &OperatorSpec,
    range: ScaleRange,
    rng: &mut R,
) -> SymmetricMatrix {
    match f.node() {
        OpNode::LagrangianMA => lagrangian_positive(f.space().n, range, rng),
        _ => random_spd(f.domain(), range, rng),
    }
}

fn gamma_for(f: &OperatorSpec, mode: GammaMode) -> Result<(f64, f64, f64)> {
    let (fi, det_i) = majorization_sides(f, &f.identity())?;
    let gamma = match mode {
        GammaMode::FromIdentity => fi,
        GammaMode::Unit => 1.0,
    };
    Ok((gamma, fi, fi - gamma * det_i))
}

/// `(gap, gap / max(1, rhs), A)` per sample, in index order.
fn majorization_rows(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    range: ScaleRange,
    gamma: f64,
    exec: Exec,
) -> Vec<(f64, f64, SymmetricMatrix)> {
    map_indexed(exec, samples, seed, |_, rng| {
        let a = positive_sample(f, range, rng);
        let (lhs, det) = majorization_sides(f, &a).unwrap_or((f64::NAN, f64::NAN));
        let rhs = gamma * det;
        (lhs - rhs, (lhs - rhs) / rhs.max(1.0), a)
    })
}

/// Seeded check of `F(A)^{1/N} >= gamma det(A)^{1/n}` on positive samples.
pub fn majorization_harness(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    range: ScaleRange,
    mode: GammaMode,
    exec: Exec,
) -> Result<MajorizationReport> {
    let (gamma, fi, identity_gap) = gamma_for(f, mode)?;
    let rows = majorization_rows(f, samples, seed, range, gamma, exec);
    let mut min_gap = f64::INFINITY;
    let mut min_relative_gap = f64::INFINITY;
    let mut witness = None;
    for (gap, rel, a) in &rows {
        min_gap = min_gap.min(*gap);
        if *rel < min_relative_gap || rel.is_nan() {
            min_relative_gap = *rel;
            witness = Some(Witness::matrix(a));
        }
    }
    Ok(MajorizationReport {
        pass: min_relative_gap >= -1e-9
            && (mode == GammaMode::Unit || identity_gap.abs() <= 1e-12 * fi.max(1.0)),
        gamma,
        gamma_mode: mode,
        samples,
        seed,
        min_gap,
        min_relative_gap,
        witness,
        identity_gap,
        det_exponent_n: f.domain().field_n(),
    })
}

/// The per-sample gaps behind [`majorization_harness`] for the same
/// arguments, as `(sample_index, gap)`.
pub fn majorization_gaps(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    range: ScaleRange,
    mode: GammaMode,
    exec: Exec,
) -> Result<Vec<(usize, f64)>> {
    let (gamma, _, _) = gamma_for(f, mode)?;
    Ok(majorization_rows(f, samples, seed, range, gamma, exec)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (i, r.0))
        .collect())
}

/// Superadditivity `F(A+P)^{1/N} >= F(A)^{1/N} + F(P)^{1/N}` and its
/// majorization form `F(A+P)^{1/N} - F(A)^{1/N} >= gamma det(P)^{1/n}` on
/// positive pairs, plus the second one at `A = 1e-6 I`. Gaps are relative
/// to `max(1, rhs)`; pass needs `>= -1e-9`.
pub fn superadditivity_check(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<CheckReport> {
    let big_n = f.degree() as f64;
    let id = f.identity();
    let gamma = evaluate_unchecked(f, &id)?.powf(1.0 / big_n);
    let root = |m: &SymmetricMatrix| {
        evaluate_unchecked(f, m)
            .map(|v| v.powf(1.0 / big_n))
            .unwrap_or(f64::NAN)
    };
    let range = ScaleRange::default();
    let rows = map_indexed(exec, samples, seed, |i, rng| {
        let a = if i == 0 {
            id.scale_by(1e-6)
        } else {
            positive_sample(f, range, rng)
        };
        let p = positive_sample(f, range, rng);
        let sum = root(&a.add(&p));
        let (fa, fp) = (root(&a), root(&p));
        let det_p = majorization_sides(f, &p).map(|s| s.1).unwrap_or(f64::NAN);
        let rhs_add = fa + fp;
        let rhs_maj = gamma * det_p;
        let gap_add = (sum - rhs_add) / rhs_add.max(1.0);
        let gap_maj = (sum - fa - rhs_maj) / rhs_maj.max(1.0);
        (gap_add, gap_maj, a, p)
    });
    let mut report = CheckReport::new(samples, seed);
    let mut worst_add = f64::INFINITY;
    let mut worst_maj = f64::INFINITY;
    for (ga, gm, a, p) in &rows {
        worst_add = worst_add.min(*ga);
        worst_maj = worst_maj.min(*gm);
        report.observe(ga.min(*gm), || {
            Witness::Vector([a.matrix().as_slice(), p.matrix().as_slice()].concat())
        });
    }
    report.set("worst_superadditivity_gap", worst_add);
    report.set("worst_majorization_gap", worst_maj);
    report.set(
        "near_zero_majorization_gap",
        rows.first().map(|r| r.1).unwrap_or(f64::NAN),
    );
    Ok(report.finish(1e-9))
}

/// Concavity of `F^{1/N}` along segments of positive matrices at
/// `tau in {1/4, 1/2, 3/4}`; gaps relative to `max(1, rhs)`, slack `1e-9`.
pub fn concavity_check(f: &OperatorSpec, samples: usize, seed: u64, exec: Exec) -> CheckReport {
    let big_n = f.degree() as f64;
    let root = |m: &SymmetricMatrix| {
        evaluate_unchecked(f, m)
            .map(|v| v.powf(1.0 / big_n))
            .unwrap_or(f64::NAN)
    };
    let range = ScaleRange::default();
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let a = positive_sample(f, range, rng);
        let b = positive_sample(f, range, rng);
        let (ra, rb) = (root(&a), root(&b));
        let worst = [0.25, 0.5, 0.75]
            .iter()
            .map(|&tau| {
                let rhs = tau * ra + (1.0 - tau) * rb;
                (root(&a.scale_by(tau).add(&b.scale_by(1.0 - tau))) - rhs) / rhs.max(1.0)
            })
            .fold(f64::INFINITY, f64::min);
        (worst, a, b)
    });
    let mut report = CheckReport::new(samples, seed);
    for (gap, a, b) in &rows {
        report.observe(*gap, || {
            Witness::Vector([a.matrix().as_slice(), b.matrix().as_slice()].concat())
        });
    }
    report.finish(1e-9)
}

/// Hadamard's inequality `a_11 ... a_nn >= det A` for positive definite
/// `A`, with `det` both from LU and as the squared product of the Cholesky
/// diagonal. `worst_gap` is the smaller relative slack of the two routes.
pub fn hadamard_check(a: &SymmetricMatrix) -> Result<CheckReport> {
    let l = cholesky(a)?;
    let diag: f64 = a.diagonal().iter().product();
    let det_lu = a.matrix().det();
    let det_chol: f64 = (0..a.dim()).map(|i| l[(i, i)] * l[(i, i)]).product();
    if det_lu <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            row: 0,
            pivot: det_lu,
        });
    }
    let mut report = CheckReport::new(1, 0);
    let w = || Witness::matrix(a);
    report.observe((diag - det_lu) / diag, w);
    report.observe((diag - det_chol) / diag, w);
    report.set("diagonal_product", diag);
    report.set("det_lu", det_lu);
    report.set("det_cholesky", det_chol);
    report.set("route_mismatch", (det_lu - det_chol).abs() / det_lu);
    let pass_routes = (det_lu - det_chol).abs() <= 1e-10 * det_lu;
    let mut report = report.finish(1e-10);
    report.pass &= pass_routes;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Space;
    use approx::assert_relative_eq;

    #[test]
    fn hand_gaps() {
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        let (l, d) = majorization_sides(&f, &SymmetricMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_relative_eq!(
            l - 3f64.sqrt() * d,
            11f64.sqrt() - 3f64.sqrt() * 6f64.cbrt(),
            epsilon = 1e-12
        );
        let f = OperatorSpec::pfold(Space::real(3), 2).unwrap();
        let (l, d) = majorization_sides(&f, &SymmetricMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_relative_eq!(l, 60f64.cbrt(), epsilon = 1e-12);
        assert_relative_eq!(2.0 * d, 2.0 * 6f64.cbrt(), epsilon = 1e-12);
    }

    #[test]
    fn sigma2_majorizes() {
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        let r = majorization_harness(
            &f,
            100,
            1,
            ScaleRange::default(),
            GammaMode::FromIdentity,
            Exec::Parallel,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.min_gap > 0.0);
        assert_eq!(r.identity_gap, 0.0);
    }

    #[test]
    fn superadditive_and_concave() {
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        assert!(
            superadditivity_check(&f, 50, 2, Exec::Parallel)
                .unwrap()
                .pass
        );
        assert!(concavity_check(&f, 50, 2, Exec::Parallel).pass);
        let f = OperatorSpec::det(Space::real(2)).unwrap();
        let two = f.identity().scale_by(2.0).into_matrix();
        let lhs = f.evaluate(&SymmetricMatrix::real(two)).unwrap().sqrt();
        assert_relative_eq!(lhs, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn hadamard_examples() {
        let r =
            hadamard_check(&SymmetricMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap())
                .unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.residuals["det_lu"], 16.0, epsilon = 1e-12);
        let r = hadamard_check(&SymmetricMatrix::diag(&[2.0, 3.0])).unwrap();
        assert!(r.pass && r.worst_gap.abs() < 1e-15);
        assert!(hadamard_check(&SymmetricMatrix::diag(&[1.0, -1.0])).is_err());
    }
}
