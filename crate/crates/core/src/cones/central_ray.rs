use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garding::{gradient_matrix, i_eigenvalues};
use crate::linalg::{MatrixFile, SymmetricMatrix};
use crate::operators::eval::{directional_radius, evaluate_unchecked, restriction};
use crate::operators::OperatorSpec;
use crate::parallel::{map_indexed, Exec};
use crate::report::{CheckReport, Witness};

use super::sampler::ConeSampler;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralRayReport {
    pub pass: bool,
    /// Gradient of `log F` at `I` for the field inner product
    /// `<A, B> = tr_R(AB) / m`.
    pub gradient_at_i: MatrixFile,
    /// Least-squares `k` in `gradient = k I`.
    pub k_hat: f64,
    /// `|gradient - k_hat I|_F`.
    pub deviation: f64,
    /// `N / n` with `n` the field eigenvalue count.
    pub k_theory: f64,
    /// Largest `|sum_j lambda_j^{F,I}(B) - k_hat tr(B)|` over an orthonormal basis.
    pub trace_residual: f64,
    /// Smallest relative slack of `F(A)^{1/N} <= F(I)^{1/N} (k/N) tr(A)` on cone samples.
    pub inequality_gap: f64,
    pub inequality_witness: Option<Witness>,
    pub samples: usize,
    pub seed: u64,
    /// Maximizer of `F^{1/N}` on the unit sphere, when a search was run.
    pub ray_point: Option<MatrixFile>,
}

/// Fits `D_I log F = k I` and checks `sum lambda^{F,I}(B) = k tr B` on a
/// basis and the trace inequality on `samples` cone points.
pub fn central_ray_check(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<CentralRayReport> {
    let domain = f.domain();
    let id = f.identity();
    let fi = evaluate_unchecked(f, &id)?;
    if !(fi > 0.0) {
        return Err(Error::precondition(format!("F(I) = {fi} is not positive")));
    }
    let m = domain.multiplicity() as f64;
    let n = domain.field_n() as f64;
    let big_n = f.degree() as f64;
    let g = gradient_matrix(f, &id)?.scale_by(m / fi);
    let k_hat = g.trace() / (m * n);
    let deviation = g.sub(&id.scale_by(k_hat)).frobenius_norm();

    // The eigenvalue sum is read off the top two coefficients of
    // u -> F(B + u I) rather than from the roots, which lose accuracy at
    // the repeated eigenvalues of basis elements.
    let mut trace_residual = 0.0f64;
    let deg = f.degree();
    for b in domain.basis() {
        let c = restriction(f, &b, &id, 1.0)?;
        let tr_f = c[deg - 1] / c[deg];
        trace_residual = trace_residual.max((tr_f - k_hat * b.trace() / m).abs());
    }

    let sampler = ConeSampler::operator(f);
    let gamma = fi.powf(1.0 / big_n);
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let (a, _) = sampler.mixed(0.5, rng);
        let lhs = evaluate_unchecked(f, &a)
            .map(|v| v.max(0.0).powf(1.0 / big_n))
            .unwrap_or(f64::NAN);
        let rhs = gamma * k_hat / big_n * a.trace() / m;
        ((rhs - lhs) / rhs.abs().max(1.0), a)
    });
    let mut check = CheckReport::new(samples, seed);
    for (gap, a) in &rows {
        check.observe(*gap, || Witness::matrix(a));
    }
    let k_theory = big_n / n;
    let inequality_gap = if samples == 0 {
        f64::INFINITY
    } else {
        check.worst_gap
    };
    Ok(CentralRayReport {
        pass: deviation <= 1e-8
            && (k_hat - k_theory).abs() <= 1e-8
            && trace_residual <= 1e-8
            && inequality_gap >= -1e-9,
        gradient_at_i: MatrixFile::from_matrix(&g),
        k_hat,
        deviation,
        k_theory,
        trace_residual,
        inequality_gap,
        inequality_witness: check.witness,
        samples,
        seed,
        ray_point: None,
    })
}

/// Result of maximizing `F(B)^{1/N}` over unit `B` in the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralRaySearch {
    pub ray_point: MatrixFile,
    /// `F(B_0)^{1/N}`.
    pub value: f64,
    /// `|D F(B_0) - <D F(B_0), B_0> B_0| / |<D F(B_0), B_0>|`.
    pub first_order_residual: f64,
    pub restarts: usize,
    pub converged_restarts: usize,
    /// `(iteration, value, residual)` for the winning restart.
    pub trace: Vec<(usize, f64, f64)>,
}

impl CentralRaySearch {
    pub fn point(&self) -> Result<SymmetricMatrix> {
        self.ray_point.clone().into_matrix("ray_point")
    }
}

/// Search options. `basis` restricts the search to the span of the given
/// orthonormal matrices (the domain basis when `None`).
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iters: usize,
    pub tol: f64,
    pub basis: Option<Vec<SymmetricMatrix>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 50,
            iters: 500,
            tol: 1e-6,
            basis: None,
        }
    }
}

struct Run {
    point: SymmetricMatrix,
    value: f64,
    residual: f64,
    trace: Vec<(usize, f64, f64)>,
}

fn project(b: &SymmetricMatrix, basis: &[SymmetricMatrix]) -> SymmetricMatrix {
    let mut out = b.scale_by(0.0);
    for e in basis {
        out = e.axpy(e.inner(b), &out);
    }
    out
}

/// `(F(B), D F(B))` with the gradient expanded in `basis`.
fn value_and_gradient(
    f: &OperatorSpec,
    b: &SymmetricMatrix,
    basis: &[SymmetricMatrix],
) -> Result<(f64, SymmetricMatrix)> {
    let fb = evaluate_unchecked(f, b)?;
    let mut g = b.scale_by(0.0);
    for e in basis {
        let rho = directional_radius(b, e);
        let c = restriction(f, b, e, rho)?;
        g = e.axpy(c[1] / rho, &g);
    }
    Ok((fb, g))
}

fn in_cone(f: &OperatorSpec, b: &SymmetricMatrix) -> bool {
    i_eigenvalues(f, b).map(|s| s.min() > 0.0).unwrap_or(false)
}

fn ascend(
    f: &OperatorSpec,
    start: SymmetricMatrix,
    basis: &[SymmetricMatrix],
    opts: &SearchOptions,
) -> Result<Run> {
    let big_n = f.degree() as f64;
    let mut b = start;
    let mut trace = Vec::new();
    let (mut fb, mut g) = value_and_gradient(f, &b, basis)?;
    let mut residual = f64::INFINITY;
    for it in 0..opts.iters {
        let radial = g.inner(&b);
        let tangent = b.axpy(-radial, &g);
        residual = tangent.frobenius_norm() / radial.abs();
        let value = fb.powf(1.0 / big_n);
        trace.push((it, value, residual));
        if residual <= 1e-13 {
            break;
        }
        // Ascent direction for F^{1/N}, relative to its value.
        let dir = tangent.scale_by(1.0 / (big_n * fb));
        let slope = dir.inner(&dir);
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-12 {
            let cand = dir.axpy(step, &b);
            let cand = cand.scale_by(1.0 / cand.frobenius_norm());
            if let Ok(fc) = evaluate_unchecked(f, &cand) {
                if fc > 0.0
                    && fc.powf(1.0 / big_n) >= value * (1.0 + 1e-4 * step * slope)
                    && in_cone(f, &cand)
                {
                    b = cand;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
        (fb, g) = value_and_gradient(f, &b, basis)?;
    }
    let radial = g.inner(&b);
    residual = residual.min(b.axpy(-radial, &g).frobenius_norm() / radial.abs());
    Ok(Run {
        value: fb.powf(1.0 / big_n),
        point: b,
        residual,
        trace,
    })
}

/// Projected ascent of `F(B)^{1/N}` over the unit sphere in the cone from
/// `opts.restarts` seeded interior starts; backtracking halves the step
/// from 1. Returns the best restart whose first-order residual is at most
/// `opts.tol`, or [`Error::SearchFailed`].
pub fn central_ray_search(
    f: &OperatorSpec,
    seed: u64,
    opts: &SearchOptions,
    exec: Exec,
) -> Result<CentralRaySearch> {
    let fi = evaluate_unchecked(f, &f.identity())?;
    if !(fi > 0.0) {
        return Err(Error::precondition(format!("F(I) = {fi} is not positive")));
    }
    let basis = opts.basis.clone().unwrap_or_else(|| f.domain().basis());
    for e in &basis {
        f.domain().contains(e)?;
    }
    let sampler = ConeSampler::operator(f);
    let runs = map_indexed(exec, opts.restarts, seed, |_, rng| {
        for _ in 0..100 {
            let x = project(&sampler.sample(false, rng), &basis);
            let norm = x.frobenius_norm();
            if norm <= 1e-12 {
                continue;
            }
            let x = x.scale_by(1.0 / norm);
            if in_cone(f, &x) {
                return ascend(f, x, &basis, opts).ok();
            }
        }
        None
    });
    let converged: Vec<&Run> = runs
        .iter()
        .flatten()
        .filter(|r| r.residual <= opts.tol)
        .collect();
    let best_residual = runs
        .iter()
        .flatten()
        .map(|r| r.residual)
        .fold(f64::INFINITY, f64::min);
    let best = converged
        .iter()
        .copied()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(Error::SearchFailed {
            residual: best_residual,
        })?;
    Ok(CentralRaySearch {
        ray_point: MatrixFile::from_matrix(&best.point),
        value: best.value,
        first_order_residual: best.residual,
        restarts: opts.restarts,
        converged_restarts: converged.len(),
        trace: best.trace.clone(),
    })
}

/// Chordal distance `|A/|A| - B/|B||`, which is the angle to first order.
pub fn angle_between(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    let cos = (a.inner(b) / (na * nb)).clamp(-1.0, 1.0);
    let chord = a
        .scale_by(1.0 / na)
        .sub(&b.scale_by(1.0 / nb))
        .frobenius_norm();
    if chord < 0.1 {
        2.0 * (0.5 * chord).asin()
    } else {
        cos.acos()
    }
}

/// `F(A)^{1/N} <= F(B_0)^{1/N}` for unit cone samples and for unit points
/// near `B_0`, and near-equality (gap `<= 1e-6` relative) only within angle
/// `1e-3` of `B_0`.
pub fn sup_inequality_check(
    f: &OperatorSpec,
    b0: &SymmetricMatrix,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> CheckReport {
    let big_n = f.degree() as f64;
    let top = evaluate_unchecked(f, b0)
        .map(|v| v.powf(1.0 / big_n))
        .unwrap_or(f64::NAN);
    let sampler = ConeSampler::operator(f);
    let domain = f.domain();
    let rows = map_indexed(exec, samples, seed, |i, rng| {
        let a = if i % 2 == 0 {
            sampler.sample(false, rng)
        } else {
            let z: f64 = StandardNormal.sample(rng);
            let p = crate::sampling::random_direction(domain, rng);
            let size = 10f64.powf(-rng.random_range(2.0..6.0)) * z.signum();
            let x = p.axpy(size, b0);
            x.scale_by(1.0 / x.frobenius_norm())
        };
        let v = evaluate_unchecked(f, &a)
            .map(|v| v.max(0.0).powf(1.0 / big_n))
            .unwrap_or(f64::NAN);
        ((top - v) / top, angle_between(&a, b0), a)
    });
    let mut report = CheckReport::new(samples, seed);
    let mut near_equality_max_angle = 0.0f64;
    for (gap, angle, a) in &rows {
        if *gap <= 1e-8 {
            near_equality_max_angle = near_equality_max_angle.max(*angle);
        }
        report.observe(*gap, || Witness::matrix(a));
    }
    report.set("near_equality_max_angle", near_equality_max_angle);
    let mut report = report.finish(1e-9);
    report.pass &= near_equality_max_angle <= 1e-3;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Space;
    use crate::poly::SparseSymPoly;
    use approx::assert_relative_eq;

    #[test]
    fn sigma2_constant() {
        let p = SparseSymPoly::elementary(3, 2).unwrap().scale(1.0 / 3.0);
        let f = OperatorSpec::sym_poly(Space::real(3), p).unwrap();
        let r = central_ray_check(&f, 50, 1, Exec::Parallel).unwrap();
        assert!(r.pass, "{r:?}");
        assert_relative_eq!(r.k_hat, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn counterexample_fails() {
        let f = OperatorSpec::diagonal(SparseSymPoly::monomial(vec![2, 1], 1.0).unwrap()).unwrap();
        let r = central_ray_check(&f, 20, 1, Exec::Parallel).unwrap();
        assert!(!r.pass);
        assert!(r.deviation > 0.1);
    }

    #[test]
    fn det_search_finds_identity() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let opts = SearchOptions {
            restarts: 4,
            ..Default::default()
        };
        let s = central_ray_search(&f, 1, &opts, Exec::Parallel).unwrap();
        let b0 = s.point().unwrap();
        assert!(
            angle_between(&b0, &f.identity()) < 1e-6,
            "{:?}",
            s.first_order_residual
        );
        assert!(sup_inequality_check(&f, &b0, 100, 2, Exec::Parallel).pass);
    }

    #[test]
    fn diagonal_model_stationary_point() {
        let f = OperatorSpec::diagonal(SparseSymPoly::monomial(vec![2, 1], 1.0).unwrap()).unwrap();
        let basis = vec![
            SymmetricMatrix::diag(&[1.0, 0.0]),
            SymmetricMatrix::diag(&[0.0, 1.0]),
        ];
        let opts = SearchOptions {
            restarts: 4,
            basis: Some(basis),
            ..Default::default()
        };
        let s = central_ray_search(&f, 1, &opts, Exec::Parallel).unwrap();
        let want = SymmetricMatrix::diag(&[2f64.sqrt(), 1.0]);
        assert!(angle_between(&s.point().unwrap(), &want) < 1e-6);
    }
}
