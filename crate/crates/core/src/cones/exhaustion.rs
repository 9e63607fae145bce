use rand::Rng;

use crate::error::{Error, Result};
use crate::garding::i_eigenvalues;
use crate::linalg::SymmetricMatrix;
use crate::operators::eval::evaluate_unchecked;
use crate::operators::OperatorSpec;
use crate::parallel::{map_indexed, Exec};
use crate::report::{CheckReport, Witness};

use super::sampler::ConeSampler;

/// Multiplier applied to the sampled maximum of `g` on the unit sphere.
pub const SUP_SAFETY: f64 = 1.1;

/// `psi(x) = <y, x> - log g(x)` for `x` in the open cone.
pub fn exhaustion_value(g: &OperatorSpec, y: &SymmetricMatrix, x: &SymmetricMatrix) -> Result<f64> {
    let domain = g.domain();
    domain.contains(x)?;
    domain.contains(y)?;
    let s = i_eigenvalues(g, x)?;
    if s.min() <= 0.0 {
        return Err(Error::OutsideCone {
            min_eigenvalue: s.min(),
        });
    }
    let gx = evaluate_unchecked(g, x)?;
    if gx <= 0.0 {
        return Err(Error::OutsideCone {
            min_eigenvalue: s.min(),
        });
    }
    Ok(y.inner(x) - gx.ln())
}

/// `R = (N+1)! e^c / epsilon^{N+1} * sup_g`.
pub fn prelevel_radius_bound(c: f64, epsilon: f64, big_n: usize, sup_g: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange {
            what: "epsilon",
            value: epsilon.to_string(),
            allowed: "> 0".into(),
        });
    }
    let fact: f64 = (1..=big_n + 1).map(|i| i as f64).product();
    Ok(fact * c.exp() / epsilon.powi(big_n as i32 + 1) * sup_g)
}

/// Along the ray through a unit cone point `xi`, `psi(r xi) = a r - N log r - log g(xi)`
/// with `a = <y, xi>`. Returns the largest `r` with `psi <= c`, or `None`
/// when the ray misses the prelevel set.
fn ray_extent(a: f64, big_n: f64, log_g: f64, c: f64) -> Option<f64> {
    let psi = |r: f64| a * r - big_n * r.ln() - log_g;
    let r_star = big_n / a;
    if psi(r_star) > c {
        return None;
    }
    let (mut lo, mut hi) = (r_star, 2.0 * r_star);
    while psi(hi) <= c {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Some(hi)
}

/// Checks that every sampled `x` in `closure(Gamma) ∩ S` with `psi(x) <= c`
/// has `|x| <= R`.
///
/// `epsilon` and `sup g` are estimated from `calibration` unit cone
/// samples, the latter times [`SUP_SAFETY`]. Each of the `samples` rays
/// through an interior unit point contributes its farthest prelevel point
/// (found by bisection) plus one log-uniform point `r in [1e-3, 1e3]` when
/// it lies in the prelevel set. `worst_gap` is `min (R - |x|) / R`.
pub fn prelevel_check(
    g: &OperatorSpec,
    y: &SymmetricMatrix,
    c: f64,
    samples: usize,
    calibration: usize,
    seed: u64,
    exec: Exec,
) -> Result<CheckReport> {
    let sampler = ConeSampler::operator(g);
    let big_n = g.degree() as f64;
    let calib = map_indexed(exec, calibration, seed ^ 0x5eed, |_, rng| {
        let (x, _) = sampler.mixed(0.5, rng);
        (y.inner(&x), evaluate_unchecked(g, &x).unwrap_or(0.0))
    });
    let eps = calib.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let sup_g = SUP_SAFETY * calib.iter().map(|r| r.1).fold(0.0, f64::max);
    let radius = prelevel_radius_bound(c, eps, g.degree(), sup_g)?;

    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let xi = sampler.sample(false, rng);
        let a = y.inner(&xi);
        let gx = evaluate_unchecked(g, &xi).unwrap_or(0.0);
        let mut norms = Vec::with_capacity(2);
        if a > 0.0 && gx > 0.0 {
            let log_g = gx.ln();
            if let Some(r) = ray_extent(a, big_n, log_g, c) {
                norms.push(r);
            }
            let r: f64 = (rng.random_range(-3.0..3.0) * std::f64::consts::LN_10).exp();
            if a * r - big_n * r.ln() - log_g <= c {
                norms.push(r);
            }
        }
        (norms, xi)
    });
    let mut report = CheckReport::new(samples, seed);
    let mut accepted = 0usize;
    let mut max_norm = 0.0f64;
    for (norms, xi) in &rows {
        for &r in norms {
            accepted += 1;
            max_norm = max_norm.max(r);
            report.observe((radius - r) / radius, || Witness::matrix(&xi.scale_by(r)));
        }
    }
    report.set("radius_bound", radius);
    report.set("epsilon_hat", eps);
    report.set("sup_g_estimate", sup_g);
    report.set("sup_safety_multiplier", SUP_SAFETY);
    report.set("prelevel_points", accepted as f64);
    report.set("max_norm", max_norm);
    report.set("c", c);
    if accepted == 0 {
        report.worst_gap = f64::NAN;
    }
    Ok(report.finish(0.0))
}

/// Midpoint convexity `psi((a+b)/2) <= (psi(a) + psi(b))/2 + 1e-9` on
/// segments between interior cone points at radii in `[0.2, 5]`. Gaps are
/// relative to `1 + |rhs|`. `min_strict_gap` is taken over segments whose
/// direction leaves the edge, where the inequality is strict.
pub fn exhaustion_convexity_check(
    g: &OperatorSpec,
    y: &SymmetricMatrix,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<CheckReport> {
    g.domain().contains(y)?;
    let sampler = ConeSampler::operator(g);
    let span = match &sampler {
        ConeSampler::Operator { span, .. } => span.clone(),
        ConeSampler::Orthant(_) => None,
    };
    let psi = |x: &SymmetricMatrix| {
        evaluate_unchecked(g, x)
            .map(|v| y.inner(x) - v.ln())
            .unwrap_or(f64::NAN)
    };
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let a = sampler
            .sample(false, rng)
            .scale_by(rng.random_range(0.2..5.0));
        let b = sampler
            .sample(false, rng)
            .scale_by(rng.random_range(0.2..5.0));
        let mid = psi(&a.add(&b).scale_by(0.5));
        let rhs = 0.5 * (psi(&a) + psi(&b));
        let diff = a.sub(&b);
        let off_edge = match &span {
            Some(d) => {
                d.project_to_span(&diff).frobenius_norm() > 1e-6 * diff.frobenius_norm().max(1e-300)
            }
            None => diff.frobenius_norm() > 1e-9,
        };
        ((rhs - mid) / (1.0 + rhs.abs()), off_edge, a, b)
    });
    let mut report = CheckReport::new(samples, seed);
    let mut strict = f64::INFINITY;
    for (gap, off_edge, a, b) in &rows {
        if *off_edge {
            strict = strict.min(*gap);
        }
        report.observe(*gap, || {
            Witness::Vector([a.matrix().as_slice(), b.matrix().as_slice()].concat())
        });
    }
    report.set("min_strict_gap", strict);
    Ok(report.finish(1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Space;
    use approx::assert_relative_eq;

    #[test]
    fn values() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let id = f.identity();
        assert_relative_eq!(
            exhaustion_value(&f, &id, &id).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        let g = OperatorSpec::det(Space::real(1)).unwrap();
        let gamma = 2.5;
        let y = SymmetricMatrix::diag(&[gamma]);
        let at = |x: f64| exhaustion_value(&g, &y, &SymmetricMatrix::diag(&[x])).unwrap();
        let m = 1.0 / gamma;
        assert!(at(m) < at(m * 1.01) && at(m) < at(m * 0.99));
        assert!(exhaustion_value(&f, &id, &SymmetricMatrix::diag(&[1.0, -1.0, 1.0])).is_err());
    }

    #[test]
    fn radius_bound() {
        assert_relative_eq!(prelevel_radius_bound(0.0, 1.0, 1, 1.0).unwrap(), 2.0);
        assert!(
            prelevel_radius_bound(1.0, 1.0, 1, 1.0).unwrap()
                > prelevel_radius_bound(0.0, 1.0, 1, 1.0).unwrap()
        );
        assert!(prelevel_radius_bound(0.0, 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn one_dimensional_scan() {
        // g = x, y = 1, c = 0: x - log x >= 1 > 0, so the prelevel set is empty.
        let r = prelevel_radius_bound(0.0, 1.0, 1, 1.0).unwrap();
        for i in 1..2000 {
            let x = i as f64 * 0.01;
            if x - x.ln() <= 0.0 {
                assert!(x <= r);
            }
        }
        assert_eq!(ray_extent(1.0, 1.0, 0.0, 0.0), None);
        let top = ray_extent(1.0, 1.0, 0.0, 2.0).unwrap();
        assert!((top - top.ln() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn det_prelevel_and_convexity() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let r = prelevel_check(&f, &f.identity(), 5.0, 200, 200, 1, Exec::Parallel).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.residuals["prelevel_points"] > 100.0);
        let r = exhaustion_convexity_check(&f, &f.identity(), 100, 1, Exec::Parallel).unwrap();
        assert!(r.pass && r.residuals["min_strict_gap"] > 0.0, "{r:?}");
    }
}
