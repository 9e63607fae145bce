use crate::cones::ConeSampler;
use crate::error::{Error, Result};
use crate::fd::centered_derivative;
use crate::linalg::SymmetricMatrix;
use crate::majorize::positive_sample;
use crate::operators::eval::{directional_radius, evaluate_unchecked, restriction};
use crate::operators::OperatorSpec;
use crate::parallel::{map_indexed, Exec};
use crate::poly::elementary_symmetric_all;
use crate::report::{CheckReport, Witness};
use crate::sampling::{random_direction, ScaleRange};

use super::spectrum::{garding_spectrum, i_eigenvalues, GardingSpectrum};

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Fails with [`Error::OutsideCone`] unless `A` is interior.
pub fn require_in_cone(f: &OperatorSpec, a: &SymmetricMatrix) -> Result<()> {
    let s = i_eigenvalues(f, a)?;
    let tol = 1e-9 * (1.0 + a.frobenius_norm());
    if s.min() <= tol {
        return Err(Error::OutsideCone {
            min_eigenvalue: s.min(),
        });
    }
    Ok(())
}

/// `D_A^k log F (B, .., B) = (-1)^{k-1} (k-1)! sum_j lambda_j^{F,A}(B)^k`.
pub fn log_derivative(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "k",
            value: "0".into(),
            allowed: ">= 1".into(),
        });
    }
    require_in_cone(f, a)?;
    let s = garding_spectrum(f, a, b)?;
    Ok(log_derivative_from(&s, k))
}

pub fn log_derivative_from(s: &GardingSpectrum, k: usize) -> f64 {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * factorial(k - 1) * s.power_sum(k as i32)
}

/// Step for the finite-difference oracles: a fixed fraction of the
/// distance `1 / max|lambda|` to the nearest singularity of
/// `t -> log F(A + tB)`.
pub fn fd_step(s: &GardingSpectrum) -> f64 {
    let top = s.max_abs();
    if top == 0.0 {
        0.02
    } else {
        0.02 / top
    }
}

/// Centered finite-difference value of `d^k/dt^k log F(A + tB)` at 0.
pub fn log_derivative_fd(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    k: usize,
    h: f64,
) -> f64 {
    centered_derivative(
        |t| {
            evaluate_unchecked(f, &b.axpy(t, a))
                .map(f64::ln)
                .unwrap_or(f64::NAN)
        },
        k,
        h,
    )
}

/// Gradient of `F` at `A` in the domain: `sum_i (d/dt F(A + t B_i)) B_i`
/// over an orthonormal basis, each derivative read off the interpolated
/// restriction.
pub fn gradient_matrix(f: &OperatorSpec, a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let domain = f.domain();
    domain.contains(a)?;
    let mut g = a.scale_by(0.0);
    for b in domain.basis() {
        let rho = directional_radius(a, &b);
        let c = restriction(f, a, &b, rho)?;
        g = b.axpy(c[1] / rho, &g);
    }
    Ok(g)
}

/// Guler's estimate `|sum lambda^k|^{1/k} <= (sum lambda^l)^{1/l}` for even
/// `l <= k`, read in terms of the normalized derivatives of `log F`.
///
/// `worst_gap` is `rhs - lhs`, relative to `max(1, rhs)`. The residual
/// `equality_gap` is `|rhs - lhs|` and `equality_expected` is 1 when at most
/// one eigenvalue is nonzero.
pub fn guler_check(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    k: usize,
    l: usize,
) -> Result<CheckReport> {
    if l == 0 || l % 2 == 1 || l > k {
        return Err(Error::precondition(format!(
            "need even l <= k, got k = {k}, l = {l}"
        )));
    }
    require_in_cone(f, a)?;
    let s = garding_spectrum(f, a, b)?;
    let lhs = (log_derivative_from(&s, k) / factorial(k - 1))
        .abs()
        .powf(1.0 / k as f64);
    let rhs = (log_derivative_from(&s, l) / factorial(l - 1))
        .abs()
        .powf(1.0 / l as f64);
    let top = s.max_abs();
    let nonzero = s
        .values
        .iter()
        .filter(|v| v.abs() > 1e-9 * top.max(f64::MIN_POSITIVE))
        .count();
    let mut report = CheckReport::new(1, 0);
    report.observe((rhs - lhs) / rhs.max(1.0), || {
        Witness::Vector(s.values.clone())
    });
    report.set("lhs", lhs);
    report.set("rhs", rhs);
    report.set("nonzero_eigenvalues", nonzero as f64);
    report.set("equality_expected", if nonzero <= 1 { 1.0 } else { 0.0 });
    report.set("equality_gap", (rhs - lhs).abs());
    Ok(report.finish(1e-9))
}

/// Checks, along `B` at `A`, the second-derivative identities
/// `D^2 log F = -|lambda|^2`, `D^2 F = 2 F(A) sigma_2(lambda)` and
/// `D^2 F^{1/N} = -F(A)^{1/N} Discr(lambda) / N^2` against centered finite
/// differences. `worst_gap` is minus the largest relative error; pass needs
/// it above `-1e-4`.
pub fn discriminant_identity_check(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
) -> Result<CheckReport> {
    require_in_cone(f, a)?;
    let s = garding_spectrum(f, a, b)?;
    let n = f.degree() as f64;
    let fa = s.base_value;
    let lam = &s.values;
    let sq: f64 = s.power_sum(2);
    let sum: f64 = lam.iter().sum();
    let abs_sum: f64 = lam.iter().map(|v| v.abs()).sum();
    let discr: f64 = lam
        .iter()
        .enumerate()
        .flat_map(|(i, x)| lam[i + 1..].iter().map(move |y| (x - y).powi(2)))
        .sum();
    let h = fd_step(&s);
    let eval = |t: f64| evaluate_unchecked(f, &b.axpy(t, a)).unwrap_or(f64::NAN);

    let d2_log = centered_derivative(|t| eval(t).ln(), 2, h);
    let d2_f = centered_derivative(eval, 2, h);
    let d2_root = centered_derivative(|t| eval(t).powf(1.0 / n), 2, h);

    let want_log = -sq;
    let sigma2 = elementary_symmetric_all(lam).get(2).copied().unwrap_or(0.0);
    let want_f = 2.0 * fa * sigma2;
    let want_root = -fa.powf(1.0 / n) * discr / (n * n);
    debug_assert!((sum * sum - sq - sigma2 * 2.0).abs() <= 1e-8 * (1.0 + sum * sum));

    let rel = |got: f64, want: f64, floor: f64| {
        (got - want).abs() / want.abs().max(floor).max(f64::MIN_POSITIVE)
    };
    let e_log = rel(d2_log, want_log, sq.max(1e-12));
    let e_f = rel(d2_f, want_f, fa.abs() * abs_sum * abs_sum);
    let e_root = rel(d2_root, want_root, fa.abs().powf(1.0 / n) * sq / n);

    let mut report = CheckReport::new(1, 0);
    let worst = e_log.max(e_f).max(e_root);
    report.observe(-worst, || Witness::Vector(lam.clone()));
    report.set("discriminant", discr);
    report.set("d2_log_fd", d2_log);
    report.set("d2_log_formula", want_log);
    report.set("d2_f_fd", d2_f);
    report.set("d2_f_formula", want_f);
    report.set("d2_root_fd", d2_root);
    report.set("d2_root_formula", want_root);
    report.set("rel_err_log", e_log);
    report.set("rel_err_f", e_f);
    report.set("rel_err_root", e_root);
    report.set("step", h);
    Ok(report.finish(1e-4))
}

/// Seeded sweep over pairs `(A, B)` with `A` a positive sample and `B` a
/// unit direction. Per pair it takes the largest relative error of orders
/// `1..=order` against finite differences (floored at
/// `(k-1)! sum |lambda|^k`), the Guler slack at `(order, l)` and the
/// discriminant-identity error. The sample gap is the smallest of
/// `1e-4 - fd_error`, `guler_gap + 1e-9` and `1e-4 - discriminant_error`.
pub fn barrier_harness(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    order: usize,
    l: usize,
    exec: Exec,
) -> Result<CheckReport> {
    if order == 0 || l == 0 || l % 2 == 1 || l > order {
        return Err(Error::precondition(format!(
            "need order >= 1 and even l <= order, got order = {order}, l = {l}"
        )));
    }
    let domain = f.domain();
    let sampler = ConeSampler::operator(f);
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let mut a = positive_sample(f, ScaleRange::default(), rng);
        if require_in_cone(f, &a).is_err() {
            a = sampler.sample(false, rng);
        }
        let b = random_direction(domain, rng);
        let pair = || -> Result<(f64, f64, f64)> {
            let s = garding_spectrum(f, &a, &b)?;
            let h = fd_step(&s);
            let mut fd_err = 0.0f64;
            for k in 1..=order {
                let exact = log_derivative_from(&s, k);
                let fd = log_derivative_fd(f, &a, &b, k, h);
                let floor =
                    factorial(k - 1) * s.values.iter().map(|v| v.abs().powi(k as i32)).sum::<f64>();
                fd_err =
                    fd_err.max((fd - exact).abs() / exact.abs().max(floor).max(f64::MIN_POSITIVE));
            }
            let guler = guler_check(f, &a, &b, order, l)?.worst_gap;
            let disc = -discriminant_identity_check(f, &a, &b)?.worst_gap;
            Ok((fd_err, guler, disc))
        };
        let (fd_err, guler, disc) = pair().unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        (fd_err, guler, disc, a, b)
    });
    let mut report = CheckReport::new(samples, seed);
    let (mut max_fd, mut min_guler, mut max_disc) = (0.0f64, f64::INFINITY, 0.0f64);
    for (fd_err, guler, disc, a, b) in &rows {
        max_fd = max_fd.max(*fd_err);
        min_guler = min_guler.min(*guler);
        max_disc = max_disc.max(*disc);
        let gap = (1e-4 - fd_err).min(guler + 1e-9).min(1e-4 - disc);
        let gap = if gap.is_nan() { f64::NEG_INFINITY } else { gap };
        report.observe(gap, || {
            Witness::Vector([a.matrix().as_slice(), b.matrix().as_slice()].concat())
        });
    }
    report.set("max_fd_relative_error", max_fd);
    report.set("min_guler_gap", min_guler);
    report.set("max_discriminant_error", max_disc);
    report.set("order", order as f64);
    report.set("l", l as f64);
    Ok(report.finish(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_sym;
    use crate::operators::Space;
    use crate::poly::SparseSymPoly;
    use approx::assert_relative_eq;

    #[test]
    fn first_derivative_of_log_det_is_trace() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let b = SymmetricMatrix::from_rows(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, -2.0, 0.3],
            vec![0.0, 0.3, 0.7],
        ])
        .unwrap();
        assert_relative_eq!(
            log_derivative(&f, &f.identity(), &b, 1).unwrap(),
            b.trace(),
            epsilon = 1e-12
        );
        assert!(log_derivative(&f, &f.identity(), &b, 2).unwrap() < 0.0);
    }

    #[test]
    fn third_derivative_sigma2() {
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        let b = SymmetricMatrix::diag(&[1.0, 2.0, 3.0]);
        let r = 1.0 / 3f64.sqrt();
        let want = 2.0 * ((2.0 - r).powi(3) + (2.0 + r).powi(3));
        assert_relative_eq!(
            log_derivative(&f, &f.identity(), &b, 3).unwrap(),
            want,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gradients() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let g = gradient_matrix(&f, &f.identity()).unwrap();
        assert!(g.sub(&f.identity()).frobenius_norm() < 1e-10);
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        let g = gradient_matrix(&f, &f.identity()).unwrap();
        assert!(g.sub(&f.identity().scale_by(2.0)).frobenius_norm() < 1e-10);
        let p = SparseSymPoly::monomial(vec![1, 1, 1], 1.0).unwrap();
        let f = OperatorSpec::diagonal_padded(&p, 4).unwrap();
        let g = gradient_matrix(&f, &f.identity()).unwrap();
        assert!(eigenvalues_sym(&g).unwrap().values[0].abs() < 1e-10);
    }

    #[test]
    fn discriminant_hand_value() {
        let f = OperatorSpec::det(Space::real(2)).unwrap();
        let r =
            discriminant_identity_check(&f, &f.identity(), &SymmetricMatrix::diag(&[1.0, -1.0]))
                .unwrap();
        assert!(r.pass, "{r:?}");
        assert_relative_eq!(r.residuals["d2_root_formula"], -1.0, epsilon = 1e-12);
        assert_relative_eq!(r.residuals["d2_root_fd"], -1.0, max_relative = 1e-6);
    }

    #[test]
    fn guler_axis_equality() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let r = guler_check(
            &f,
            &f.identity(),
            &SymmetricMatrix::diag(&[0.0, 0.0, 1.7]),
            5,
            2,
        )
        .unwrap();
        assert!(r.pass);
        assert_eq!(r.residuals["equality_expected"], 1.0);
        assert!(r.residuals["equality_gap"] < 1e-9);
    }
}
