use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::operators::eval::{
    chebyshev_leja, evaluate_unchecked, field_eigenvalues, lagrangian_data, restriction,
};
use crate::operators::{subsets, OpNode, OperatorSpec};
use crate::poly::{real_rooted_fit, real_roots, UnivariatePoly};

/// Garding eigenvalues `lambda^{F,A}(B)`: the reals with
/// `F(sA + B) = F(A) prod (s + lambda_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GardingSpectrum {
    /// Ascending, length `deg F`.
    pub values: Vec<f64>,
    /// Coefficient-wise relative gap between `s -> F(sA + B)` and
    /// `F(A) prod (s + lambda_j)`; small iff the restriction is real-rooted.
    pub hyperbolicity_residual: f64,
    /// Largest imaginary part among the companion-matrix roots, relative to
    /// the root scale.
    pub max_imag: f64,
    /// Eigenvalues set to zero because the matching low-order coefficients
    /// vanished.
    pub degree_drop: usize,
    /// `F(A)`.
    pub base_value: f64,
}

impl GardingSpectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn power_sum(&self, k: i32) -> f64 {
        self.values.iter().map(|v| v.powi(k)).sum()
    }
}

/// Low-order coefficients at or below this fraction of the largest are
/// treated as zero, each contributing a zero eigenvalue.
const DROP_THRESHOLD: f64 = 1e-10;

struct Pass {
    values: Vec<f64>,
    residual: f64,
    max_imag: f64,
    drop: usize,
    /// Mean of the eigenvalues and `sqrt(sum (lambda - mean)^2)`, from the
    /// top three coefficients. The latter bounds every `|lambda - mean|`.
    center: f64,
    radius: f64,
}

fn one_pass(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    fa: f64,
    rho: f64,
) -> Result<Pass> {
    let n = f.degree();
    // c_k are the coefficients of u -> F(B + rho u A) = F(A) rho^N prod (u + lambda_j / rho).
    let c = restriction(f, b, a, rho)?;
    let max = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sum = rho * c[n - 1] / c[n];
    let e2 = if n >= 2 {
        rho * rho * c[n - 2] / c[n]
    } else {
        0.0
    };
    let center = sum / n as f64;
    let radius = (sum * sum - 2.0 * e2 - n as f64 * center * center)
        .max(0.0)
        .sqrt();
    let drop = c
        .iter()
        .take_while(|x| x.abs() <= DROP_THRESHOLD * max)
        .count()
        .min(n);
    // Small low-order coefficients are genuine at high degree; keep
    // whichever reading factors better.
    let mut full = fit(&c, 0, n, fa, rho, max)?;
    if drop > 0 && full.residual > 1e-9 {
        let dropped = fit(&c, drop, n, fa, rho, max)?;
        if dropped.residual < full.residual {
            full = dropped;
        }
    }
    full.center = center;
    full.radius = radius;
    Ok(full)
}

fn fit(c: &[f64], drop: usize, n: usize, fa: f64, rho: f64, max: f64) -> Result<Pass> {
    let reduced = UnivariatePoly::raw(c[drop..].to_vec());
    let mut roots = if n > drop {
        real_rooted_fit(&reduced)?
    } else {
        Vec::new()
    };
    let max_imag = if n > drop {
        real_roots(&reduced).map(|r| r.1).unwrap_or(f64::INFINITY)
    } else {
        0.0
    };
    roots.resize(n - drop, 0.0);
    let mut values: Vec<f64> = roots.iter().map(|r| -r * rho).collect();
    values.extend(std::iter::repeat_n(0.0, drop));
    values.sort_by(f64::total_cmp);

    let scaled: Vec<f64> = values.iter().map(|v| -v / rho).collect();
    let rebuilt = UnivariatePoly::from_roots(fa * rho.powi(n as i32), &scaled);
    let residual = c
        .iter()
        .zip(rebuilt.coeffs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / max.max(f64::MIN_POSITIVE);
    Ok(Pass {
        values,
        residual,
        max_imag,
        drop,
        center: 0.0,
        radius: 0.0,
    })
}

/// Closed forms at a scalar base `A = c I`, with `mu` the field
/// eigenvalues of `B`: `lambda = mu / c` for the determinant and
/// `lambda_J = sum_{j in J} mu_j / (p c)` for the p-fold sum, and
/// `(n t +- l_1 +- ... +- l_n) / (n c)` for the Lagrangian operator with
/// `t`, `l_j` from [`lagrangian_data`]. The
/// coefficient route loses these to cancellation once the degree is large
/// and the roots cluster.
fn scalar_base_values(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
) -> Result<Option<Vec<f64>>> {
    let p = match f.node() {
        OpNode::Det | OpNode::LagrangianMA => 1,
        OpNode::PFoldSum(p) => *p,
        _ => return Ok(None),
    };
    let id = f.identity();
    let c = a.inner(&id) / id.inner(&id);
    if !(c > 0.0) || a.sub(&id.scale_by(c)).frobenius_norm() > 1e-14 * a.frobenius_norm() {
        return Ok(None);
    }
    if let OpNode::LagrangianMA = f.node() {
        let data = lagrangian_data(b)?;
        let n = data.lambdas.len() as f64;
        let mut values: Vec<f64> = (0u64..1 << data.lambdas.len())
            .map(|mask| {
                let v = data
                    .lambdas
                    .iter()
                    .enumerate()
                    .fold(data.mu(), |acc, (j, l)| {
                        if mask >> j & 1 == 1 {
                            acc - l
                        } else {
                            acc + l
                        }
                    });
                v / (n * c)
            })
            .collect();
        values.sort_by(f64::total_cmp);
        return Ok(Some(values));
    }
    let mu = field_eigenvalues(b, f.domain())?;
    let scale = 1.0 / (p as f64 * c);
    let mut values: Vec<f64> = subsets(mu.len(), p)
        .iter()
        .map(|j| j.iter().map(|&i| mu[i]).sum::<f64>() * scale)
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(Some(values))
}

/// `max |F(B + sA) - F(A) prod (s + lambda_j)| / max |F(B + sA)|` over
/// `deg F + 1` Chebyshev points of an interval holding every `-lambda_j`.
fn value_residual(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    fa: f64,
    values: &[f64],
) -> Result<f64> {
    let lo = values.first().copied().unwrap_or(0.0);
    let hi = values.last().copied().unwrap_or(0.0);
    let mid = -0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(1e-3 * (1.0 + mid.abs())) * 1.1;
    let mut top = 0.0f64;
    let mut err = 0.0f64;
    for u in chebyshev_leja(values.len() + 1) {
        let s = mid + half * u;
        let direct = evaluate_unchecked(f, &a.axpy(s, b))?;
        let product: f64 = fa * values.iter().map(|v| s + v).product::<f64>();
        top = top.max(direct.abs());
        err = err.max((direct - product).abs());
    }
    Ok(err / top.max(f64::MIN_POSITIVE))
}

/// Garding eigenvalues of `b` with respect to `a` for the operator `f`.
///
/// `s -> F(B + s A)` is interpolated at `deg F + 1` Chebyshev points of
/// `[-rho, rho]` and its roots found by [`real_rooted_fit`]; `rho` is first
/// guessed from the norms, and up to three further passes recentre the
/// interval on the eigenvalue mean. Determinant and p-fold sums at a scalar
/// base use closed forms instead, and products combine their factors.
pub fn garding_spectrum(
    f: &OperatorSpec,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
) -> Result<GardingSpectrum> {
    let domain = f.domain();
    domain.contains(a)?;
    domain.contains(b)?;
    let n = f.degree();
    let fa = evaluate_unchecked(f, a)?;
    let na = a.frobenius_norm();
    let id = f.identity();
    let ref_value = evaluate_unchecked(f, &id)?.abs() / id.frobenius_norm().powi(n as i32);
    if na == 0.0 || !fa.is_finite() || fa.abs() / na.powi(n as i32) <= 1e-12 * ref_value {
        return Err(Error::BaseOnZeroSet { value: fa });
    }
    let nb = b.frobenius_norm();
    if n == 0 {
        return Ok(GardingSpectrum {
            values: Vec::new(),
            hyperbolicity_residual: 0.0,
            max_imag: 0.0,
            degree_drop: 0,
            base_value: fa,
        });
    }
    if let Some(values) = scalar_base_values(f, a, b)? {
        let residual = value_residual(f, a, b, fa, &values)?;
        return Ok(GardingSpectrum {
            degree_drop: values.iter().filter(|v| **v == 0.0).count(),
            values,
            hyperbolicity_residual: residual,
            max_imag: 0.0,
            base_value: fa,
        });
    }
    // F = prod F_i gives F(sA + B) = prod F_i(sA + B): the spectrum is the
    // union of the factors' spectra, which avoids fitting the repeated
    // roots a product of equal factors produces.
    if let OpNode::Product(factors) = f.node() {
        let parts: Result<Vec<_>> = factors.iter().map(|g| garding_spectrum(g, a, b)).collect();
        if let Ok(parts) = parts {
            let mut values: Vec<f64> = parts
                .iter()
                .flat_map(|p| p.values.iter().copied())
                .collect();
            values.sort_by(f64::total_cmp);
            let residual = value_residual(f, a, b, fa, &values)?;
            return Ok(GardingSpectrum {
                hyperbolicity_residual: residual,
                max_imag: parts.iter().map(|p| p.max_imag).fold(0.0, f64::max),
                degree_drop: parts.iter().map(|p| p.degree_drop).sum(),
                values,
                base_value: fa,
            });
        }
    }
    let rho = if nb == 0.0 {
        1.0
    } else {
        nb * (domain.dim() as f64).sqrt() / na
    };
    let mut pass = one_pass(f, a, b, fa, rho)?;
    // Recentre on the eigenvalue mean with the interval sized by the
    // spread bound, so all roots lie in the interpolation interval.
    let (mut center, mut radius) = (pass.center, pass.radius);
    for _ in 0..3 {
        if pass.residual <= 1e-13 || !center.is_finite() || !radius.is_finite() {
            break;
        }
        let r = (1.05 * radius).max(1e-9 * (center.abs() + rho));
        let mut cand = one_pass(f, a, &a.axpy(-center, b), fa, r)?;
        for v in &mut cand.values {
            *v += center;
        }
        cand.drop = 0;
        (center, radius) = (center + cand.center, cand.radius);
        if cand.residual < pass.residual {
            pass = cand;
        } else {
            break;
        }
    }
    Ok(GardingSpectrum {
        values: pass.values,
        hyperbolicity_residual: pass.residual,
        max_imag: pass.max_imag,
        degree_drop: pass.drop,
        base_value: fa,
    })
}

/// Garding eigenvalues of `a` with respect to the identity.
pub fn i_eigenvalues(f: &OperatorSpec, a: &SymmetricMatrix) -> Result<GardingSpectrum> {
    garding_spectrum(f, &f.identity(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Algebra;
    use crate::operators::Space;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigma2_quadratic_formula() {
        let f = OperatorSpec::sigma(Space::real(3), 2).unwrap();
        let s = i_eigenvalues(&f, &SymmetricMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(s.values[0], 2.0 - r, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values[1], 2.0 + r, epsilon = 1e-12);
        assert!(s.hyperbolicity_residual < 1e-12);
    }

    #[test]
    fn det_gives_matrix_eigenvalues() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let b = SymmetricMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, -4.0],
        ])
        .unwrap();
        let s = i_eigenvalues(&f, &b).unwrap();
        for (got, want) in s.values.iter().zip([-4.0, 1.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-11);
        }
    }

    #[test]
    fn identity_direction_gives_ones() {
        let f = OperatorSpec::pfold(Space::quaternionic(2), 1).unwrap();
        let id = SymmetricMatrix::identity(8, Algebra::Quaternion);
        let s = i_eigenvalues(&f, &id).unwrap();
        assert!(
            s.values.iter().all(|v| (v - 1.0).abs() < 1e-12),
            "{:?}",
            s.values
        );
    }

    #[test]
    fn zero_eigenvalues_from_degree_drop() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let s = i_eigenvalues(&f, &SymmetricMatrix::diag(&[0.0, 0.0, 2.0])).unwrap();
        assert_eq!(s.degree_drop, 2);
        assert_eq!(s.values, vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn base_on_zero_set() {
        let f = OperatorSpec::det(Space::real(2)).unwrap();
        let a = SymmetricMatrix::diag(&[1.0, 0.0]);
        assert!(matches!(
            garding_spectrum(&f, &a, &SymmetricMatrix::diag(&[1.0, 1.0])),
            Err(Error::BaseOnZeroSet { .. })
        ));
    }
}
