use crate::error::{Error, Result};
use crate::garding::garding_spectrum;
use crate::linalg::{det_field, eigenvalues_sym, Algebra, ComplexStructures, SymmetricMatrix};
use crate::poly::{elementary_symmetric, interpolate_univariate};

use super::{subsets, Domain, OpNode, OperatorSpec};

/// Trace and skew-Hermitian eigenvalue data of a `2n x 2n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianEigData {
    /// `tr A / 2n`.
    pub t: f64,
    /// Nonnegative skew-part eigenvalues, descending.
    pub lambdas: Vec<f64>,
    pub eps_plus: Vec<f64>,
    pub eps_minus: Vec<f64>,
}

impl LagrangianEigData {
    pub fn mu(&self) -> f64 {
        self.lambdas.len() as f64 * self.t
    }

    /// `prod over sign vectors of (mu +- lambda_1 +- ... +- lambda_n)`.
    pub fn operator_value(&self) -> f64 {
        let n = self.lambdas.len();
        let mu = self.mu();
        (0u64..1 << n)
            .map(|mask| {
                self.lambdas.iter().enumerate().fold(mu, |acc, (j, l)| {
                    if mask >> j & 1 == 1 {
                        acc - l
                    } else {
                        acc + l
                    }
                })
            })
            .product()
    }
}

/// Splits `A` into `t Id + (Hermitian traceless) + S` with `S = (A + JAJ)/2`
/// anticommuting with `J`; the spectrum of `S` is `+-lambda_j`.
pub fn lagrangian_data(a: &SymmetricMatrix) -> Result<LagrangianEigData> {
    let d = a.dim();
    if !d.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: d,
        });
    }
    let n = d / 2;
    let s = ComplexStructures::complex(n);
    let j = s.j();
    let m = a.matrix();
    let skew = m.add(&j.mul(m).mul(j)).scale(0.5);
    let skew = SymmetricMatrix::real(skew);
    let mut vals = eigenvalues_sym(&skew)?.values;
    vals.reverse();
    let lambdas: Vec<f64> = vals[..n].iter().map(|v| v.max(0.0)).collect();
    let t = a.trace() / d as f64;
    Ok(LagrangianEigData {
        t,
        eps_plus: lambdas.iter().map(|l| t + l).collect(),
        eps_minus: lambdas.iter().map(|l| t - l).collect(),
        lambdas,
    })
}

/// Eigenvalues over the domain's algebra, each listed once: real
/// eigenvalues grouped in runs of the multiplicity.
pub fn field_eigenvalues(a: &SymmetricMatrix, domain: Domain) -> Result<Vec<f64>> {
    let vals = eigenvalues_sym(a)?.values;
    let m = domain.multiplicity();
    if m == 1 {
        return Ok(vals);
    }
    let tol = 1e-7 * a.scale();
    let mut out = Vec::with_capacity(vals.len() / m);
    for chunk in vals.chunks(m) {
        let spread = chunk[chunk.len() - 1] - chunk[0];
        if chunk.len() != m || spread > tol {
            return Err(Error::Multiplicity {
                multiplicity: m,
                spread,
            });
        }
        out.push(chunk.iter().sum::<f64>() / m as f64);
    }
    Ok(out)
}

fn pfold_value(lambda: &[f64], p: usize) -> f64 {
    subsets(lambda.len(), p)
        .iter()
        .map(|j| j.iter().map(|&i| lambda[i]).sum::<f64>())
        .product()
}

fn ascending(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(eigenvalues_sym(a)?.values)
}

pub(crate) fn evaluate_unchecked(spec: &OperatorSpec, a: &SymmetricMatrix) -> Result<f64> {
    let domain = spec.domain();
    match spec.node() {
        OpNode::Sigma(k) => elementary_symmetric(&field_eigenvalues(a, domain)?, *k),
        OpNode::Det => match domain.algebra() {
            Algebra::Real => Ok(a.det()),
            _ => Ok(field_eigenvalues(a, domain)?.iter().product()),
        },
        OpNode::PFoldSum(p) => Ok(pfold_value(&field_eigenvalues(a, domain)?, *p)),
        OpNode::LagrangianMA => Ok(lagrangian_data(a)?.operator_value()),
        OpNode::SymPolyOfEigs(p) => Ok(p.eval_unchecked(&field_eigenvalues(a, domain)?)),
        OpNode::DiagonalPoly(p) => Ok(p.eval_unchecked(&a.diagonal())),
        OpNode::OrderedEigPoly(p) => Ok(p.eval_unchecked(&ascending(a)?)),
        OpNode::ConvexCombo { combined, .. } | OpNode::TensorProduct { combined, .. } => {
            Ok(combined.eval_unchecked(&ascending(a)?))
        }
        OpNode::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= evaluate_unchecked(f, a)?;
            }
            Ok(acc)
        }
        OpNode::DirectionalDeriv {
            inner,
            direction,
            order,
        } => {
            let rho = directional_radius(a, direction);
            let c = restriction(inner, a, direction, rho)?;
            let k = *order;
            let factorial: f64 = (1..=k).map(|i| i as f64).product();
            Ok(c.get(k).copied().unwrap_or(0.0) * factorial / rho.powi(k as i32))
        }
        OpNode::Compose { outer, inner } => {
            let spectrum = garding_spectrum(inner, &inner.identity(), a)?;
            if spectrum.hyperbolicity_residual > 1e-6 {
                return Err(Error::precondition(format!(
                    "inner restriction is not real-rooted (residual {:e})",
                    spectrum.hyperbolicity_residual
                )));
            }
            Ok(outer.eval_unchecked(&spectrum.values))
        }
    }
}

/// Natural scale `||A|| / ||P||` for expanding `t -> F(A + tP)`.
pub(crate) fn directional_radius(a: &SymmetricMatrix, p: &SymmetricMatrix) -> f64 {
    let np = p.frobenius_norm();
    if np == 0.0 {
        return 1.0;
    }
    let na = a.frobenius_norm();
    if na == 0.0 {
        1.0 / np
    } else {
        na / np
    }
}

/// Chebyshev points of the first kind on `[-1, 1]`, Leja-ordered.
pub(crate) fn chebyshev_leja(count: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..count)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / count as f64).cos())
        .collect();
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let first = (0..count)
        .max_by(|&i, &j| pts[i].abs().total_cmp(&pts[j].abs()))
        .unwrap();
    out.push(pts.swap_remove(first));
    while !pts.is_empty() {
        let best = (0..pts.len())
            .max_by(|&i, &j| {
                let pi: f64 = out.iter().map(|x| (pts[i] - x).abs().ln()).sum();
                let pj: f64 = out.iter().map(|x| (pts[j] - x).abs().ln()).sum();
                pi.total_cmp(&pj)
            })
            .unwrap();
        out.push(pts.swap_remove(best));
    }
    out
}

/// Ascending coefficients of `u -> F(base + rho u dir)`, interpolated at
/// `deg F + 1` Chebyshev points in `u`.
pub(crate) fn restriction(
    spec: &OperatorSpec,
    base: &SymmetricMatrix,
    dir: &SymmetricMatrix,
    rho: f64,
) -> Result<Vec<f64>> {
    let nodes = chebyshev_leja(spec.degree() + 1);
    let mut values = Vec::with_capacity(nodes.len());
    for &u in &nodes {
        let m = dir.axpy(rho * u, base);
        values.push(evaluate_unchecked(spec, &m)?);
    }
    let poly = interpolate_univariate(&nodes, &values)?;
    let mut c = poly.coeffs().to_vec();
    c.resize(spec.degree() + 1, 0.0);
    Ok(c)
}

/// `(1/k!) delta_I^k F(A)`, computed from the interpolated restriction
/// `t -> F(tI + A)` and cross-checked against `F(I) sigma_{N-k}(lambda^F(A))`.
pub fn delta_i_elementary(spec: &OperatorSpec, a: &SymmetricMatrix, k: usize) -> Result<f64> {
    let n = spec.degree();
    if k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k.to_string(),
            allowed: format!("0..={n}"),
        });
    }
    spec.domain().contains(a)?;
    let id = spec.identity();
    let rho = directional_radius(a, &id);
    let c = restriction(spec, a, &id, rho)?;
    let direct = c[k] / rho.powi(k as i32);
    let spectrum = garding_spectrum(spec, &id, a)?;
    let f_id = evaluate_unchecked(spec, &id)?;
    let via_spectrum = f_id * elementary_symmetric(&spectrum.values, n - k)?;
    let scale = direct.abs().max(via_spectrum.abs()).max(f_id.abs() * 1e-3);
    if (direct - via_spectrum).abs() > 1e-7 * scale {
        return Err(Error::RouteMismatch {
            first: direct,
            second: via_spectrum,
        });
    }
    Ok(direct)
}

/// `det` over the domain's algebra, used by the majorization gaps.
pub(crate) fn domain_det(a: &SymmetricMatrix, domain: Domain) -> Result<f64> {
    match domain {
        Domain::Full(_) => Ok(a.det()),
        Domain::Hermitian(alg, _) => {
            let tagged = a.clone().with_algebra(alg)?;
            det_field(&tagged)
        }
    }
}
