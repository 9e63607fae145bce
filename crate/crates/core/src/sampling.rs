//! Seeded random matrices for the harnesses.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::linalg::{eigenvalues_sym, ComplexStructures, Matrix, SymmetricMatrix};
use crate::operators::Domain;

/// Range the largest eigenvalue of a sampled positive matrix is drawn from
/// (log-uniformly).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ScaleRange {
    fn default() -> Self {
        ScaleRange { lo: 0.1, hi: 10.0 }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(dim, |_, _| StandardNormal.sample(rng))
}

/// Symmetric Gaussian matrix in `domain`, unit Frobenius norm.
pub fn random_direction<R: Rng + ?Sized>(domain: Domain, rng: &mut R) -> SymmetricMatrix {
    loop {
        let g = SymmetricMatrix::real(gaussian_matrix(domain.dim(), rng));
        let p = domain.project(&g).expect("dimension matches domain");
        let norm = p.frobenius_norm();
        if norm > 1e-12 {
            return p.scale_by(1.0 / norm);
        }
    }
}

/// Symmetric Gaussian matrix in `domain` with entries of unit variance.
pub fn random_symmetric<R: Rng + ?Sized>(domain: Domain, rng: &mut R) -> SymmetricMatrix {
    let g = SymmetricMatrix::real(gaussian_matrix(domain.dim(), rng));
    domain.project(&g).expect("dimension matches domain")
}

/// Positive definite `M^T M / dim + 1e-3 Id` in `domain`, rescaled so the
/// largest eigenvalue is log-uniform in `range`.
pub fn random_spd<R: Rng + ?Sized>(
    domain: Domain,
    range: ScaleRange,
    rng: &mut R,
) -> SymmetricMatrix {
    let d = domain.dim();
    let m = gaussian_matrix(d, rng);
    let a = SymmetricMatrix::real(m.transpose().mul(&m).scale(1.0 / d as f64)).shift(1e-3);
    let a = domain.project(&a).expect("dimension matches domain");
    let top = eigenvalues_sym(&a).map(|s| s.values[d - 1]).unwrap_or(1.0);
    let target = log_uniform(range, rng);
    a.scale_by(target / top)
}

fn log_uniform<R: Rng + ?Sized>(range: ScaleRange, rng: &mut R) -> f64 {
    if range.hi <= range.lo {
        return range.lo;
    }
    let u: f64 = Uniform::new(range.lo.ln(), range.hi.ln())
        .expect("valid range")
        .sample(rng);
    u.exp()
}

/// `t Id + S` on `R^{2n}` with `S` anticommuting with `J` and
/// `t > max |lambda(S)|`, so the sample is positive definite.
pub fn lagrangian_positive<R: Rng + ?Sized>(
    n: usize,
    range: ScaleRange,
    rng: &mut R,
) -> SymmetricMatrix {
    let d = 2 * n;
    let s = ComplexStructures::complex(n);
    let j = s.j();
    let g = SymmetricMatrix::real(gaussian_matrix(d, rng)).into_matrix();
    let skew = SymmetricMatrix::real(g.add(&j.mul(&g).mul(j)).scale(0.5));
    let vals = eigenvalues_sym(&skew).expect("jacobi converges").values;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let margin: f64 = rng.random_range(0.02..1.5);
    let t = top * (1.0 + margin) + 1e-3;
    let a = skew.shift(t);
    let target = log_uniform(range, rng);
    a.scale_by(target / (t + top))
}

/// Orthogonal matrix commuting with the domain's structures: Cayley
/// transform `(I - K)^{-1} (I + K)` of a structure-commuting skew `K`.
pub fn random_unitary<R: Rng + ?Sized>(domain: Domain, rng: &mut R) -> Matrix {
    let d = domain.dim();
    let g = gaussian_matrix(d, rng);
    let mut k = g.sub(&g.transpose()).scale(0.5);
    if let Some(s) = domain.structures() {
        k = s.project_matrix(&k);
    }
    let id = Matrix::identity(d);
    id.sub(&k)
        .solve(&id.add(&k))
        .expect("I - K is invertible for skew K")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Algebra;
    use crate::parallel::sample_rng;

    #[test]
    fn spd_samples_are_positive_and_projected() {
        let mut rng = sample_rng(3, 0);
        for domain in [
            Domain::Full(4),
            Domain::Hermitian(Algebra::Complex, 2),
            Domain::Hermitian(Algebra::Quaternion, 2),
        ] {
            for _ in 0..20 {
                let a = random_spd(domain, ScaleRange::default(), &mut rng);
                let v = eigenvalues_sym(&a).unwrap().values;
                assert!(v[0] > 0.0);
                assert!(v[v.len() - 1] <= 10.0 + 1e-9 && v[v.len() - 1] >= 0.1 - 1e-9);
                if let Some(s) = domain.structures() {
                    assert!(s.commutation_residual(a.matrix()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unitary_commutes_and_is_orthogonal() {
        let mut rng = sample_rng(5, 0);
        let domain = Domain::Hermitian(Algebra::Quaternion, 2);
        let q = random_unitary(domain, &mut rng);
        assert!(q.mul(&q.transpose()).sub(&Matrix::identity(8)).max_abs() < 1e-12);
        assert!(domain.structures().unwrap().commutation_residual(&q) < 1e-12);
    }

    #[test]
    fn lagrangian_samples_positive() {
        let mut rng = sample_rng(9, 0);
        for _ in 0..20 {
            let a = lagrangian_positive(3, ScaleRange::default(), &mut rng);
            assert!(eigenvalues_sym(&a).unwrap().values[0] > 0.0);
        }
    }
}
