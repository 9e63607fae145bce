use crate::error::{Error, Result};

use super::matrix::{Matrix, SymmetricMatrix};

const MAX_SWEEPS: usize = 100;

/// Sorted real spectrum of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Off-diagonal Frobenius mass left at convergence.
    pub residual: f64,
}

/// Spectrum together with orthonormal eigenvectors.
///
/// Column `j` of `vectors` belongs to `values[j]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.vectors.dim())
            .map(|i| self.vectors[(i, j)])
            .collect()
    }
}

fn off_diagonal(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi with threshold sweeps.
///
/// Converges when the off-diagonal mass drops below `1e-12 * ||A||_F`
/// (absolute `1e-12` for the zero matrix).
pub fn jacobi(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = Matrix::identity(n);
    let norm = m.frobenius_norm();
    let tol = if norm > 0.0 { 1e-12 * norm } else { 1e-12 };

    let mut sweeps = 0;
    let mut off = off_diagonal(&m);
    while off > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        // Early sweeps skip small entries so large ones are annihilated first.
        let threshold = if sweeps < 4 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        values,
        vectors,
        residual: off,
    })
}

/// Eigenvalues of `a` sorted ascending.
pub fn eigenvalues_sym(a: &SymmetricMatrix) -> Result<Spectrum> {
    let d = jacobi(a)?;
    Ok(Spectrum {
        values: d.values,
        residual: d.residual,
    })
}
