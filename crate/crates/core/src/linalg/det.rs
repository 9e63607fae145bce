use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{series_qth_root, TruncatedSeries};

use super::matrix::{Algebra, Matrix, SymmetricMatrix};
use super::structures::ComplexStructures;

fn complex_det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
            .unwrap_or(col);
        let pivot = a[pivot_row * n + col];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / pivot;
            if factor.norm() != 0.0 {
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= factor * v;
                }
            }
        }
    }
    det
}

/// Coefficients `c_0..c_m` of `det(Id + tA)`.
///
/// The polynomial has degree `dim`; it is sampled at `dim + 1` points
/// `t = r w^j` on a circle of radius `r = 1 / max(1, ||A||_F)` (`w` a root
/// of unity) and the coefficients are recovered by a discrete Fourier
/// transform, which is exact for polynomials of that degree and well
/// conditioned on the circle.
pub fn char_series(a: &SymmetricMatrix, m: usize) -> Result<TruncatedSeries> {
    let d = a.dim();
    if m > d {
        return Err(Error::OutOfRange {
            what: "series order",
            value: m.to_string(),
            allowed: format!("0..={d}"),
        });
    }
    let r = 1.0 / a.frobenius_norm().max(1.0);
    let nodes = d + 1;
    let entries = a.matrix().as_slice();
    let values: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let t = Complex64::from_polar(r, 2.0 * PI * j as f64 / nodes as f64);
            let mut buf: Vec<Complex64> = entries.iter().map(|&x| t * x).collect();
            for i in 0..d {
                buf[i * d + i] += 1.0;
            }
            complex_det(buf, d)
        })
        .collect();
    let coeffs = (0..=m)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nodes as f64)
                })
                .sum();
            sum.re / nodes as f64 / r.powi(k as i32)
        })
        .collect();
    Ok(TruncatedSeries::new(coeffs))
}

/// Determinant over the matrix's algebra.
///
/// Real: LU. Complex and quaternionic: the degree-`n` coefficient of the
/// formal square or fourth root of `det(Id + tA)`; the matrix must already
/// commute with the structures.
pub fn det_field(a: &SymmetricMatrix) -> Result<f64> {
    match a.algebra() {
        Algebra::Real => Ok(a.det()),
        alg => {
            let s = ComplexStructures::for_algebra(alg, a.dim()).expect("non-real algebra");
            s.require_commuting(a)?;
            let n = a.field_dim();
            let series = char_series(a, a.dim())?;
            let root = series_qth_root(&series, alg.multiplicity())?;
            Ok(root.coeffs()[n])
        }
    }
}

/// Lower-triangular `L` with `L L^T = A`.
pub fn cholesky(a: &SymmetricMatrix) -> Result<Matrix> {
    let n = a.dim();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn char_series_of_diag() {
        let s = char_series(&SymmetricMatrix::diag(&[1.0, 2.0]), 2).unwrap();
        let c = s.coeffs();
        assert_relative_eq!(c[0], 1.0, epsilon = 1e-13);
        assert_relative_eq!(c[1], 3.0, epsilon = 1e-13);
        assert_relative_eq!(c[2], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn char_series_identity_is_binomial() {
        let s = char_series(&SymmetricMatrix::identity(5, Algebra::Real), 5).unwrap();
        for (got, want) in s.coeffs().iter().zip([1.0, 5.0, 10.0, 10.0, 5.0, 1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn real_det() {
        assert_relative_eq!(
            det_field(&SymmetricMatrix::diag(&[1.0, 2.0, 3.0])).unwrap(),
            6.0
        );
    }

    #[test]
    fn quaternion_block_scalar() {
        let (a, b) = (1.7, 0.3);
        let m = SymmetricMatrix::diag(&[a, a, a, a, b, b, b, b])
            .with_algebra(Algebra::Quaternion)
            .unwrap();
        assert_relative_eq!(det_field(&m).unwrap(), a * b, epsilon = 1e-12);
        let id = SymmetricMatrix::identity(8, Algebra::Quaternion);
        assert_relative_eq!(det_field(&id).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_commuting_rejected() {
        let m = SymmetricMatrix::diag(&[1.0, 2.0])
            .with_algebra(Algebra::Complex)
            .unwrap();
        assert!(matches!(
            det_field(&m),
            Err(Error::StructureViolation { .. })
        ));
    }

    #[test]
    fn cholesky_examples() {
        let a = SymmetricMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        assert_eq!(l.rows(), vec![vec![2.0, 0.0], vec![1.0, 2.0]]);
        let l = cholesky(&SymmetricMatrix::diag(&[4.0, 9.0])).unwrap();
        assert_eq!(l, Matrix::diag(&[2.0, 3.0]));
        assert!(matches!(
            cholesky(&SymmetricMatrix::diag(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite { row: 1, .. })
        ));
    }
}
