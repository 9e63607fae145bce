use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .take(self.n)
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    fn zip(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn frobenius_inner(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`, with its position.
    pub fn asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    /// LU factorization with partial pivoting, in place. Returns the pivot
    /// permutation and its sign, or `None` when a zero pivot appears.
    fn lu_in_place(&mut self) -> Option<(Vec<usize>, f64)> {
        let n = self.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, self[(r, col)].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    self.data.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
                sign = -sign;
            }
            let pivot = self[(col, col)];
            for r in (col + 1)..n {
                let factor = self[(r, col)] / pivot;
                self[(r, col)] = factor;
                if factor != 0.0 {
                    for j in (col + 1)..n {
                        self.data[r * n + j] -= factor * self.data[col * n + j];
                    }
                }
            }
        }
        Some((perm, sign))
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut lu = self.clone();
        match lu.lu_in_place() {
            None => 0.0,
            Some((_, sign)) => (0..self.n).fold(sign, |acc, i| acc * lu[(i, i)]),
        }
    }

    /// Solves `self * X = rhs` for a matrix right-hand side.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if rhs.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rhs.n,
            });
        }
        let mut lu = self.clone();
        let (perm, _) = lu.lu_in_place().ok_or(Error::Singular)?;
        let mut x = Matrix::zeros(n);
        for c in 0..n {
            let mut y: Vec<f64> = perm.iter().map(|&p| rhs[(p, c)]).collect();
            for i in 0..n {
                for k in 0..i {
                    y[i] -= lu[(i, k)] * y[k];
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    y[i] -= lu[(i, k)] * y[k];
                }
                y[i] /= lu[(i, i)];
            }
            for i in 0..n {
                x[(i, c)] = y[i];
            }
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| format!("{:>12.6}", self[(i, j)]))
                .collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Scalar field a symmetric matrix is read over.
///
/// Complex and quaternionic matrices are always stored as real matrices of
/// twice or four times the size that commute with the complex structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
    #[serde(rename = "H")]
    Quaternion,
}

impl Algebra {
    /// Real dimension of one scalar of the algebra.
    pub fn multiplicity(self) -> usize {
        match self {
            Algebra::Real => 1,
            Algebra::Complex => 2,
            Algebra::Quaternion => 4,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Algebra::Real => "R",
            Algebra::Complex => "C",
            Algebra::Quaternion => "H",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "R" => Some(Algebra::Real),
            "C" => Some(Algebra::Complex),
            "H" => Some(Algebra::Quaternion),
            _ => None,
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Real symmetric matrix tagged with the algebra it represents.
///
/// Entries are exactly symmetric: every constructor averages `a_ij` and
/// `a_ji`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: Matrix,
    algebra: Algebra,
}

impl SymmetricMatrix {
    pub fn new(m: Matrix, algebra: Algebra) -> Result<Self> {
        let mult = algebra.multiplicity();
        if !m.dim().is_multiple_of(mult) {
            return Err(Error::DimensionMismatch {
                expected: m.dim().div_ceil(mult) * mult,
                found: m.dim(),
            });
        }
        let n = m.dim();
        let sym = Matrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        Ok(SymmetricMatrix {
            inner: sym,
            algebra,
        })
    }

    pub fn real(m: Matrix) -> Self {
        Self::new(m, Algebra::Real).expect("real algebra accepts every dimension")
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::real(Matrix::from_rows(rows)?))
    }

    /// Builds from rows, rejecting asymmetry above `1e-12` relative.
    pub fn from_rows_strict(rows: &[Vec<f64>], algebra: Algebra) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        let (row, col, gap) = m.asymmetry();
        if gap > 1e-12 * m.max_abs().max(1e-300) {
            return Err(Error::NotSymmetric { row, col, gap });
        }
        Self::new(m, algebra)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::real(Matrix::diag(values))
    }

    pub fn identity(dim: usize, algebra: Algebra) -> Self {
        Self::new(Matrix::identity(dim), algebra).expect("identity dimension must match algebra")
    }

    pub fn zeros(dim: usize, algebra: Algebra) -> Self {
        Self::new(Matrix::zeros(dim), algebra).expect("zero dimension must match algebra")
    }

    pub fn with_algebra(self, algebra: Algebra) -> Result<Self> {
        Self::new(self.inner, algebra)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Number of eigenvalues over the algebra (dim / multiplicity).
    pub fn field_dim(&self) -> usize {
        self.dim() / self.algebra.multiplicity()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn inner(&self, other: &SymmetricMatrix) -> f64 {
        self.inner.frobenius_inner(&other.inner)
    }

    /// Tolerance scale `max(1, ||A||_F)`.
    pub fn scale(&self) -> f64 {
        self.frobenius_norm().max(1.0)
    }

    pub fn add(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: self.inner.add(&other.inner),
            algebra: self.algebra,
        }
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: self.inner.sub(&other.inner),
            algebra: self.algebra,
        }
    }

    pub fn scale_by(&self, s: f64) -> SymmetricMatrix {
        SymmetricMatrix {
            inner: self.inner.scale(s),
            algebra: self.algebra,
        }
    }

    /// `a * self + other`.
    pub fn axpy(&self, a: f64, other: &SymmetricMatrix) -> SymmetricMatrix {
        let n = self.dim();
        let inner = Matrix::from_fn(n, |i, j| a * self.inner[(i, j)] + other.inner[(i, j)]);
        SymmetricMatrix {
            inner,
            algebra: self.algebra,
        }
    }

    /// Adds `t` to the diagonal.
    pub fn shift(&self, t: f64) -> SymmetricMatrix {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)] += t;
        }
        SymmetricMatrix {
            inner,
            algebra: self.algebra,
        }
    }

    /// `Q A Q^T`.
    pub fn conjugate(&self, q: &Matrix) -> SymmetricMatrix {
        let inner = q.mul(&self.inner).mul(&q.transpose());
        SymmetricMatrix::new(inner, self.algebra).expect("conjugation preserves dimension")
    }

    pub fn det(&self) -> f64 {
        self.inner.det()
    }
}
