use crate::error::{Error, Result};

use super::matrix::{Algebra, Matrix, SymmetricMatrix};

// Left multiplication by i, j, k on a quaternion with components (1, i, j, k).
const L_I: [[f64; 4]; 4] = [
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
];
const L_J: [[f64; 4]; 4] = [
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];
const L_K: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
];
const J2: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

fn block_diagonal<const B: usize>(block: &[[f64; B]; B], copies: usize) -> Matrix {
    let mut m = Matrix::zeros(B * copies);
    for c in 0..copies {
        for i in 0..B {
            for j in 0..B {
                m[(c * B + i, c * B + j)] = block[i][j];
            }
        }
    }
    m
}

/// Orthogonal complex structures on `R^{2n}` or `R^{4n}`.
///
/// Coordinates group each scalar's real components contiguously. For the
/// quaternionic case `I^2 = J^2 = K^2 = -Id` and `IJ = K`; for the complex
/// case only `J` is present.
#[derive(Clone, Debug)]
pub struct ComplexStructures {
    algebra: Algebra,
    n: usize,
    mats: Vec<Matrix>,
}

impl ComplexStructures {
    pub fn complex(n: usize) -> Self {
        let s = ComplexStructures {
            algebra: Algebra::Complex,
            n,
            mats: vec![block_diagonal(&J2, n)],
        };
        s.verify();
        s
    }

    pub fn quaternionic(n: usize) -> Self {
        let s = ComplexStructures {
            algebra: Algebra::Quaternion,
            n,
            mats: vec![
                block_diagonal(&L_I, n),
                block_diagonal(&L_J, n),
                block_diagonal(&L_K, n),
            ],
        };
        s.verify();
        s
    }

    /// Structures for `algebra` acting on real dimension `dim`; `None` for the
    /// real algebra.
    pub fn for_algebra(algebra: Algebra, dim: usize) -> Option<Self> {
        match algebra {
            Algebra::Real => None,
            Algebra::Complex => Some(Self::complex(dim / 2)),
            Algebra::Quaternion => Some(Self::quaternionic(dim / 4)),
        }
    }

    fn verify(&self) {
        let id = Matrix::identity(self.dim());
        let minus_id = id.scale(-1.0);
        for m in &self.mats {
            assert!(
                m.mul(m).sub(&minus_id).max_abs() < 1e-15,
                "structure does not square to -Id"
            );
            assert!(
                m.mul(&m.transpose()).sub(&id).max_abs() < 1e-15,
                "structure not orthogonal"
            );
        }
        if self.mats.len() == 3 {
            let (i, j, k) = (&self.mats[0], &self.mats[1], &self.mats[2]);
            assert!(i.mul(j).sub(k).max_abs() < 1e-15, "IJ != K");
            assert!(j.mul(k).sub(i).max_abs() < 1e-15, "JK != I");
            assert!(k.mul(i).sub(j).max_abs() < 1e-15, "KI != J");
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    /// Number of scalars of the algebra.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.algebra.multiplicity()
    }

    /// `[J]` or `[I, J, K]`.
    pub fn matrices(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn j(&self) -> &Matrix {
        match self.algebra {
            Algebra::Complex => &self.mats[0],
            _ => &self.mats[1],
        }
    }

    /// Largest `||AS - SA||_F` over the structures.
    pub fn commutation_residual(&self, a: &Matrix) -> f64 {
        self.mats
            .iter()
            .map(|s| a.mul(s).sub(&s.mul(a)).frobenius_norm())
            .fold(0.0, f64::max)
    }

    /// `(A - sum S A S) / (1 + #S)`, the orthogonal projection onto matrices
    /// commuting with every structure.
    pub fn project_matrix(&self, a: &Matrix) -> Matrix {
        let mut acc = a.clone();
        for s in &self.mats {
            acc = acc.sub(&s.mul(a).mul(s));
        }
        acc.scale(1.0 / (1 + self.mats.len()) as f64)
    }

    pub fn project(&self, a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        SymmetricMatrix::new(self.project_matrix(a.matrix()), self.algebra)
    }

    /// Rejects matrices that fail to commute beyond `1e-9 * scale`.
    pub fn require_commuting(&self, a: &SymmetricMatrix) -> Result<()> {
        let residual = self.commutation_residual(a.matrix());
        if residual > 1e-9 * a.scale() {
            return Err(Error::StructureViolation {
                algebra: self.algebra.tag(),
                residual,
            });
        }
        Ok(())
    }
}

/// `A_C = (A - JAJ) / 2`.
pub fn project_complex(a: &SymmetricMatrix, s: &ComplexStructures) -> Result<SymmetricMatrix> {
    if s.algebra() != Algebra::Complex {
        return Err(Error::precondition(
            "project_complex needs complex structures",
        ));
    }
    s.project(a)
}

/// `A_H = (A - IAI - JAJ - KAK) / 4`.
pub fn project_quaternionic(a: &SymmetricMatrix, s: &ComplexStructures) -> Result<SymmetricMatrix> {
    if s.algebra() != Algebra::Quaternion {
        return Err(Error::precondition(
            "project_quaternionic needs quaternionic structures",
        ));
    }
    s.project(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues_sym;

    fn pseudo_random(dim: usize, seed: u64) -> SymmetricMatrix {
        let mut x = seed;
        let m = Matrix::from_fn(dim, |_, _| {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        SymmetricMatrix::real(m)
    }

    #[test]
    fn identity_is_fixed() {
        let s = ComplexStructures::quaternionic(2);
        let id = SymmetricMatrix::identity(8, Algebra::Real);
        let p = project_quaternionic(&id, &s).unwrap();
        assert!(p.sub(&id).frobenius_norm() < 1e-15);
    }

    #[test]
    fn complex_projection_pairs_eigenvalues() {
        let s = ComplexStructures::complex(2);
        let p = project_complex(&pseudo_random(4, 3), &s).unwrap();
        assert!(s.commutation_residual(p.matrix()) < 1e-12);
        let v = eigenvalues_sym(&p).unwrap().values;
        assert!((v[0] - v[1]).abs() < 1e-10 && (v[2] - v[3]).abs() < 1e-10);
        let again = project_complex(&p, &s).unwrap();
        assert!(again.sub(&p).frobenius_norm() < 1e-14);
    }

    #[test]
    fn quaternionic_projection_n1_is_scalar() {
        let s = ComplexStructures::quaternionic(1);
        let p = project_quaternionic(&pseudo_random(4, 5), &s).unwrap();
        let v = eigenvalues_sym(&p).unwrap().values;
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12));
    }
}
