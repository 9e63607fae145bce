use crate::error::Result;
use crate::linalg::{jacobi, Matrix, SymmetricMatrix};
use crate::operators::OperatorSpec;

use super::spectrum::i_eigenvalues;

/// Orthonormal bases of the edge `E` (null space of
/// `Q(B) = sum lambda_j^{F,I}(B)^2`) and of its complement, the span `S`.
#[derive(Clone, Debug)]
pub struct EdgeSpanDecomposition {
    pub edge_basis: Vec<SymmetricMatrix>,
    pub span_basis: Vec<SymmetricMatrix>,
    pub nullspace_tolerance: f64,
    /// Eigenvalues of the Gram matrix of `Q`, ascending.
    pub gram_eigenvalues: Vec<f64>,
}

impl EdgeSpanDecomposition {
    /// Orthogonal projection onto `S`.
    pub fn project_to_span(&self, b: &SymmetricMatrix) -> SymmetricMatrix {
        let mut out = b.scale_by(0.0);
        for s in &self.span_basis {
            out = s.axpy(s.inner(b), &out);
        }
        out
    }

    /// Frobenius norm of the component of `b` in `E`.
    pub fn edge_component(&self, b: &SymmetricMatrix) -> f64 {
        self.edge_basis
            .iter()
            .map(|e| e.inner(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `Q(B) = sum_j lambda_j^{F,I}(B)^2`.
pub fn quadratic_q(f: &OperatorSpec, b: &SymmetricMatrix) -> Result<f64> {
    Ok(i_eigenvalues(f, b)?.power_sum(2))
}

/// Assembles the Gram matrix of `Q` over an orthonormal basis of the domain
/// by polarization, `G_ij = (Q(B_i + B_j) - Q(B_i) - Q(B_j)) / 2`, and splits
/// the basis at eigenvalue `tol * max(1, largest)`.
pub fn edge_and_span(f: &OperatorSpec, tol: f64) -> Result<EdgeSpanDecomposition> {
    let basis = f.domain().basis();
    let d = basis.len();
    let diag: Vec<f64> = basis
        .iter()
        .map(|b| quadratic_q(f, b))
        .collect::<Result<_>>()?;
    let mut g = Matrix::zeros(d);
    for i in 0..d {
        g[(i, i)] = diag[i];
        for j in (i + 1)..d {
            let q = quadratic_q(f, &basis[i].add(&basis[j]))?;
            let v = 0.5 * (q - diag[i] - diag[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let eig = jacobi(&SymmetricMatrix::real(g))?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    let cut = tol * top;
    let mut edge = Vec::new();
    let mut span = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        let coeffs = eig.vector(k);
        let mut m = basis[0].scale_by(0.0);
        for (c, b) in coeffs.iter().zip(&basis) {
            m = b.axpy(*c, &m);
        }
        if lam <= cut {
            edge.push(m);
        } else {
            span.push(m);
        }
    }
    Ok(EdgeSpanDecomposition {
        edge_basis: edge,
        span_basis: span,
        nullspace_tolerance: cut,
        gram_eigenvalues: eig.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Space;
    use crate::poly::SparseSymPoly;

    #[test]
    fn trace_edge_is_traceless() {
        let f = OperatorSpec::sigma(Space::real(2), 1).unwrap();
        let e = edge_and_span(&f, 1e-9).unwrap();
        assert_eq!(e.edge_basis.len(), 2);
        for b in &e.edge_basis {
            assert!(b.trace().abs() < 1e-10);
        }
    }

    #[test]
    fn det_edge_trivial() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        assert!(edge_and_span(&f, 1e-9).unwrap().edge_basis.is_empty());
    }

    #[test]
    fn diagonal_edge_is_off_diagonal() {
        let f = OperatorSpec::diagonal(SparseSymPoly::monomial(vec![1, 1], 1.0).unwrap()).unwrap();
        let e = edge_and_span(&f, 1e-9).unwrap();
        assert_eq!(e.edge_basis.len(), 1);
        let b = &e.edge_basis[0];
        assert!(b.get(0, 0).abs() < 1e-10 && b.get(1, 1).abs() < 1e-10);
        assert!((b.get(0, 1).abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }
}
