//! Expression trees describing G-D operators on symmetric matrices, and
//! their evaluation.

pub(crate) mod eval;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Algebra, ComplexStructures, Matrix, SymmetricMatrix};
use crate::poly::SparseSymPoly;

pub use eval::{delta_i_elementary, field_eigenvalues, lagrangian_data, LagrangianEigData};
pub use io::{read_spec, spec_from_json, spec_from_value, spec_to_json};

/// Algebra and number of scalars; the real matrix size is `n` times the
/// algebra's multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub algebra: Algebra,
    pub n: usize,
}

impl Space {
    pub fn real(n: usize) -> Self {
        Space {
            algebra: Algebra::Real,
            n,
        }
    }

    pub fn complex(n: usize) -> Self {
        Space {
            algebra: Algebra::Complex,
            n,
        }
    }

    pub fn quaternionic(n: usize) -> Self {
        Space {
            algebra: Algebra::Quaternion,
            n,
        }
    }

    pub fn dim(&self) -> usize {
        self.n * self.algebra.multiplicity()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.algebra, self.n)
    }
}

/// Linear space of matrices an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// All real symmetric matrices of the given size.
    Full(usize),
    /// Symmetric matrices of size `n * multiplicity` commuting with the
    /// algebra's structures.
    Hermitian(Algebra, usize),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::Full(d) => d,
            Domain::Hermitian(a, n) => n * a.multiplicity(),
        }
    }

    /// Multiplicity used by the field inner product `tr_R(AB) / m`.
    pub fn multiplicity(&self) -> usize {
        match *self {
            Domain::Full(_) => 1,
            Domain::Hermitian(a, _) => a.multiplicity(),
        }
    }

    pub fn algebra(&self) -> Algebra {
        match *self {
            Domain::Full(_) => Algebra::Real,
            Domain::Hermitian(a, _) => a,
        }
    }

    /// Eigenvalue count `dim / multiplicity`.
    pub fn field_n(&self) -> usize {
        self.dim() / self.multiplicity()
    }

    pub fn structures(&self) -> Option<ComplexStructures> {
        match *self {
            Domain::Full(_) => None,
            Domain::Hermitian(a, n) => ComplexStructures::for_algebra(a, n * a.multiplicity()),
        }
    }

    pub fn identity(&self) -> SymmetricMatrix {
        SymmetricMatrix::identity(self.dim(), self.algebra())
    }

    /// Tags and, for Hermitian domains, projects `a`.
    pub fn project(&self, a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        match self.structures() {
            None => Ok(a.clone()),
            Some(s) => s.project(a),
        }
    }

    pub fn contains(&self, a: &SymmetricMatrix) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::SpaceMismatch(format!(
                "matrix of size {} given to an operator on {}x{} matrices",
                a.dim(),
                self.dim(),
                self.dim()
            )));
        }
        if let Some(s) = self.structures() {
            s.require_commuting(a)?;
        }
        Ok(())
    }

    /// Orthonormal basis (Frobenius) of the domain.
    pub fn basis(&self) -> Vec<SymmetricMatrix> {
        let d = self.dim();
        let alg = self.algebra();
        let mut canonical = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                let mut m = Matrix::zeros(d);
                if i == j {
                    m[(i, i)] = 1.0;
                } else {
                    m[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
                    m[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
                }
                canonical.push(m);
            }
        }
        let Some(s) = self.structures() else {
            return canonical.into_iter().map(SymmetricMatrix::real).collect();
        };
        let mut basis: Vec<Matrix> = Vec::new();
        for m in canonical {
            let mut v = s.project_matrix(&m);
            for _ in 0..2 {
                for b in &basis {
                    let c = v.frobenius_inner(b);
                    v = v.sub(&b.scale(c));
                }
            }
            let norm = v.frobenius_norm();
            if norm > 1e-8 {
                basis.push(v.scale(1.0 / norm));
            }
        }
        basis
            .into_iter()
            .map(|m| SymmetricMatrix::new(m, alg).expect("projected basis keeps dimension"))
            .collect()
    }
}

/// Node of an operator expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum OpNode {
    /// `sigma_k` of the field eigenvalues.
    Sigma(usize),
    /// Field determinant.
    Det,
    /// `prod_{|J| = p} (lambda_{j_1} + ... + lambda_{j_p})`.
    PFoldSum(usize),
    /// `prod over 2^n signs of (n t +- lambda_1 +- ... +- lambda_n)` on
    /// `2n x 2n` real symmetric matrices.
    LagrangianMA,
    /// Symmetric polynomial of the field eigenvalues.
    SymPolyOfEigs(SparseSymPoly),
    /// Polynomial of the diagonal entries.
    DiagonalPoly(SparseSymPoly),
    /// Polynomial of the ascending eigenvalues.
    OrderedEigPoly(SparseSymPoly),
    Product(Vec<OperatorSpec>),
    /// `delta_P^k F(A) = d^k/dt^k F(tP + A) at t = 0`.
    DirectionalDeriv {
        inner: Box<OperatorSpec>,
        direction: SymmetricMatrix,
        order: usize,
    },
    /// `p(lambda^F(A))` for the inner operator's Garding eigenvalues.
    Compose {
        outer: SparseSymPoly,
        inner: Box<OperatorSpec>,
    },
    /// `w_q q(lambda_1..lambda_n) + w_r r(lambda_{n+1}..)` on ascending
    /// eigenvalues, with `w_q = k'/(k+k')` and `w_r = k/(k+k')`.
    ConvexCombo {
        q: SparseSymPoly,
        r: SparseSymPoly,
        wq: f64,
        wr: f64,
        combined: SparseSymPoly,
    },
    /// `q(lambda_1..lambda_n) r(lambda_{n+1}..)` on ascending eigenvalues.
    TensorProduct {
        q: SparseSymPoly,
        r: SparseSymPoly,
        combined: SparseSymPoly,
    },
}

/// A G-D operator description: its space, expression and degree.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    space: Space,
    node: OpNode,
    degree: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Normalized copy and central-ray constant `k` (mean of the partials at `e`).
fn normalized_with_k(p: &SparseSymPoly) -> Result<(SparseSymPoly, f64)> {
    let p = p.normalized()?;
    let partials = p.partials_at_e();
    let k = partials.iter().sum::<f64>() / partials.len() as f64;
    Ok((p, k))
}

impl OperatorSpec {
    pub fn sigma(space: Space, k: usize) -> Result<Self> {
        if k == 0 || k > space.n {
            return Err(Error::OutOfRange {
                what: "k",
                value: k.to_string(),
                allowed: format!("1..={}", space.n),
            });
        }
        Ok(OperatorSpec {
            space,
            node: OpNode::Sigma(k),
            degree: k,
        })
    }

    pub fn det(space: Space) -> Result<Self> {
        if space.n == 0 {
            return Err(Error::OutOfRange {
                what: "n",
                value: "0".into(),
                allowed: ">= 1".into(),
            });
        }
        Ok(OperatorSpec {
            space,
            node: OpNode::Det,
            degree: space.n,
        })
    }

    pub fn pfold(space: Space, p: usize) -> Result<Self> {
        if p == 0 || p > space.n {
            return Err(Error::OutOfRange {
                what: "p",
                value: p.to_string(),
                allowed: format!("1..={}", space.n),
            });
        }
        Ok(OperatorSpec {
            space,
            node: OpNode::PFoldSum(p),
            degree: binomial(space.n, p),
        })
    }

    /// Lagrangian Monge-Ampere operator on `C^n`, acting on all `2n x 2n`
    /// real symmetric matrices.
    pub fn lagrangian_ma(n: usize) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(Error::OutOfRange {
                what: "n",
                value: n.to_string(),
                allowed: "1..=12".into(),
            });
        }
        Ok(OperatorSpec {
            space: Space::complex(n),
            node: OpNode::LagrangianMA,
            degree: 1 << n,
        })
    }

    pub fn sym_poly(space: Space, p: SparseSymPoly) -> Result<Self> {
        if p.nvars() != space.n {
            return Err(Error::DimensionMismatch {
                expected: space.n,
                found: p.nvars(),
            });
        }
        if !p.is_permutation_symmetric() {
            return Err(Error::precondition(
                "eigenvalue polynomial must be permutation symmetric",
            ));
        }
        let degree = p.degree() as usize;
        Ok(OperatorSpec {
            space,
            node: OpNode::SymPolyOfEigs(p),
            degree,
        })
    }

    pub fn diagonal(p: SparseSymPoly) -> Result<Self> {
        let degree = p.degree() as usize;
        Ok(OperatorSpec {
            space: Space::real(p.nvars()),
            node: OpNode::DiagonalPoly(p),
            degree,
        })
    }

    /// Diagonal polynomial on `n >= nvars` variables; the extra diagonal
    /// entries do not enter.
    pub fn diagonal_padded(p: &SparseSymPoly, n: usize) -> Result<Self> {
        if n < p.nvars() {
            return Err(Error::DimensionMismatch {
                expected: p.nvars(),
                found: n,
            });
        }
        let pad = n - p.nvars();
        let padded = SparseSymPoly::new(
            n,
            p.terms().map(|(a, c)| {
                (
                    a.iter()
                        .copied()
                        .chain(std::iter::repeat_n(0, pad))
                        .collect(),
                    c,
                )
            }),
        )?;
        Self::diagonal(padded)
    }

    pub fn ordered(p: SparseSymPoly) -> Result<Self> {
        let degree = p.degree() as usize;
        Ok(OperatorSpec {
            space: Space::real(p.nvars()),
            node: OpNode::OrderedEigPoly(p),
            degree,
        })
    }

    pub fn product(factors: Vec<OperatorSpec>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::precondition("product needs at least one factor"))?;
        let space = first.space;
        let domain = first.domain();
        for f in &factors {
            if f.domain() != domain || f.space != space {
                return Err(Error::SpaceMismatch(format!(
                    "product factors live on {} and {}",
                    space, f.space
                )));
            }
        }
        let degree = factors.iter().map(|f| f.degree).sum();
        Ok(OperatorSpec {
            space,
            node: OpNode::Product(factors),
            degree,
        })
    }

    pub fn directional(
        inner: OperatorSpec,
        direction: SymmetricMatrix,
        order: usize,
    ) -> Result<Self> {
        if order > inner.degree {
            return Err(Error::OutOfRange {
                what: "order",
                value: order.to_string(),
                allowed: format!("0..={}", inner.degree),
            });
        }
        inner.domain().contains(&direction)?;
        let degree = inner.degree - order;
        Ok(OperatorSpec {
            space: inner.space,
            node: OpNode::DirectionalDeriv {
                inner: Box::new(inner),
                direction,
                order,
            },
            degree,
        })
    }

    pub fn compose(outer: SparseSymPoly, inner: OperatorSpec) -> Result<Self> {
        if outer.nvars() != inner.degree {
            return Err(Error::DimensionMismatch {
                expected: inner.degree,
                found: outer.nvars(),
            });
        }
        if !outer.is_permutation_symmetric() {
            return Err(Error::precondition(
                "outer polynomial must be permutation symmetric",
            ));
        }
        let degree = outer.degree() as usize;
        Ok(OperatorSpec {
            space: inner.space,
            node: OpNode::Compose {
                outer,
                inner: Box::new(inner),
            },
            degree,
        })
    }

    /// Convex combination of two equal-degree polynomials in disjoint blocks
    /// of ascending eigenvalues; both are normalized to `p(e) = 1` first.
    pub fn convex_combo(q: SparseSymPoly, r: SparseSymPoly) -> Result<Self> {
        if q.degree() != r.degree() {
            return Err(Error::precondition(format!(
                "convex combination needs equal degrees, found {} and {}",
                q.degree(),
                r.degree()
            )));
        }
        let (q, k) = normalized_with_k(&q)?;
        let (r, k2) = normalized_with_k(&r)?;
        let (wq, wr) = (k2 / (k + k2), k / (k + k2));
        let combined = q.disjoint_sum(wq, &r, wr)?;
        let degree = combined.degree() as usize;
        Ok(OperatorSpec {
            space: Space::real(combined.nvars()),
            node: OpNode::ConvexCombo {
                q,
                r,
                wq,
                wr,
                combined,
            },
            degree,
        })
    }

    /// Product of two polynomials with the same central-ray constant, in
    /// disjoint blocks of ascending eigenvalues.
    pub fn tensor(q: SparseSymPoly, r: SparseSymPoly) -> Result<Self> {
        let (q, k) = normalized_with_k(&q)?;
        let (r, k2) = normalized_with_k(&r)?;
        if (k - k2).abs() > 1e-12 * k.abs().max(k2.abs()) {
            return Err(Error::precondition(format!(
                "tensor product needs equal central-ray constants, found {k} and {k2}"
            )));
        }
        let combined = q.tensor(&r);
        let degree = combined.degree() as usize;
        Ok(OperatorSpec {
            space: Space::real(combined.nvars()),
            node: OpNode::TensorProduct { q, r, combined },
            degree,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn node(&self) -> &OpNode {
        &self.node
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> Domain {
        match self.node {
            OpNode::LagrangianMA => Domain::Full(2 * self.space.n),
            _ if self.space.algebra == Algebra::Real => Domain::Full(self.space.n),
            _ => Domain::Hermitian(self.space.algebra, self.space.n),
        }
    }

    /// `(n, real matrix size)`.
    pub fn dimension(&self) -> (usize, usize) {
        (self.space.n, self.domain().dim())
    }

    pub fn identity(&self) -> SymmetricMatrix {
        self.domain().identity()
    }

    /// Checks the builder invariants on a tree assembled by hand.
    pub fn validate(&self) -> Result<()> {
        match &self.node {
            OpNode::Product(fs) => {
                for f in fs {
                    f.validate()?;
                    if f.space != self.space || f.domain() != self.domain() {
                        return Err(Error::SpaceMismatch(format!(
                            "factor on {} inside {}",
                            f.space, self.space
                        )));
                    }
                }
                let sum: usize = fs.iter().map(|f| f.degree).sum();
                if sum != self.degree {
                    return Err(Error::precondition(
                        "product degree is not the sum of factor degrees",
                    ));
                }
            }
            OpNode::DirectionalDeriv { inner, order, .. } => {
                inner.validate()?;
                if inner.degree < *order || inner.degree - order != self.degree {
                    return Err(Error::precondition(
                        "directional derivative degree mismatch",
                    ));
                }
            }
            OpNode::Compose { inner, .. } => inner.validate()?,
            _ => {}
        }
        Ok(())
    }

    /// Whether evaluation factors through a symmetric function of the field
    /// eigenvalues, i.e. the operator is invariant under the unitary group of
    /// its algebra.
    pub fn is_invariant(&self) -> bool {
        match &self.node {
            OpNode::Sigma(_) | OpNode::Det | OpNode::PFoldSum(_) | OpNode::SymPolyOfEigs(_) => true,
            OpNode::LagrangianMA => true,
            OpNode::Product(fs) => fs.iter().all(OperatorSpec::is_invariant),
            OpNode::Compose { inner, .. } => inner.is_invariant(),
            _ => false,
        }
    }

    /// The universal polynomial `p` with `F(A) = p(x(A))`, where `x(A)` is
    /// the field eigenvalue list, the diagonal or the ascending eigenvalues
    /// depending on the node. `None` when `F` is not of that form.
    pub fn defining_polynomial(&self) -> Option<SparseSymPoly> {
        let n = self.space.n;
        match &self.node {
            OpNode::Sigma(k) => SparseSymPoly::elementary(n, *k).ok(),
            OpNode::Det => SparseSymPoly::elementary(n, n).ok(),
            OpNode::PFoldSum(p) => {
                let groups = subsets(n, *p);
                SparseSymPoly::product_of_linear_forms(n, &groups).ok()
            }
            OpNode::SymPolyOfEigs(p) | OpNode::DiagonalPoly(p) | OpNode::OrderedEigPoly(p) => {
                Some(p.clone())
            }
            OpNode::ConvexCombo { combined, .. } | OpNode::TensorProduct { combined, .. } => {
                Some(combined.clone())
            }
            OpNode::Product(fs) => {
                let mut acc: Option<SparseSymPoly> = None;
                for f in fs {
                    if !matches!(
                        f.node,
                        OpNode::Sigma(_)
                            | OpNode::Det
                            | OpNode::PFoldSum(_)
                            | OpNode::SymPolyOfEigs(_)
                            | OpNode::Product(_)
                    ) {
                        return None;
                    }
                    let p = f.defining_polynomial()?;
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.mul(&p).ok()?,
                    });
                }
                acc
            }
            _ => None,
        }
    }

    /// `F(A)`.
    pub fn evaluate(&self, a: &SymmetricMatrix) -> Result<f64> {
        self.domain().contains(a)?;
        eval::evaluate_unchecked(self, a)
    }

    pub fn describe(&self) -> String {
        match &self.node {
            OpNode::Sigma(k) => format!("sigma_{k} on {}", self.space),
            OpNode::Det => format!("det on {}", self.space),
            OpNode::PFoldSum(p) => format!("{p}-fold sum on {}", self.space),
            OpNode::LagrangianMA => format!("Lagrangian Monge-Ampere on C^{}", self.space.n),
            OpNode::SymPolyOfEigs(_) => {
                format!("symmetric polynomial of eigenvalues on {}", self.space)
            }
            OpNode::DiagonalPoly(_) => format!("diagonal polynomial on {}", self.space),
            OpNode::OrderedEigPoly(_) => format!("ordered-eigenvalue polynomial on {}", self.space),
            OpNode::Product(fs) => format!("product of {} factors", fs.len()),
            OpNode::DirectionalDeriv { inner, order, .. } => {
                format!("order-{order} derivative of {}", inner.describe())
            }
            OpNode::Compose { inner, .. } => format!("composite over {}", inner.describe()),
            OpNode::ConvexCombo { .. } => format!("convex combination on {}", self.space),
            OpNode::TensorProduct { .. } => format!("tensor product on {}", self.space),
        }
    }
}

/// All `p`-subsets of `0..n`, lexicographic.
pub(crate) fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let s = Space::real(3);
        let p = OperatorSpec::product(vec![
            OperatorSpec::sigma(s, 1).unwrap(),
            OperatorSpec::sigma(s, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(OperatorSpec::pfold(s, 2).unwrap().degree(), 3);
        assert_eq!(OperatorSpec::lagrangian_ma(3).unwrap().degree(), 8);
        assert_eq!(OperatorSpec::lagrangian_ma(2).unwrap().dimension(), (2, 4));
    }

    #[test]
    fn hermitian_basis_dimensions() {
        assert_eq!(Domain::Hermitian(Algebra::Complex, 2).basis().len(), 4);
        assert_eq!(Domain::Hermitian(Algebra::Complex, 3).basis().len(), 9);
        assert_eq!(Domain::Hermitian(Algebra::Quaternion, 1).basis().len(), 1);
        assert_eq!(Domain::Hermitian(Algebra::Quaternion, 2).basis().len(), 6);
        assert_eq!(Domain::Full(3).basis().len(), 6);
    }

    #[test]
    fn combinator_preconditions() {
        let q = SparseSymPoly::power_mean(1).unwrap();
        let r = SparseSymPoly::power_mean(2).unwrap();
        assert!(OperatorSpec::tensor(q.clone(), r.clone()).is_ok());
        assert!(OperatorSpec::convex_combo(q, r).is_err());
        let m = SparseSymPoly::mean(2).unwrap();
        let c = OperatorSpec::convex_combo(m.clone(), m).unwrap();
        assert_eq!(
            c.defining_polynomial().unwrap(),
            SparseSymPoly::mean(4).unwrap()
        );
    }

    #[test]
    fn pfold_polynomial() {
        let f = OperatorSpec::pfold(Space::real(3), 2).unwrap();
        let p = f.defining_polynomial().unwrap();
        assert_eq!(p.eval(&[1.0, 2.0, 3.0]).unwrap(), 60.0);
    }
}
