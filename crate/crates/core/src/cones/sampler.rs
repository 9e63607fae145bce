use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::garding::{edge_and_span, i_eigenvalues, EdgeSpanDecomposition};
use crate::linalg::SymmetricMatrix;
use crate::operators::{Domain, OperatorSpec};
use crate::sampling::random_direction;

/// Source of unit points of `closure(Gamma) ∩ S`.
#[derive(Clone, Debug)]
pub enum ConeSampler {
    /// Cone of an operator, restricted to the span of its edge complement.
    Operator {
        spec: OperatorSpec,
        span: Option<Box<EdgeSpanDecomposition>>,
    },
    /// Nonnegative diagonal matrices: the orthant of `R^n` in the diagonal
    /// model.
    Orthant(usize),
}

impl ConeSampler {
    pub fn operator(spec: &OperatorSpec) -> Self {
        let span = edge_and_span(spec, 1e-9)
            .ok()
            .filter(|d| !d.edge_basis.is_empty())
            .map(Box::new);
        ConeSampler::Operator {
            spec: spec.clone(),
            span,
        }
    }

    pub fn domain_dim(&self) -> usize {
        match self {
            ConeSampler::Operator { spec, .. } => spec.domain().dim(),
            ConeSampler::Orthant(n) => *n,
        }
    }

    /// A unit point of the closed cone. With `boundary`, the point has a
    /// zero Garding eigenvalue; otherwise the smallest one is positive.
    ///
    /// A Gaussian direction `G` is shifted to `G + (delta - lambda_min(G)) I`,
    /// which has smallest eigenvalue `delta`, projected to `S` and
    /// normalized. Points failing `lambda_min >= -1e-9` are rejected.
    ///
    /// When `S` is one-dimensional the closed cone meets the unit sphere in
    /// a single interior point, and a boundary request returns it.
    pub fn sample(&self, boundary: bool, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        match self {
            ConeSampler::Orthant(n) => loop {
                let mut d: Vec<f64> = (0..*n).map(|_| Exp1.sample(rng)).collect();
                if boundary && *n > 1 {
                    let zeros = rng.random_range(1..*n);
                    for _ in 0..zeros {
                        d[rng.random_range(0..*n)] = 0.0;
                    }
                }
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    return SymmetricMatrix::diag(&d.iter().map(|x| x / norm).collect::<Vec<_>>());
                }
            },
            ConeSampler::Operator { spec, span } => {
                let flat = match span {
                    Some(d) => d.span_basis.len() <= 1,
                    None => spec.domain().basis().len() <= 1,
                };
                let boundary = boundary && !flat;
                loop {
                    let g = random_direction(spec.domain(), rng);
                    let Ok(s) = i_eigenvalues(spec, &g) else {
                        continue;
                    };
                    let z: f64 = StandardNormal.sample(rng);
                    let delta = if boundary {
                        0.0
                    } else {
                        z.abs() * (0.05 + s.max_abs())
                    };
                    let mut x = g.shift(delta - s.min());
                    if let Some(d) = span {
                        x = d.project_to_span(&x);
                    }
                    let norm = x.frobenius_norm();
                    if norm <= 1e-12 {
                        continue;
                    }
                    let x = x.scale_by(1.0 / norm);
                    match i_eigenvalues(spec, &x) {
                        Ok(s) if s.min() >= -1e-9 => return x,
                        _ => continue,
                    }
                }
            }
        }
    }

    /// Interior sample with probability `1 - boundary_fraction`.
    pub fn mixed(&self, boundary_fraction: f64, rng: &mut ChaCha8Rng) -> (SymmetricMatrix, bool) {
        let boundary = rng.random::<f64>() < boundary_fraction;
        (self.sample(boundary, rng), boundary)
    }

    pub fn domain(&self) -> Domain {
        match self {
            ConeSampler::Operator { spec, .. } => spec.domain(),
            ConeSampler::Orthant(n) => Domain::Full(*n),
        }
    }
}
