use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::SymmetricMatrix;
use crate::parallel::{map_indexed, Exec};
use crate::report::Witness;

use super::sampler::ConeSampler;

/// Semi-decision for `y` in the open polar: `epsilon_hat` is the sampled
/// minimum of `<y, x> / |x|` over `closure(Gamma) ∩ S`.
///
/// A pass is numeric evidence only; a falsifier (a sampled cone point with
/// `<y, x> <= 0`) is conclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarTestReport {
    pub pass: bool,
    pub epsilon_hat: f64,
    pub margin: f64,
    pub samples: usize,
    pub seed: u64,
    pub falsifier: Option<Witness>,
    /// Fraction of samples drawn on the boundary.
    pub boundary_fraction: f64,
}

pub const BOUNDARY_FRACTION: f64 = 0.5;

pub fn open_polar_test(
    y: &SymmetricMatrix,
    sampler: &ConeSampler,
    samples: usize,
    seed: u64,
    margin: f64,
    exec: Exec,
) -> Result<PolarTestReport> {
    sampler.domain().contains(y)?;
    let rows = map_indexed(exec, samples, seed, |_, rng| {
        let (x, _) = sampler.mixed(BOUNDARY_FRACTION, rng);
        (y.inner(&x) / x.frobenius_norm(), x)
    });
    let mut eps = f64::INFINITY;
    let mut falsifier = None;
    for (v, x) in &rows {
        if *v < eps {
            eps = *v;
            if *v <= 0.0 {
                falsifier = Some(Witness::matrix(x));
            }
        }
    }
    Ok(PolarTestReport {
        pass: eps > margin && falsifier.is_none(),
        epsilon_hat: eps,
        margin,
        samples,
        seed,
        falsifier,
        boundary_fraction: BOUNDARY_FRACTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{OperatorSpec, Space};

    #[test]
    fn identity_in_psd_polar() {
        let f = OperatorSpec::det(Space::real(3)).unwrap();
        let r = open_polar_test(
            &f.identity(),
            &ConeSampler::operator(&f),
            300,
            1,
            0.0,
            Exec::Parallel,
        )
        .unwrap();
        assert!(r.pass);
        assert!(r.epsilon_hat >= 1.0 - 1e-9, "{}", r.epsilon_hat);
    }

    #[test]
    fn quadrant_boundary_falsifies() {
        let y = SymmetricMatrix::diag(&[1.0, 0.0]);
        let r = open_polar_test(&y, &ConeSampler::Orthant(2), 200, 1, 0.0, Exec::Parallel).unwrap();
        assert!(!r.pass);
        assert_eq!(r.epsilon_hat, 0.0);
        let Some(Witness::Matrix(m)) = r.falsifier else {
            panic!("no falsifier")
        };
        assert_eq!(m.entries, vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn outside_polar_negative() {
        let y = SymmetricMatrix::diag(&[1.0, -1.0]);
        let r = open_polar_test(&y, &ConeSampler::Orthant(2), 50, 1, 0.0, Exec::Parallel).unwrap();
        assert!(!r.pass && r.epsilon_hat < 0.0);
    }
}
