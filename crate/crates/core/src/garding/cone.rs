use crate::error::Result;
use crate::linalg::SymmetricMatrix;
use crate::operators::OperatorSpec;
use crate::parallel::{map_indexed, Exec};
use crate::report::{CheckReport, Witness};
use crate::sampling::random_direction;

use super::spectrum::i_eigenvalues;

/// `min lambda^{F,I}(A) > tol (1 + ||A||_F)`.
pub fn in_garding_cone(f: &OperatorSpec, a: &SymmetricMatrix, tol: f64) -> Result<bool> {
    let s = i_eigenvalues(f, a)?;
    Ok(s.min() > tol * (1.0 + a.frobenius_norm()))
}

/// Samples unit directions `B` and checks that `t -> F(tI + B)` is
/// real-rooted, i.e. the spectrum's factorization residual is at most `tol`.
///
/// `worst_gap` is `tol - max residual`; the witness is the worst `B`.
pub fn is_hyperbolic(
    f: &OperatorSpec,
    samples: usize,
    seed: u64,
    tol: f64,
    exec: Exec,
) -> CheckReport {
    let domain = f.domain();
    let results = map_indexed(exec, samples, seed, |_, rng| {
        let b = random_direction(domain, rng);
        match i_eigenvalues(f, &b) {
            Ok(s) => (b, s.hyperbolicity_residual, s.max_imag),
            Err(_) => (b, f64::INFINITY, f64::INFINITY),
        }
    });
    let mut report = CheckReport::new(samples, seed);
    let mut max_res = 0.0f64;
    let mut max_imag = 0.0f64;
    for (b, res, imag) in &results {
        max_res = max_res.max(*res);
        max_imag = max_imag.max(*imag);
        report.observe(tol - res, || Witness::matrix(b));
    }
    report.set("max_factorization_residual", max_res);
    report.set("max_imag", max_imag);
    report.finish(0.0)
}
