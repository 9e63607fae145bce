//! Garding spectra, hyperbolicity and cone tests, the edge/span split, and
//! derivatives of the barrier `log F`.

mod barrier;
mod cone;
mod edge;
mod spectrum;

pub use barrier::{
    barrier_harness, discriminant_identity_check, fd_step, gradient_matrix, guler_check,
    log_derivative, log_derivative_fd, log_derivative_from, require_in_cone,
};
pub use cone::{in_garding_cone, is_hyperbolic};
pub use edge::{edge_and_span, quadratic_q, EdgeSpanDecomposition};
pub use spectrum::{garding_spectrum, i_eigenvalues, GardingSpectrum};
