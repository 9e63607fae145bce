//! Homogeneous multivariate polynomials, univariate interpolation and real
//! roots, and truncated power series.

mod io;
mod series;
mod sparse;
mod univariate;

pub use io::{poly_from_json, poly_to_json, read_poly, PolyFile, TermFile};
pub use series::{series_qth_root, TruncatedSeries};
pub use sparse::{elementary_symmetric, elementary_symmetric_all, SparseSymPoly};
pub use univariate::{
    factorization_residual, interpolate_univariate, real_rooted_fit, real_roots, UnivariatePoly,
};
