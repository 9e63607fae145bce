//! Cone geometry: open-polar membership by sampling, the exhaustion
//! function and its prelevel bound, and the central ray.

mod central_ray;
mod exhaustion;
mod polar;
mod sampler;

pub use central_ray::{
    angle_between, central_ray_check, central_ray_search, sup_inequality_check, CentralRayReport,
    CentralRaySearch, SearchOptions,
};
pub use exhaustion::{
    exhaustion_convexity_check, exhaustion_value, prelevel_check, prelevel_radius_bound, SUP_SAFETY,
};
pub use polar::{open_polar_test, PolarTestReport, BOUNDARY_FRACTION};
pub use sampler::ConeSampler;
