//! Determinant majorization: the coefficient hypotheses and their
//! polynomial-level inequality, seeded harnesses for operators, and the
//! counterexample family where the central ray hypothesis fails.

mod basic;
mod counterexample;
mod families;
mod harness;

pub use basic::{basic_lemma_harness, check_basic_lemma, random_crh_polynomial, BasicLemmaReport};
pub use counterexample::{
    counterexample_operator, counterexample_ratio, counterexample_scan, fd_hessian,
    generalized_counterexample_operator, generalized_counterexample_ratio, pogorelov_formula,
    pogorelov_k, pogorelov_verify, CounterexampleScan, PogorelovGrid, PogorelovProfile,
};
pub use families::ordered_eig_family_check;
pub use harness::{
    concavity_check, hadamard_check, majorization_gaps, majorization_harness, majorization_sides,
    positive_sample, superadditivity_check, GammaMode, MajorizationReport,
};
