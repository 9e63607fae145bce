use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{MatrixFile, SymmetricMatrix};

/// Worst-case input found by a harness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Matrix(MatrixFile),
    Vector(Vec<f64>),
}

impl Witness {
    pub fn matrix(a: &SymmetricMatrix) -> Self {
        Witness::Matrix(MatrixFile::from_matrix(a))
    }
}

/// Outcome of a property harness.
///
/// `worst_gap` is the smallest observed slack of the checked inequality (or
/// the negated largest error for identities), so `pass` means it stayed
/// above the harness tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub pass: bool,
    pub samples: usize,
    pub seed: u64,
    pub worst_gap: f64,
    pub witness: Option<Witness>,
    pub residuals: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(samples: usize, seed: u64) -> Self {
        CheckReport {
            pass: true,
            samples,
            seed,
            worst_gap: f64::INFINITY,
            witness: None,
            residuals: BTreeMap::new(),
        }
    }

    pub fn with_residual(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.to_string(), value);
        self
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.to_string(), value);
    }

    /// Records `gap` for sample `witness` when it is the smallest so far.
    pub fn observe(&mut self, gap: f64, witness: impl FnOnce() -> Witness) {
        if gap < self.worst_gap || (gap.is_nan() && !self.worst_gap.is_nan()) {
            self.worst_gap = gap;
            self.witness = Some(witness());
        }
    }

    /// Sets `pass` from `worst_gap >= -slack`.
    pub fn finish(mut self, slack: f64) -> Self {
        self.pass = self.worst_gap >= -slack;
        self
    }

    /// Combines two reports on the same seed: passes only if both do.
    pub fn merge(mut self, other: CheckReport, prefix: &str) -> Self {
        self.pass &= other.pass;
        self.samples += other.samples;
        if other.worst_gap < self.worst_gap {
            self.worst_gap = other.worst_gap;
            self.witness = other.witness;
        }
        for (k, v) in other.residuals {
            self.residuals.insert(format!("{prefix}{k}"), v);
        }
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observe_keeps_minimum() {
        let mut r = CheckReport::new(3, 1);
        r.observe(0.5, || Witness::Vector(vec![1.0]));
        r.observe(-0.1, || Witness::Vector(vec![2.0]));
        r.observe(0.2, || Witness::Vector(vec![3.0]));
        let r = r.finish(1e-9);
        assert!(!r.pass);
        assert_eq!(r.witness, Some(Witness::Vector(vec![2.0])));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"witness\":[2.0]"));
    }
}
