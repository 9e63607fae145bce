use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::{Algebra, SymmetricMatrix};
use super::structures::ComplexStructures;

/// On-disk form `{"dim": n, "algebra": "R"|"C"|"H", "entries": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    #[serde(default = "default_algebra")]
    pub algebra: Algebra,
    pub entries: Vec<Vec<f64>>,
}

fn default_algebra() -> Algebra {
    Algebra::Real
}

impl MatrixFile {
    pub fn from_matrix(a: &SymmetricMatrix) -> Self {
        MatrixFile {
            dim: a.dim(),
            algebra: a.algebra(),
            entries: a.rows(),
        }
    }

    /// Validates shape and symmetry; `path` prefixes error locations.
    pub fn into_matrix(self, path: &str) -> Result<SymmetricMatrix> {
        if self.entries.len() != self.dim {
            return Err(Error::parse(
                format!("{path}.entries"),
                format!("expected {} rows, found {}", self.dim, self.entries.len()),
            ));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::parse(
                    format!("{path}.entries[{i}]"),
                    format!("expected {} columns, found {}", self.dim, row.len()),
                ));
            }
        }
        let mult = self.algebra.multiplicity();
        if !self.dim.is_multiple_of(mult) {
            return Err(Error::parse(
                format!("{path}.dim"),
                format!(
                    "dimension {} is not a multiple of {mult} for algebra {}",
                    self.dim, self.algebra
                ),
            ));
        }
        let a = SymmetricMatrix::from_rows_strict(&self.entries, self.algebra)
            .map_err(|e| Error::parse(format!("{path}.entries"), e.to_string()))?;
        if let Some(s) = ComplexStructures::for_algebra(self.algebra, self.dim) {
            s.require_commuting(&a)
                .map_err(|e| Error::parse(format!("{path}.entries"), e.to_string()))?;
        }
        Ok(a)
    }
}

pub fn matrix_from_json(text: &str, path: &str) -> Result<SymmetricMatrix> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))?;
    file.into_matrix(path)
}

pub fn matrix_to_json(a: &SymmetricMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(a)).expect("matrix serializes")
}

pub fn read_matrix(path: &Path) -> Result<SymmetricMatrix> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_json(&text, &path.display().to_string())
}
