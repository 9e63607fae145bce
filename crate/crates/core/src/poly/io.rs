use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sparse::SparseSymPoly;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

/// On-disk form `{"nvars": n, "terms": [{"alpha": [..], "coeff": x}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub nvars: usize,
    pub terms: Vec<TermFile>,
}

impl PolyFile {
    pub fn from_poly(p: &SparseSymPoly) -> Self {
        PolyFile {
            nvars: p.nvars(),
            terms: p
                .terms()
                .map(|(a, c)| TermFile {
                    alpha: a.to_vec(),
                    coeff: c,
                })
                .collect(),
        }
    }

    /// Validates arity and homogeneity; `path` prefixes error locations.
    pub fn into_poly(self, path: &str) -> Result<SparseSymPoly> {
        let mut expected = None;
        for (i, t) in self.terms.iter().enumerate() {
            if t.alpha.len() != self.nvars {
                return Err(Error::parse(
                    format!("{path}.terms[{i}].alpha"),
                    format!("expected {} exponents, found {}", self.nvars, t.alpha.len()),
                ));
            }
            let d: u32 = t.alpha.iter().sum();
            match expected {
                None => expected = Some(d),
                Some(e) if e != d => {
                    return Err(Error::parse(
                        format!("{path}.terms[{i}].alpha"),
                        format!("not homogeneous: degree {d}, expected {e}"),
                    ));
                }
                _ => {}
            }
        }
        SparseSymPoly::new(
            self.nvars,
            self.terms.into_iter().map(|t| (t.alpha, t.coeff)),
        )
        .map_err(|e| Error::parse(format!("{path}.terms"), e.to_string()))
    }
}

pub fn poly_from_json(text: &str, path: &str) -> Result<SparseSymPoly> {
    let file: PolyFile =
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))?;
    file.into_poly(path)
}

pub fn poly_to_json(p: &SparseSymPoly) -> String {
    serde_json::to_string_pretty(&PolyFile::from_poly(p)).expect("polynomial serializes")
}

pub fn read_poly(path: &Path) -> Result<SparseSymPoly> {
    let text = std::fs::read_to_string(path)?;
    poly_from_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let p = SparseSymPoly::elementary(3, 2).unwrap();
        assert_eq!(poly_from_json(&poly_to_json(&p), "p").unwrap(), p);
        let bad = r#"{"nvars":2,"terms":[{"alpha":[1,1],"coeff":1},{"alpha":[1,0],"coeff":1}]}"#;
        let err = poly_from_json(bad, "p.json").unwrap_err().to_string();
        assert!(err.starts_with("p.json.terms[1].alpha"), "{err}");
    }
}
