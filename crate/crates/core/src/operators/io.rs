//! JSON form of operator specs:
//!
//! ```json
//! {"space": {"algebra": "R", "n": 3},
//!  "op": {"kind": "product", "factors": [{"kind": "sigma", "k": 1}, {"kind": "sigma", "k": 2}]}}
//! ```
//!
//! Polynomials and direction matrices are given inline in their own file
//! formats or as `{"file": "relative/path.json"}`, resolved against the spec
//! file's directory.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{read_matrix, Algebra, MatrixFile, SymmetricMatrix};
use crate::poly::{read_poly, PolyFile, SparseSymPoly};

use super::{OpNode, OperatorSpec, Space};

struct Ctx<'a> {
    file: &'a str,
    base_dir: Option<PathBuf>,
}

impl Ctx<'_> {
    fn err(&self, loc: &str, msg: impl Into<String>) -> Error {
        Error::parse(format!("{}: {loc}", self.file), msg)
    }

    fn at<E: std::fmt::Display>(&self, loc: &str) -> impl Fn(E) -> Error + '_ {
        let loc = loc.to_string();
        move |e| self.err(&loc, e.to_string())
    }

    fn object<'v>(&self, v: &'v Value, loc: &str) -> Result<&'v Map<String, Value>> {
        v.as_object()
            .ok_or_else(|| self.err(loc, "expected an object"))
    }

    fn field<'v>(&self, m: &'v Map<String, Value>, key: &str, loc: &str) -> Result<&'v Value> {
        m.get(key)
            .ok_or_else(|| self.err(loc, format!("missing field `{key}`")))
    }

    fn usize_field(&self, m: &Map<String, Value>, key: &str, loc: &str) -> Result<usize> {
        let v = self.field(m, key, loc)?;
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| self.err(&format!("{loc}.{key}"), "expected a non-negative integer"))
    }

    fn only(&self, m: &Map<String, Value>, allowed: &[&str], loc: &str) -> Result<()> {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(self.err(
                    loc,
                    format!("unknown field `{k}` (expected one of {allowed:?})"),
                ));
            }
        }
        Ok(())
    }

    fn resolve(&self, rel: &str) -> PathBuf {
        match &self.base_dir {
            Some(d) if Path::new(rel).is_relative() => d.join(rel),
            _ => PathBuf::from(rel),
        }
    }

    fn file_ref<'v>(&self, v: &'v Value) -> Option<&'v str> {
        let m = v.as_object()?;
        if m.len() == 1 {
            m.get("file")?.as_str()
        } else {
            None
        }
    }

    fn poly(&self, v: &Value, loc: &str) -> Result<SparseSymPoly> {
        if let Some(rel) = self.file_ref(v) {
            return read_poly(&self.resolve(rel)).map_err(self.at(loc));
        }
        let file: PolyFile = serde_json::from_value(v.clone()).map_err(self.at(loc))?;
        file.into_poly(&format!("{}: {loc}", self.file))
    }

    fn matrix(&self, v: &Value, loc: &str) -> Result<SymmetricMatrix> {
        if let Some(rel) = self.file_ref(v) {
            return read_matrix(&self.resolve(rel)).map_err(self.at(loc));
        }
        let file: MatrixFile = serde_json::from_value(v.clone()).map_err(self.at(loc))?;
        file.into_matrix(&format!("{}: {loc}", self.file))
    }

    fn op(&self, v: &Value, space: Space, loc: &str) -> Result<OperatorSpec> {
        let m = self.object(v, loc)?;
        let kind = self
            .field(m, "kind", loc)?
            .as_str()
            .ok_or_else(|| self.err(&format!("{loc}.kind"), "expected a string"))?;
        let wrap = self.at(loc);
        match kind {
            "sigma" => {
                self.only(m, &["kind", "k"], loc)?;
                OperatorSpec::sigma(space, self.usize_field(m, "k", loc)?).map_err(wrap)
            }
            "det" => {
                self.only(m, &["kind"], loc)?;
                OperatorSpec::det(space).map_err(wrap)
            }
            "pfold" => {
                self.only(m, &["kind", "p"], loc)?;
                OperatorSpec::pfold(space, self.usize_field(m, "p", loc)?).map_err(wrap)
            }
            "lagrangian_ma" => {
                self.only(m, &["kind"], loc)?;
                if space.algebra != Algebra::Complex {
                    return Err(self.err(loc, "lagrangian_ma needs space algebra \"C\""));
                }
                OperatorSpec::lagrangian_ma(space.n).map_err(wrap)
            }
            "sym_poly" | "diagonal" | "ordered" => {
                self.only(m, &["kind", "poly"], loc)?;
                let p = self.poly(self.field(m, "poly", loc)?, &format!("{loc}.poly"))?;
                let spec = match kind {
                    "sym_poly" => OperatorSpec::sym_poly(space, p),
                    "diagonal" => OperatorSpec::diagonal_padded(&p, space.n),
                    _ => OperatorSpec::ordered(p),
                }
                .map_err(wrap)?;
                if spec.space() != space {
                    return Err(self.err(
                        loc,
                        format!("operator lives on {}, root space is {space}", spec.space()),
                    ));
                }
                Ok(spec)
            }
            "product" => {
                self.only(m, &["kind", "factors"], loc)?;
                let fs = self
                    .field(m, "factors", loc)?
                    .as_array()
                    .ok_or_else(|| self.err(&format!("{loc}.factors"), "expected an array"))?;
                let factors = fs
                    .iter()
                    .enumerate()
                    .map(|(i, f)| self.op(f, space, &format!("{loc}.factors[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                OperatorSpec::product(factors).map_err(wrap)
            }
            "directional" => {
                self.only(m, &["kind", "inner", "direction", "order"], loc)?;
                let inner =
                    self.op(self.field(m, "inner", loc)?, space, &format!("{loc}.inner"))?;
                let dir = self.matrix(
                    self.field(m, "direction", loc)?,
                    &format!("{loc}.direction"),
                )?;
                let order = self.usize_field(m, "order", loc)?;
                OperatorSpec::directional(inner, dir, order).map_err(wrap)
            }
            "compose" => {
                self.only(m, &["kind", "outer", "inner"], loc)?;
                let inner =
                    self.op(self.field(m, "inner", loc)?, space, &format!("{loc}.inner"))?;
                let outer = self.poly(self.field(m, "outer", loc)?, &format!("{loc}.outer"))?;
                OperatorSpec::compose(outer, inner).map_err(wrap)
            }
            "convex_combo" | "tensor" => {
                self.only(m, &["kind", "q", "r"], loc)?;
                let q = self.poly(self.field(m, "q", loc)?, &format!("{loc}.q"))?;
                let r = self.poly(self.field(m, "r", loc)?, &format!("{loc}.r"))?;
                let spec = if kind == "tensor" {
                    OperatorSpec::tensor(q, r)
                } else {
                    OperatorSpec::convex_combo(q, r)
                }
                .map_err(wrap)?;
                if spec.space() != space {
                    return Err(self.err(
                        loc,
                        format!("operator lives on {}, root space is {space}", spec.space()),
                    ));
                }
                Ok(spec)
            }
            other => Err(self.err(
                &format!("{loc}.kind"),
                format!("unknown operator kind `{other}`"),
            )),
        }
    }
}

/// Parses a spec from a JSON value; `file` labels error locations and
/// `base_dir` resolves `{"file": ..}` references.
pub fn spec_from_value(v: &Value, file: &str, base_dir: Option<&Path>) -> Result<OperatorSpec> {
    let ctx = Ctx {
        file,
        base_dir: base_dir.map(Path::to_path_buf),
    };
    let root = ctx.object(v, "$")?;
    ctx.only(root, &["space", "op"], "$")?;
    let space_v = ctx.field(root, "space", "$")?;
    let sm = ctx.object(space_v, "space")?;
    ctx.only(sm, &["algebra", "n"], "space")?;
    let tag = ctx
        .field(sm, "algebra", "space")?
        .as_str()
        .ok_or_else(|| ctx.err("space.algebra", "expected a string"))?;
    let algebra = Algebra::from_tag(tag)
        .ok_or_else(|| ctx.err("space.algebra", format!("unknown algebra `{tag}`")))?;
    let n = ctx.usize_field(sm, "n", "space")?;
    if n == 0 {
        return Err(ctx.err("space.n", "must be at least 1"));
    }
    let space = Space { algebra, n };
    ctx.op(ctx.field(root, "op", "$")?, space, "op")
}

pub fn spec_from_json(text: &str, file: &str, base_dir: Option<&Path>) -> Result<OperatorSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(file, e.to_string()))?;
    spec_from_value(&v, file, base_dir)
}

pub fn read_spec(path: &Path) -> Result<OperatorSpec> {
    let text = std::fs::read_to_string(path)?;
    spec_from_json(&text, &path.display().to_string(), path.parent())
}

fn node_json(spec: &OperatorSpec) -> Value {
    let poly =
        |p: &SparseSymPoly| serde_json::to_value(PolyFile::from_poly(p)).expect("poly serializes");
    match spec.node() {
        OpNode::Sigma(k) => json!({"kind": "sigma", "k": k}),
        OpNode::Det => json!({"kind": "det"}),
        OpNode::PFoldSum(p) => json!({"kind": "pfold", "p": p}),
        OpNode::LagrangianMA => json!({"kind": "lagrangian_ma"}),
        OpNode::SymPolyOfEigs(p) => json!({"kind": "sym_poly", "poly": poly(p)}),
        OpNode::DiagonalPoly(p) => json!({"kind": "diagonal", "poly": poly(p)}),
        OpNode::OrderedEigPoly(p) => json!({"kind": "ordered", "poly": poly(p)}),
        OpNode::Product(fs) => {
            json!({"kind": "product", "factors": fs.iter().map(node_json).collect::<Vec<_>>()})
        }
        OpNode::DirectionalDeriv {
            inner,
            direction,
            order,
        } => json!({
            "kind": "directional",
            "inner": node_json(inner),
            "direction": serde_json::to_value(MatrixFile::from_matrix(direction)).expect("matrix serializes"),
            "order": order,
        }),
        OpNode::Compose { outer, inner } => {
            json!({"kind": "compose", "outer": poly(outer), "inner": node_json(inner)})
        }
        OpNode::ConvexCombo { q, r, .. } => {
            json!({"kind": "convex_combo", "q": poly(q), "r": poly(r)})
        }
        OpNode::TensorProduct { q, r, .. } => json!({"kind": "tensor", "q": poly(q), "r": poly(r)}),
    }
}

pub fn spec_to_json(spec: &OperatorSpec) -> Value {
    json!({"space": {"algebra": spec.space().algebra.tag(), "n": spec.space().n}, "op": node_json(spec)})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_example() {
        let text = r#"{"space":{"algebra":"R","n":3},"op":{"kind":"product","factors":[{"kind":"sigma","k":1},{"kind":"sigma","k":2}]}}"#;
        let spec = spec_from_json(text, "p.json", None).unwrap();
        assert_eq!(spec.degree(), 3);
        let back = spec_from_value(&spec_to_json(&spec), "again", None).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn errors_carry_location() {
        let text = r#"{"space":{"algebra":"R","n":3},"op":{"kind":"product","factors":[{"kind":"sigma","k":1},{"kind":"sigma","k":9}]}}"#;
        let err = spec_from_json(text, "p.json", None)
            .unwrap_err()
            .to_string();
        assert!(err.contains("p.json: op.factors[1]"), "{err}");
        let text = r#"{"space":{"algebra":"R","n":3},"op":{"kind":"sigmoid"}}"#;
        let err = spec_from_json(text, "q.json", None)
            .unwrap_err()
            .to_string();
        assert!(err.contains("op.kind") && err.contains("sigmoid"), "{err}");
        let text = r#"{"space":{"algebra":"R","n":3},"op":{"kind":"det","extra":1}}"#;
        assert!(spec_from_json(text, "r.json", None)
            .unwrap_err()
            .to_string()
            .contains("extra"));
    }

    #[test]
    fn diagonal_with_padding() {
        let text = r#"{"space":{"algebra":"R","n":2},"op":{"kind":"diagonal","poly":{"nvars":2,"terms":[{"alpha":[2,1],"coeff":1}]}}}"#;
        let spec = spec_from_json(text, "diag.json", None).unwrap();
        assert_eq!(spec.degree(), 3);
    }
}
