//! Algebra documents:
//!
//! ```json
//! { "brackets": [ { "i": 1, "j": 2, "terms": { "3": "1/1" } } ],
//!   "dim": 3, "name": "su2", "signature": [1, 1, 1] }
//! ```
//!
//! Indices are 1-based, only `i < j` is stored, and every coefficient is a
//! canonical element of `Q(√2)`: `p/q`, `r/s*sqrt2` or `p/q+r/s*sqrt2`.
//! Writing then reading a document reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{MetricLieAlgebra, MetricSignature};
use crate::error::{GeoError, Result};
use crate::scalar::{Exact, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketDoc {
    pub i: usize,
    pub j: usize,
    pub terms: BTreeMap<String, String>,
}

/// Field order is alphabetical so serialization emits sorted keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub brackets: Vec<BracketDoc>,
    pub dim: usize,
    pub name: String,
    pub signature: Vec<i8>,
}

fn format_err(path: impl Into<String>, message: impl Into<String>) -> GeoError {
    GeoError::Format { path: path.into(), message: message.into() }
}

pub fn to_doc(alg: &MetricLieAlgebra<Exact>) -> AlgebraDoc {
    let mut by_pair: BTreeMap<(usize, usize), BTreeMap<String, String>> = BTreeMap::new();
    for (i, j, k, c) in alg.nonzero_constants() {
        if i < j {
            by_pair.entry((i + 1, j + 1)).or_default().insert((k + 1).to_string(), c.render());
        }
    }
    AlgebraDoc {
        brackets: by_pair.into_iter().map(|((i, j), terms)| BracketDoc { i, j, terms }).collect(),
        dim: alg.dim(),
        name: alg.name().to_string(),
        signature: alg.signature().signs().to_vec(),
    }
}

pub fn from_doc(doc: &AlgebraDoc) -> Result<MetricLieAlgebra<Exact>> {
    let d = doc.dim;
    if d == 0 {
        return Err(format_err("dim", "must be positive"));
    }
    if doc.signature.len() != d {
        return Err(format_err("signature", format!("expected {d} entries, found {}", doc.signature.len())));
    }
    let signature = MetricSignature::new(doc.signature.clone()).map_err(|e| format_err("signature", e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut entries = Vec::new();
    for (b, br) in doc.brackets.iter().enumerate() {
        let at = |field: &str| format!("brackets[{b}].{field}");
        for (field, v) in [("i", br.i), ("j", br.j)] {
            if v < 1 || v > d {
                return Err(format_err(at(field), format!("index {v} outside 1..={d}")));
            }
        }
        if br.i >= br.j {
            return Err(format_err(at("j"), format!("requires i < j, got i = {}, j = {}", br.i, br.j)));
        }
        if !seen.insert((br.i, br.j)) {
            return Err(format_err(at("i"), format!("pair ({}, {}) listed twice", br.i, br.j)));
        }
        for (k, value) in &br.terms {
            let path = at(&format!("terms.{k}"));
            let kk: usize = k.parse().map_err(|_| format_err(&path, "key is not an index"))?;
            if kk < 1 || kk > d || k != &kk.to_string() {
                return Err(format_err(&path, format!("index outside 1..={d}")));
            }
            let c: Exact = value.parse().map_err(|e: GeoError| format_err(&path, e.to_string()))?;
            entries.push((br.i - 1, br.j - 1, kk - 1, c));
        }
    }
    MetricLieAlgebra::from_brackets(&doc.name, signature, entries)
}

/// Pretty JSON with a trailing newline.
pub fn write_algebra(alg: &MetricLieAlgebra<Exact>) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(alg)).expect("plain data");
    s.push('\n');
    s
}

pub fn read_algebra(text: &str) -> Result<MetricLieAlgebra<Exact>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: AlgebraDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format_err(if path.is_empty() { "$".to_string() } else { path }, e.inner().to_string())
    })?;
    from_doc(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn su2_document() {
        let text = write_algebra(&catalog::su2());
        let expected = r#"{
  "brackets": [
    {
      "i": 1,
      "j": 2,
      "terms": {
        "3": "1/1"
      }
    },
    {
      "i": 1,
      "j": 3,
      "terms": {
        "2": "-1/1"
      }
    },
    {
      "i": 2,
      "j": 3,
      "terms": {
        "1": "1/1"
      }
    }
  ],
  "dim": 3,
  "name": "su2",
  "signature": [
    1,
    1,
    1
  ]
}
"#;
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        for id in ["oscillator:m=2", "sl2r", "product", "su2:scale=2", "euclidean:n=2"] {
            let alg = catalog::algebra_by_id(id).unwrap();
            let text = write_algebra(&alg);
            let back = read_algebra(&text).unwrap();
            assert_eq!(write_algebra(&back), text, "{id}");
            assert_eq!(back.nonzero_constants(), alg.nonzero_constants());
        }
    }

    #[test]
    fn non_canonical_input_is_canonicalized() {
        let text = r#"{"name":"x","dim":3,"signature":[1,1,1],
            "brackets":[{"i":1,"j":2,"terms":{"3":"2/2"}},{"i":2,"j":3,"terms":{"1":"1"}},{"i":1,"j":3,"terms":{"2":"-3/3"}}]}"#;
        let alg = read_algebra(text).unwrap();
        assert_eq!(write_algebra(&alg), write_algebra(&catalog::su2().with_name("x")));
    }

    #[test]
    fn errors_carry_paths() {
        let cases = [
            (r#"{"name":"x","dim":2,"signature":[1,1],"brackets":[],"extra":1}"#, "extra"),
            (r#"{"name":"x","dim":2,"signature":[1,1],"brackets":[{"i":1,"j":"2","terms":{}}]}"#, "brackets[0].j"),
            (r#"{"name":"x","dim":2,"signature":[1,1],"brackets":[{"i":2,"j":1,"terms":{}}]}"#, "brackets[0].j"),
            (r#"{"name":"x","dim":2,"signature":[1,1],"brackets":[{"i":1,"j":2,"terms":{"3":"1/1"}}]}"#, "brackets[0].terms.3"),
            (r#"{"name":"x","dim":2,"signature":[1,1],"brackets":[{"i":1,"j":2,"terms":{"1":"1/0"}}]}"#, "brackets[0].terms.1"),
            (r#"{"name":"x","dim":2,"signature":[1],"brackets":[]}"#, "signature"),
            (r#"{"name":"x","dim":3,"signature":[1,-1,-1],"brackets":[]}"#, "signature"),
        ];
        for (text, path) in cases {
            match read_algebra(text) {
                Err(GeoError::Format { path: p, .. }) => assert_eq!(p, path, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
