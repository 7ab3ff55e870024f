//! The on-disk algebra document: a JSON object with the ground field,
//! dimension, optional unit index, basis labels, and the multiplication
//! table as a dim x dim array of sparse {index: coefficient} maps.
//! Associativity is validated on load.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::label::Label;
use crate::linalg::{Basis, SparseVec};

use super::Algebra;

/// Raw algebra document as parsed from JSON.
#[derive(Debug, Deserialize)]
pub struct AlgebraDoc {
    pub field: FieldSpec,
    pub dim: usize,
    #[serde(default)]
    pub unital: Option<usize>,
    pub basis: Vec<String>,
    pub table: Vec<Vec<BTreeMap<String, serde_json::Value>>>,
}

fn coeff_from_value(f: &FieldSpec, v: &serde_json::Value) -> Result<crate::field::Scalar> {
    match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::Parse(format!("coefficient {n} is not an integer")))?;
            Ok(f.from_i64(i))
        }
        serde_json::Value::String(s) => f.parse_scalar(s),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

/// Parse and validate an algebra from JSON text.
pub fn parse_algebra(text: &str) -> Result<Arc<Algebra>> {
    let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    if let FieldSpec::PrimeField(p) = doc.field {
        // re-validate through the checked constructor
        FieldSpec::prime_field(p)?;
    }
    if doc.basis.len() != doc.dim {
        return Err(Error::Validation(format!(
            "field 'basis' has {} labels but dim = {}",
            doc.basis.len(),
            doc.dim
        )));
    }
    if doc.table.len() != doc.dim {
        return Err(Error::Validation(format!(
            "field 'table' has {} rows but dim = {}",
            doc.table.len(),
            doc.dim
        )));
    }
    for (i, row) in doc.table.iter().enumerate() {
        if row.len() != doc.dim {
            return Err(Error::Validation(format!(
                "field 'table[{i}]' has {} entries but dim = {}",
                row.len(),
                doc.dim
            )));
        }
    }
    let labels: Vec<Label> = doc.basis.iter().map(|s| Label::atom(s)).collect();
    let mut table = vec![vec![SparseVec::new(); doc.dim]; doc.dim];
    for (i, row) in doc.table.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let mut v = SparseVec::new();
            for (key, raw) in cell {
                let idx: usize = key.parse().map_err(|_| {
                    Error::Parse(format!("table[{i}][{j}]: bad index key {key:?}"))
                })?;
                if idx >= doc.dim {
                    return Err(Error::Validation(format!(
                        "table[{i}][{j}]: index {idx} out of range"
                    )));
                }
                v.add_entry(idx, coeff_from_value(&doc.field, raw)?);
            }
            table[i][j] = v;
        }
    }
    let alg = Algebra::new(doc.field, Basis::new(labels), table, doc.unital)?;
    Ok(Arc::new(alg))
}

/// Load an algebra file from disk.
pub fn load_algebra(path: &Path) -> Result<Arc<Algebra>> {
    let text = std::fs::read_to_string(path)?;
    parse_algebra(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ground_field() {
        let a = parse_algebra(
            r#"{"field":"Q","dim":1,"unital":0,"basis":["e"],"table":[[{"0":1}]]}"#,
        )
        .unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.unital(), Some(0));
    }

    #[test]
    fn parse_fp_and_fractions() {
        let a = parse_algebra(
            r#"{"field":{"Fp":5},"dim":1,"basis":["e"],"table":[[{"0":"3"}]]}"#,
        )
        .unwrap();
        assert_eq!(a.field(), FieldSpec::PrimeField(5));
        let b = parse_algebra(
            r#"{"field":"Q","dim":1,"basis":["x"],"table":[[{"0":"1/2"}]]}"#,
        )
        .unwrap();
        assert_eq!(b.dim(), 1);
        // composite modulus is rejected
        let c = parse_algebra(
            r#"{"field":{"Fp":6},"dim":1,"basis":["e"],"table":[[{"0":1}]]}"#,
        );
        assert!(c.is_err());
    }

    #[test]
    fn non_associative_reports_triple() {
        // x*x = y, x*y = x is not associative: (xx)y=xy=x vs x(xy)=xx=y
        let e = parse_algebra(
            r#"{"field":"Q","dim":2,"basis":["x","y"],
                "table":[[{"1":1},{"0":1}],[{},{}]]}"#,
        );
        match e {
            Err(Error::Validation(msg)) => assert!(msg.contains("triple")),
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_has_location() {
        let e = parse_algebra("{ not json");
        match e {
            Err(Error::Parse(msg)) => assert!(msg.contains("line")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
