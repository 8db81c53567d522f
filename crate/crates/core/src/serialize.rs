//! Canonical JSON artifacts: lattices, sublattices, and the certified model,
//! with SHA-256 digests over the canonical byte form.
//!
//! Rationals are encoded as `"p/q"` strings (plain integers without the
//! slash), Gram entries as JSON integers, and objects always serialize with
//! sorted keys, so equal values produce identical bytes on every platform.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exact::{parse_rat, rat_to_string, Int, Rat};
use crate::kummer::{build_mukai_model, KummerModel};
use crate::lattice::{IntegerLattice, Sublattice};
use crate::mat::{IMat, QMat};

pub const MODEL_FORMAT: &str = "kummerlat-model";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("digest mismatch: expected {expected}, got {actual}")]
    DigestMismatch { expected: String, actual: String },
}

fn schema(msg: impl Into<String>) -> SerializeError {
    SerializeError::SchemaError(msg.into())
}

/// Canonical byte form: compact separators, keys sorted (the default map
/// representation is ordered), no floating-point values anywhere.
pub fn canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("tree of strings and integers")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn value_digest(v: &Value) -> String {
    sha256_hex(canonical_string(v).as_bytes())
}

/// Fail with [`SerializeError::DigestMismatch`] unless the value hashes to
/// `expected`.
pub fn check_expected_digest(v: &Value, expected: &str) -> Result<(), SerializeError> {
    let actual = value_digest(v);
    if actual != expected {
        return Err(SerializeError::DigestMismatch {
            expected: expected.to_string(),
            actual,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar helpers

fn int_to_json(x: &Int) -> Result<Value, SerializeError> {
    let small = i64::try_from(x).map_err(|_| schema("integer exceeds the JSON range"))?;
    Ok(Value::from(small))
}

fn json_to_int(v: &Value) -> Result<Int, SerializeError> {
    v.as_i64()
        .map(Int::from)
        .ok_or_else(|| schema("expected an integer"))
}

fn rat_to_json(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn json_to_rat(v: &Value) -> Result<Rat, SerializeError> {
    let s = v
        .as_str()
        .ok_or_else(|| schema("expected a rational string"))?;
    parse_rat(s).ok_or_else(|| schema(format!("malformed rational {s:?}")))
}

pub fn rvec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

pub fn rvec_from_json(v: &Value) -> Result<Vec<Rat>, SerializeError> {
    v.as_array()
        .ok_or_else(|| schema("expected an array of rationals"))?
        .iter()
        .map(json_to_rat)
        .collect()
}

pub fn imat_to_json(m: &IMat) -> Result<Value, SerializeError> {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for j in 0..m.cols() {
            row.push(int_to_json(m.at(i, j))?);
        }
        rows.push(Value::Array(row));
    }
    Ok(Value::Array(rows))
}

pub fn imat_from_json(v: &Value) -> Result<IMat, SerializeError> {
    let rows = v.as_array().ok_or_else(|| schema("expected a matrix"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| schema("expected a matrix row"))?;
        out.push(
            cells
                .iter()
                .map(json_to_int)
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out[0].len()) {
        return Err(schema("matrix rows must be nonempty and equal length"));
    }
    Ok(IMat::from_rows(out))
}

pub fn qmat_to_json(m: &QMat) -> Value {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        rows.push(rvec_to_json(m.row(i)));
    }
    Value::Array(rows)
}

pub fn qmat_from_json(v: &Value) -> Result<QMat, SerializeError> {
    let rows = v.as_array().ok_or_else(|| schema("expected a matrix"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        out.push(rvec_from_json(row)?);
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out[0].len()) {
        return Err(schema("matrix rows must be nonempty and equal length"));
    }
    Ok(QMat::from_rows(out))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, SerializeError> {
    obj.get(key)
        .ok_or_else(|| schema(format!("missing field {key:?}")))
}

// ---------------------------------------------------------------------------
// Lattices

/// `{"label": str|null, "rank": n, "gram": [[int]]}`.
pub fn lattice_to_json(l: &IntegerLattice) -> Result<Value, SerializeError> {
    Ok(json!({
        "label": l.label(),
        "rank": l.rank() as u64,
        "gram": imat_to_json(l.gram())?,
    }))
}

pub fn lattice_from_json(v: &Value) -> Result<IntegerLattice, SerializeError> {
    let label = match field(v, "label")? {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        _ => return Err(schema("label must be a string or null")),
    };
    let rank = field(v, "rank")?
        .as_u64()
        .ok_or_else(|| schema("rank must be an integer"))? as usize;
    let gram = imat_from_json(field(v, "gram")?)?;
    if gram.rows() != rank || gram.cols() != rank {
        return Err(schema("gram dimensions disagree with the declared rank"));
    }
    IntegerLattice::new_degenerate_allowed(label, gram).map_err(|e| schema(e.to_string()))
}

/// The lattice document plus `{"ambient": label, "basis": [["p/q"]]}`.
pub fn sublattice_to_json(s: &Sublattice) -> Result<Value, SerializeError> {
    Ok(json!({
        "ambient": s.ambient().label(),
        "basis": qmat_to_json(s.basis()),
    }))
}

pub fn sublattice_from_json(
    v: &Value,
    ambient: Arc<IntegerLattice>,
) -> Result<Sublattice, SerializeError> {
    let label = match field(v, "ambient")? {
        Value::Null => None,
        Value::String(s) => Some(s.as_str()),
        _ => return Err(schema("ambient must be a label or null")),
    };
    if label != ambient.label() {
        return Err(schema(format!(
            "ambient label {:?} does not match the provided lattice {:?}",
            label,
            ambient.label()
        )));
    }
    let basis = qmat_from_json(field(v, "basis")?)?;
    let rows = (0..basis.rows()).map(|i| basis.row(i).to_vec()).collect();
    Sublattice::from_rows(ambient, rows).map_err(|e| schema(e.to_string()))
}

// ---------------------------------------------------------------------------
// The certified model

/// Full model document: the 24×24 generated lattice, its ambient basis, the
/// named classes, and the torus-side Gram matrices (including the rank-8
/// extended one).
pub fn model_to_json(m: &KummerModel) -> Result<Value, SerializeError> {
    let e_hats: Vec<Value> = m
        .e_hats()
        .iter()
        .map(|e| rvec_to_json(e.coords()))
        .collect();
    Ok(json!({
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "lattice": lattice_to_json(m.lattice())?,
        "basis_in_ambient": qmat_to_json(m.basis_in_ambient()),
        "named": {
            "u_hat": rvec_to_json(m.u_hat().coords()),
            "u0_hat": rvec_to_json(m.u0_hat().coords()),
            "b_z": rvec_to_json(m.b_z().coords()),
            "e_hats": Value::Array(e_hats),
        },
        "torus": {
            "h2": lattice_to_json(m.torus().h2_lattice())?,
            "mukai": lattice_to_json(m.torus().mukai_lattice())?,
        },
    }))
}

pub fn model_digest(m: &KummerModel) -> Result<String, SerializeError> {
    Ok(value_digest(&model_to_json(m)?))
}

/// Load a model document: the construction is canonical, so the loader
/// rebuilds it and demands the stored document match bit-exactly.
pub fn model_from_json(v: &Value) -> Result<KummerModel, SerializeError> {
    let format = field(v, "format")?
        .as_str()
        .ok_or_else(|| schema("format must be a string"))?;
    if format != MODEL_FORMAT {
        return Err(schema(format!("unknown format {format:?}")));
    }
    let version = field(v, "version")?
        .as_u64()
        .ok_or_else(|| schema("version must be an integer"))?;
    if version != FORMAT_VERSION {
        return Err(schema(format!("unsupported version {version}")));
    }
    let rebuilt = build_mukai_model().map_err(|e| schema(e.to_string()))?;
    let expected = model_to_json(&rebuilt)?;
    if canonical_string(&expected) != canonical_string(v) {
        return Err(schema(
            "document does not match the canonical model construction",
        ));
    }
    Ok(rebuilt)
}

/// Sorted-key object from prebuilt entries, for report assembly.
pub fn object(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, val) in entries {
        map.insert(k.to_string(), val);
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn lattice_round_trip_is_bit_exact() {
        let l = IntegerLattice::from_i64_rows("u", &[&[0, 1], &[1, 0]]).unwrap();
        let doc = lattice_to_json(&l).unwrap();
        let text = canonical_string(&doc);
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let back = lattice_from_json(&parsed).unwrap();
        let again = canonical_string(&lattice_to_json(&back).unwrap());
        assert_eq!(text, again);
        assert_eq!(back.label(), Some("u"));
        assert_eq!(value_digest(&doc), value_digest(&parsed));
    }

    #[test]
    fn lattice_schema_violations_are_reported() {
        let missing: Value = serde_json::json!({"label": "x", "rank": 2});
        assert!(matches!(
            lattice_from_json(&missing),
            Err(SerializeError::SchemaError(_))
        ));
        let bad_rank: Value = serde_json::json!({
            "label": "x", "rank": 3, "gram": [[0, 1], [1, 0]]
        });
        assert!(matches!(
            lattice_from_json(&bad_rank),
            Err(SerializeError::SchemaError(_))
        ));
        let asymmetric: Value = serde_json::json!({
            "label": "x", "rank": 2, "gram": [[0, 1], [2, 0]]
        });
        assert!(matches!(
            lattice_from_json(&asymmetric),
            Err(SerializeError::SchemaError(_))
        ));
    }

    #[test]
    fn sublattice_round_trip_checks_ambient() {
        let ambient = Arc::new(IntegerLattice::from_i64_rows("amb", &[&[2, 0], &[0, -2]]).unwrap());
        let s = Sublattice::from_rows(ambient.clone(), vec![vec![rat(1, 2), rat(1, 2)]]).unwrap();
        let doc = sublattice_to_json(&s).unwrap();
        let back = sublattice_from_json(&doc, ambient.clone()).unwrap();
        assert_eq!(
            canonical_string(&sublattice_to_json(&back).unwrap()),
            canonical_string(&doc)
        );
        let other = Arc::new(IntegerLattice::from_i64_rows("other", &[&[2]]).unwrap());
        assert!(matches!(
            sublattice_from_json(&doc, other),
            Err(SerializeError::SchemaError(_))
        ));
    }

    #[test]
    fn model_document_round_trips_with_stable_digest() {
        let m = build_mukai_model().unwrap();
        let doc = model_to_json(&m).unwrap();
        let d1 = value_digest(&doc);
        let text = canonical_string(&doc);
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let loaded = model_from_json(&parsed).unwrap();
        let d2 = model_digest(&loaded).unwrap();
        assert_eq!(d1, d2);
        // The torus block carries the rank-8 extended Gram.
        let mukai = field(&doc, "torus")
            .and_then(|t| field(t, "mukai"))
            .unwrap();
        assert_eq!(field(mukai, "rank").unwrap().as_u64(), Some(8));
    }

    #[test]
    fn digest_checks_fail_loudly() {
        let doc = serde_json::json!({"a": 1});
        let good = value_digest(&doc);
        assert!(check_expected_digest(&doc, &good).is_ok());
        assert!(matches!(
            check_expected_digest(&doc, "deadbeef"),
            Err(SerializeError::DigestMismatch { .. })
        ));
        // Any content drift changes the digest.
        let other = serde_json::json!({"a": 2});
        assert_ne!(value_digest(&other), good);
    }

    #[test]
    fn corrupted_model_document_is_rejected() {
        let m = build_mukai_model().unwrap();
        let mut doc = model_to_json(&m).unwrap();
        doc["named"]["u_hat"][0] = Value::String("7/3".into());
        assert!(matches!(
            model_from_json(&doc),
            Err(SerializeError::SchemaError(_))
        ));
        let wrong_format = serde_json::json!({"format": "other", "version": 1});
        assert!(matches!(
            model_from_json(&wrong_format),
            Err(SerializeError::SchemaError(_))
        ));
    }
}
