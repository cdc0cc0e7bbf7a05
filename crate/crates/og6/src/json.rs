//! JSON wire formats.
//!
//! - lattice: `{"gram": [[int]], "tag": "U,U,U,-2,-2"}` (tag optional), or a
//!   string id: `"og6"`, `"u3"`, `"mukai"`, `"standard(k,m)"`;
//! - vector: `{"lattice": <id or inline>, "coords": [int]}`;
//! - isometry: `{"lattice": <id or inline>, "matrix": [[int]]}`;
//! - word: `{"atoms": [...], "lattice": <id or inline>}` with atoms
//!   `{"kind":"transvection","e":[..],"a":[..]}`,
//!   `{"kind":"reflection","D":[..]}` or
//!   `{"kind":"opaque","matrix":[[..]],"label":str}`;
//! - Mukai vector: `{"r": int, "c": [int;6], "s": int}`.
//!
//! Serialization uses decimal integers only, and `serde_json`'s default map
//! keeps keys sorted, so output is canonical.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::isometry::{Atom, Isometry, IsometryWord};
use crate::lattice::{Lattice, Summand, Vector};
use crate::matrix::IMat;
use crate::mukai::MukaiVector;

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| invalid(format!("{what}: expected an integer, got {v}")))
}

fn int_vec(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("{what}: expected an array")))?
        .iter()
        .map(|x| as_i64(x, what))
        .collect()
}

fn int_matrix(v: &Value, what: &str) -> Result<IMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| invalid(format!("{what}: expected an array of rows")))?
        .iter()
        .map(|r| int_vec(r, what))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(invalid(format!("{what}: empty matrix")));
    }
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) {
        return Err(invalid(format!("{what}: ragged matrix")));
    }
    Ok(IMat::from_rows(&rows))
}

fn matrix_value(m: &IMat) -> Value {
    Value::Array((0..m.rows).map(|i| json!(m.row(i))).collect())
}

fn tag_string(tag: &[Summand]) -> String {
    tag.iter()
        .map(|s| match s {
            Summand::U => "U".to_string(),
            Summand::MinusTwo => "-2".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_tag(s: &str) -> Result<Vec<Summand>> {
    s.split(',')
        .map(|part| match part.trim() {
            "U" => Ok(Summand::U),
            "-2" => Ok(Summand::MinusTwo),
            other => Err(invalid(format!("unknown lattice tag summand '{other}'"))),
        })
        .collect()
}

pub fn lattice_to_json(lattice: &Lattice) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("gram".to_string(), matrix_value(lattice.gram()));
    if let Some(tag) = lattice.tag() {
        obj.insert("tag".to_string(), Value::String(tag_string(tag)));
    }
    Value::Object(obj)
}

/// Accepts a string id ("og6", "u3", "mukai", "standard(k,m)") or an inline
/// `{"gram": ..., "tag": ...}` document.
pub fn lattice_from_json(v: &Value) -> Result<Arc<Lattice>> {
    if let Some(name) = v.as_str() {
        return lattice_by_name(name);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| invalid("lattice: expected a string id or an object"))?;
    let gram = int_matrix(
        obj.get("gram").ok_or_else(|| invalid("lattice: missing 'gram'"))?,
        "lattice gram",
    )?;
    match obj.get("tag") {
        None | Some(Value::Null) => Lattice::new(gram),
        Some(Value::String(s)) => Lattice::with_tag(gram, parse_tag(s)?),
        Some(other) => Err(invalid(format!("lattice tag: expected a string, got {other}"))),
    }
}

pub fn lattice_by_name(name: &str) -> Result<Arc<Lattice>> {
    match name {
        "og6" => Ok(crate::mukai::og6_lattice()),
        "u3" => Ok(crate::mukai::u3_model()),
        "mukai" => Ok(crate::mukai::mukai_lattice()),
        other => {
            if let Some(args) = other.strip_prefix("standard(").and_then(|s| s.strip_suffix(")")) {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() == 2 {
                    let k = parts[0].parse::<usize>().map_err(|_| {
                        invalid(format!("bad hyperbolic-plane count in '{other}'"))
                    })?;
                    let m = parts[1]
                        .parse::<usize>()
                        .map_err(|_| invalid(format!("bad (-2)-summand count in '{other}'")))?;
                    if k == 0 && m == 0 {
                        return Err(invalid("standard(0,0) is empty"));
                    }
                    return Ok(Lattice::standard(k, m));
                }
            }
            Err(invalid(format!(
                "unknown lattice id '{other}' (expected og6, u3, mukai or standard(k,m))"
            )))
        }
    }
}

pub fn vector_to_json(v: &Vector) -> Value {
    json!({
        "coords": v.coords(),
        "lattice": lattice_to_json(v.lattice()),
    })
}

pub fn vector_from_json(v: &Value) -> Result<Vector> {
    let obj = v.as_object().ok_or_else(|| invalid("vector: expected an object"))?;
    let lattice = lattice_from_json(
        obj.get("lattice").ok_or_else(|| invalid("vector: missing 'lattice'"))?,
    )?;
    let coords = int_vec(
        obj.get("coords").ok_or_else(|| invalid("vector: missing 'coords'"))?,
        "vector coords",
    )?;
    if coords.len() != lattice.rank() {
        return Err(invalid(format!(
            "vector has {} coordinates but the lattice has rank {}",
            coords.len(),
            lattice.rank()
        )));
    }
    Ok(lattice.vector(coords))
}

/// Parses a vector given either as a full JSON document or as bare
/// coordinates in a known lattice (CLI convenience).
pub fn vector_from_json_in(v: &Value, lattice: &Arc<Lattice>) -> Result<Vector> {
    if v.is_array() {
        let coords = int_vec(v, "vector coords")?;
        if coords.len() != lattice.rank() {
            return Err(invalid(format!(
                "vector has {} coordinates but the lattice has rank {}",
                coords.len(),
                lattice.rank()
            )));
        }
        return Ok(lattice.vector(coords));
    }
    vector_from_json(v)
}

pub fn isometry_to_json(g: &Isometry) -> Value {
    json!({
        "lattice": lattice_to_json(g.lattice()),
        "matrix": matrix_value(g.matrix()),
    })
}

pub fn isometry_from_json(v: &Value) -> Result<Isometry> {
    let obj = v.as_object().ok_or_else(|| invalid("isometry: expected an object"))?;
    let lattice = lattice_from_json(
        obj.get("lattice").ok_or_else(|| invalid("isometry: missing 'lattice'"))?,
    )?;
    let matrix = int_matrix(
        obj.get("matrix").ok_or_else(|| invalid("isometry: missing 'matrix'"))?,
        "isometry matrix",
    )?;
    Isometry::new(&lattice, matrix)
}

fn atom_to_json(atom: &Atom) -> Value {
    match atom {
        Atom::Transvection { e, a } => json!({
            "kind": "transvection",
            "e": e.coords(),
            "a": a.coords(),
        }),
        Atom::Reflection { d } => json!({
            "kind": "reflection",
            "D": d.coords(),
        }),
        Atom::Opaque { g, label } => json!({
            "kind": "opaque",
            "label": label,
            "matrix": matrix_value(g.matrix()),
        }),
    }
}

fn atom_from_json(v: &Value, lattice: &Arc<Lattice>) -> Result<Atom> {
    let obj = v.as_object().ok_or_else(|| invalid("word atom: expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("word atom: missing 'kind'"))?;
    match kind {
        "transvection" => {
            let e = int_vec(
                obj.get("e").ok_or_else(|| invalid("transvection atom: missing 'e'"))?,
                "transvection e",
            )?;
            let a = int_vec(
                obj.get("a").ok_or_else(|| invalid("transvection atom: missing 'a'"))?,
                "transvection a",
            )?;
            Ok(Atom::Transvection { e: lattice.vector(e), a: lattice.vector(a) })
        }
        "reflection" => {
            let d = int_vec(
                obj.get("D").ok_or_else(|| invalid("reflection atom: missing 'D'"))?,
                "reflection D",
            )?;
            Ok(Atom::Reflection { d: lattice.vector(d) })
        }
        "opaque" => {
            let matrix = int_matrix(
                obj.get("matrix").ok_or_else(|| invalid("opaque atom: missing 'matrix'"))?,
                "opaque matrix",
            )?;
            let label = obj
                .get("label")
                .and_then(Value::as_str)
                .unwrap_or("opaque")
                .to_string();
            Ok(Atom::Opaque { g: Isometry::new(lattice, matrix)?, label })
        }
        other => Err(invalid(format!("unknown word atom kind '{other}'"))),
    }
}

pub fn word_to_json(word: &IsometryWord) -> Value {
    json!({
        "atoms": word.atoms.iter().map(atom_to_json).collect::<Vec<_>>(),
        "lattice": lattice_to_json(word.lattice()),
    })
}

pub fn word_from_json(v: &Value) -> Result<IsometryWord> {
    let obj = v.as_object().ok_or_else(|| invalid("word: expected an object"))?;
    let lattice = lattice_from_json(
        obj.get("lattice").ok_or_else(|| invalid("word: missing 'lattice'"))?,
    )?;
    let atoms = obj
        .get("atoms")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("word: missing 'atoms' array"))?
        .iter()
        .map(|a| atom_from_json(a, &lattice))
        .collect::<Result<Vec<_>>>()?;
    IsometryWord::new(&lattice, atoms)
}

pub fn mukai_to_json(v: &MukaiVector) -> Value {
    json!({
        "r": v.r,
        "c": v.c.coords(),
        "s": v.s,
    })
}

pub fn mukai_from_json(v: &Value) -> Result<MukaiVector> {
    let obj = v.as_object().ok_or_else(|| invalid("mukai vector: expected an object"))?;
    let r = as_i64(obj.get("r").ok_or_else(|| invalid("mukai vector: missing 'r'"))?, "r")?;
    let s = as_i64(obj.get("s").ok_or_else(|| invalid("mukai vector: missing 's'"))?, "s")?;
    let c = int_vec(obj.get("c").ok_or_else(|| invalid("mukai vector: missing 'c'"))?, "c")?;
    let c: [i64; 6] =
        c.try_into().map_err(|_| invalid("mukai vector: 'c' must have 6 entries"))?;
    Ok(MukaiVector::from_coords(r, c, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::transvection;
    use crate::mukai::og6_lattice;

    #[test]
    fn lattice_roundtrip() {
        let l = og6_lattice();
        let v = lattice_to_json(&l);
        let back = lattice_from_json(&v).unwrap();
        assert_eq!(*back, *l);
        assert_eq!(back.tag(), l.tag());
        let by_name = lattice_from_json(&Value::String("og6".into())).unwrap();
        assert_eq!(*by_name, *l);
        let std21 = lattice_from_json(&Value::String("standard(2,1)".into())).unwrap();
        assert_eq!(std21.rank(), 5);
        assert!(lattice_from_json(&Value::String("nope".into())).is_err());
    }

    #[test]
    fn vector_roundtrip() {
        let l = og6_lattice();
        let v = l.vector(vec![1, -2, 3, 0, 0, 0, 1, 1]);
        let back = vector_from_json(&vector_to_json(&v)).unwrap();
        assert_eq!(back.coords(), v.coords());
        let bare = vector_from_json_in(&json!([1, -2, 3, 0, 0, 0, 1, 1]), &l).unwrap();
        assert_eq!(bare.coords(), v.coords());
        assert!(vector_from_json_in(&json!([1, 2]), &l).is_err());
    }

    #[test]
    fn isometry_and_word_roundtrip() {
        let l = og6_lattice();
        let e = l.basis_vector(0);
        let a = l.basis_vector(2);
        let t = transvection(&e, &a).unwrap();
        let g2 = isometry_from_json(&isometry_to_json(&t)).unwrap();
        assert_eq!(g2.matrix(), t.matrix());
        let word = IsometryWord::new(
            &l,
            vec![
                Atom::Transvection { e: e.clone(), a: a.clone() },
                Atom::Reflection { d: l.basis_vector(7) },
                Atom::Opaque { g: t.clone(), label: "sample".into() },
            ],
        )
        .unwrap();
        let back = word_from_json(&word_to_json(&word)).unwrap();
        assert_eq!(back.atoms.len(), 3);
        assert_eq!(
            back.evaluate().unwrap().matrix(),
            word.evaluate().unwrap().matrix()
        );
    }

    #[test]
    fn mukai_roundtrip() {
        let v = MukaiVector::from_coords(2, [1, 0, -1, 3, 0, 0], -2);
        let back = mukai_from_json(&mukai_to_json(&v)).unwrap();
        assert_eq!((back.r, back.c.coords(), back.s), (v.r, v.c.coords(), v.s));
        assert!(mukai_from_json(&json!({"r": 1, "c": [1, 2], "s": 0})).is_err());
    }

    #[test]
    fn canonical_key_order() {
        let l = og6_lattice();
        let s = serde_json::to_string(&vector_to_json(&l.basis_vector(0))).unwrap();
        // Keys are emitted sorted: "coords" before "lattice".
        assert!(s.find("coords").unwrap() < s.find("lattice").unwrap());
    }
}
