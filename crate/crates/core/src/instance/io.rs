//! JSON instance format.
//!
//! ```json
//! {
//!   "name": "packing_tight-3",
//!   "sense": "MAX",
//!   "objective": ["1", "1"],
//!   "rows": [{"coeffs": ["1", "3"], "relation": "LE", "rhs": "3"}],
//!   "upper": ["inf", 4]
//! }
//! ```
//!
//! Rationals are strings `"p/q"` or `"p"` (bare JSON integers are also
//! accepted). Upper bounds are non-negative integers or `"inf"`.

use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::{IlpInstance, LinearConstraint, Relation, Sense};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn perr(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| perr(format!("{path}.{key}"), "missing field"))
}

fn rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => s
            .parse()
            .map_err(|_| perr(path, format!("invalid rational {s:?}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_int(n.as_i64().unwrap())),
        Value::Number(n) if n.is_u64() => Ok(Rational::from_integer(&BigInt::from(
            n.as_u64().unwrap(),
        ))),
        other => Err(perr(path, format!("expected a rational, found {other}"))),
    }
}

fn rational_vec(v: &Value, path: &str) -> Result<Vec<Rational>> {
    let arr = v
        .as_array()
        .ok_or_else(|| perr(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| rational(x, &format!("{path}[{i}]")))
        .collect()
}

fn upper_bound(v: &Value, path: &str) -> Result<Option<BigInt>> {
    if v.as_str() == Some("inf") {
        return Ok(None);
    }
    let r = rational(v, path)?;
    if !r.is_integer() {
        return Err(Error::Validation(format!(
            "{path}: finite upper bound {r} is not an integer"
        )));
    }
    if r.is_negative() {
        return Err(Error::Validation(format!(
            "{path}: upper bound {r} is negative"
        )));
    }
    Ok(Some(r.floor()))
}

/// Parses an instance from JSON text and validates it.
pub fn from_json(text: &str) -> Result<IlpInstance> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        perr(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| perr("$", "expected an object"))?;
    let name = field(obj, "name", "$")?
        .as_str()
        .ok_or_else(|| perr("$.name", "expected a string"))?
        .to_string();
    let sense = match field(obj, "sense", "$")?.as_str() {
        Some("MAX") => Sense::Max,
        Some("MIN") => Sense::Min,
        _ => return Err(perr("$.sense", "expected \"MAX\" or \"MIN\"")),
    };
    let objective = rational_vec(field(obj, "objective", "$")?, "$.objective")?;
    let rows_v = field(obj, "rows", "$")?
        .as_array()
        .ok_or_else(|| perr("$.rows", "expected an array"))?;
    let mut rows = Vec::with_capacity(rows_v.len());
    for (i, r) in rows_v.iter().enumerate() {
        let path = format!("$.rows[{i}]");
        let ro = r
            .as_object()
            .ok_or_else(|| perr(&path, "expected an object"))?;
        let coeffs = rational_vec(field(ro, "coeffs", &path)?, &format!("{path}.coeffs"))?;
        let relation = match field(ro, "relation", &path)?.as_str() {
            Some("LE") => Relation::Le,
            Some("GE") => Relation::Ge,
            Some("EQ") => Relation::Eq,
            _ => {
                return Err(perr(
                    format!("{path}.relation"),
                    "expected \"LE\", \"GE\" or \"EQ\"",
                ))
            }
        };
        let rhs = rational(field(ro, "rhs", &path)?, &format!("{path}.rhs"))?;
        rows.push(LinearConstraint::new(coeffs, relation, rhs));
    }
    let upper = match obj.get("upper") {
        None => vec![None; objective.len()],
        Some(v) => v
            .as_array()
            .ok_or_else(|| perr("$.upper", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(j, x)| upper_bound(x, &format!("$.upper[{j}]")))
            .collect::<Result<_>>()?,
    };
    IlpInstance::new(name, sense, objective, rows, upper)
}

/// Canonical JSON text for an instance.
pub fn to_json(inst: &IlpInstance) -> String {
    let strs = |v: &[Rational]| v.iter().map(|r| Value::String(r.to_string())).collect::<Vec<_>>();
    let rows: Vec<Value> = inst
        .rows
        .iter()
        .map(|r| {
            json!({
                "coeffs": strs(&r.coeffs),
                "relation": match r.relation { Relation::Le => "LE", Relation::Ge => "GE", Relation::Eq => "EQ" },
                "rhs": r.rhs.to_string(),
            })
        })
        .collect();
    let upper: Vec<Value> = inst
        .upper
        .iter()
        .map(|u| match u {
            None => Value::String("inf".into()),
            Some(v) => match i64::try_from(v) {
                Ok(small) => json!(small),
                Err(_) => Value::String(v.to_string()),
            },
        })
        .collect();
    let doc = json!({
        "name": inst.name,
        "sense": match inst.sense { Sense::Max => "MAX", Sense::Min => "MIN" },
        "objective": strs(&inst.objective),
        "rows": rows,
        "upper": upper,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
    s.push('\n');
    s
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<IlpInstance> {
    let text = std::fs::read_to_string(path.as_ref())?;
    from_json(&text)
}

pub fn write_instance(inst: &IlpInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), to_json(inst))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_family, Family, InstanceClass};

    #[test]
    fn round_trip_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pt.json");
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        write_instance(&inst, &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), inst);
        let cov = gen_family(Family::CgVsKc, 4).unwrap();
        assert_eq!(from_json(&to_json(&cov)).unwrap(), cov);
    }

    #[test]
    fn fractional_upper_rejected() {
        let text = r#"{"name":"f","sense":"MAX","objective":["1"],
            "rows":[{"coeffs":["1"],"relation":"LE","rhs":"5/2"}],"upper":["3/2"]}"#;
        match from_json(text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("upper[0]"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eq_negative_rows_are_general() {
        let text = r#"{"name":"g","sense":"MAX","objective":["1","1"],
            "rows":[{"coeffs":["2","-3"],"relation":"EQ","rhs":"1"}],"upper":["inf","inf"]}"#;
        assert_eq!(from_json(text).unwrap().classify().unwrap(), InstanceClass::General);
    }

    #[test]
    fn errors_carry_locations() {
        match from_json("{\n \"name\": \"x\",\n oops }") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
        let text = r#"{"name":"g","sense":"MAX","objective":["1"],
            "rows":[{"coeffs":["x"],"relation":"LE","rhs":"1"}]}"#;
        match from_json(text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "$.rows[0].coeffs[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
