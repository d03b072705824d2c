//! Canonical JSON: object keys sorted, floats rounded to 6 significant
//! digits, two-space indentation, trailing newline. Equal values always
//! produce identical bytes.

use serde::Serialize;
use serde_json::{Number, Value};

/// Rounds to 6 significant digits. Idempotent: `round_sig6(round_sig6(x)) == round_sig6(x)`.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Rounds every float in the tree.
pub fn quantize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig6(n.as_f64().expect("f64 number"));
            *n = Number::from_f64(x).unwrap_or_else(|| Number::from(0));
        }
        Value::Array(items) => items.iter_mut().for_each(quantize),
        Value::Object(map) => map.values_mut().for_each(quantize),
        _ => {}
    }
}

pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    quantize(&mut v);
    Ok(v)
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let v = to_canonical_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

/// Single-line canonical form, used for hashing.
pub fn to_canonical_compact<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let v = to_canonical_value(value)?;
    let mut out = String::new();
    write_compact(&v, &mut out);
    Ok(out)
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_scalar(v: &Value, out: &mut String) {
    out.push_str(&serde_json::to_string(v).expect("scalar serializes"));
}

fn sorted_entries(map: &serde_json::Map<String, Value>) -> Vec<(&String, &Value)> {
    let mut entries: Vec<_> = map.iter().collect();
    entries.sort_by(|a, b| a.0.cmp(b.0));
    entries
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(item, level + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            let entries = sorted_entries(map);
            for (i, (k, item)) in entries.iter().enumerate() {
                indent(level + 1, out);
                write_scalar(&Value::String((*k).clone()), out);
                out.push_str(": ");
                write_value(item, level + 1, out);
                if i + 1 < entries.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(level, out);
            out.push('}');
        }
        Value::Array(_) => out.push_str("[]"),
        Value::Object(_) => out.push_str("{}"),
        scalar => write_scalar(scalar, out),
    }
}

fn write_compact(v: &Value, out: &mut String) {
    match v {
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_compact(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in sorted_entries(map).into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_scalar(&Value::String(k.clone()), out);
                out.push(':');
                write_compact(item, out);
            }
            out.push('}');
        }
        scalar => write_scalar(scalar, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_rounding() {
        let v = json!({"b": 2.0 / 3.0, "a": [1, {"z": null, "y": true}], "c": {}});
        assert_eq!(
            to_canonical_compact(&v).unwrap(),
            r#"{"a":[1,{"y":true,"z":null}],"b":0.666667,"c":{}}"#
        );
        let pretty = to_canonical_string(&v).unwrap();
        assert!(pretty.starts_with("{\n  \"a\": [\n    1,"));
        assert!(pretty.ends_with("}\n"));
        let back: Value = serde_json::from_str(&pretty).unwrap();
        assert_eq!(back, to_canonical_value(&v).unwrap());
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_sig6(0.123_456_789), 0.123_457);
        assert_eq!(round_sig6(1.0), 1.0);
        assert_eq!(round_sig6(123_456_789.0), 123_457_000.0);
        assert_eq!(round_sig6(-0.0), 0.0);
    }

    proptest! {
        #[test]
        fn rounding_is_idempotent_and_survives_json(x in -1e9f64..1e9) {
            let r = round_sig6(x);
            prop_assert_eq!(round_sig6(r), r);
            let text = serde_json::to_string(&r).unwrap();
            prop_assert_eq!(serde_json::from_str::<f64>(&text).unwrap(), r);
        }
    }
}
