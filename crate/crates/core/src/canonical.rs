//! Diff-stable JSON: sorted keys, floats rounded to 12 significant digits,
//! two-space indentation and a trailing newline.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits; `-0` becomes `0`.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let text = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    text.parse().expect("formatted float parses")
}

/// Sorts object keys and rounds every non-integer number.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonicalize(v))).collect::<Map<_, _>>())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            if x.fract() == 0.0 && x.abs() < 1e15 {
                Value::Number(Number::from(x as i64))
            } else {
                Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
            }
        }
        other => other,
    }
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&canonicalize(serde_json::to_value(value)?))?;
    text.push('\n');
    Ok(text)
}
