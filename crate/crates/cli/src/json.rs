//! Scalar and matrix encodings for reports. Floats use the shortest
//! representation that round-trips; rationals are `{"num", "den"}` pairs.

use crnlap::{Matrix, Rational};
use serde_json::{json, Value};

use crate::document::Integer;

pub trait ToJson {
    fn to_json(&self) -> Value;
}

impl ToJson for f64 {
    fn to_json(&self) -> Value {
        if *self == 0.0 {
            json!(0.0)
        } else if self.is_finite() {
            json!(self)
        } else {
            json!(self.to_string())
        }
    }
}

impl ToJson for Rational {
    fn to_json(&self) -> Value {
        json!({
            "num": Integer::from_bigint(self.numer()),
            "den": Integer::from_bigint(self.denom()),
        })
    }
}

pub fn vector<T: ToJson>(v: &[T]) -> Value {
    Value::Array(v.iter().map(ToJson::to_json).collect())
}

/// Row-major nested arrays.
pub fn matrix<T: ToJson + Clone>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| vector(m.row(r))).collect())
}

pub fn floats(v: &[f64]) -> Value {
    vector(v)
}

pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}
