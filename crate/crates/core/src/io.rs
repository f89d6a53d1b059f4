//! JSON and CSV encodings of matrices.
//!
//! Exact matrices use fraction strings:
//! `{"kind":"exact","rows":2,"cols":2,"data":[["0","1/2"],["0","0"]]}`.
//! Float matrices use JSON numbers and may also be read from CSV.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixValue};
use crate::scalar::{parse_rational, Rational};

pub fn matrix_to_json(m: &MatrixValue) -> Value {
    match m {
        MatrixValue::Exact(m) => {
            let data: Vec<Vec<String>> = (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect();
            json!({"kind": "exact", "rows": m.rows(), "cols": m.cols(), "data": data})
        }
        MatrixValue::Float(m) => {
            let data: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
            json!({"kind": "float", "rows": m.rows(), "cols": m.cols(), "data": data})
        }
    }
}

pub fn matrix_from_json(v: &Value) -> Result<MatrixValue> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("matrix must be a JSON object".into()))?;
    let kind = obj.get("kind").and_then(Value::as_str).unwrap_or("exact");
    let dim = |key: &str| -> Result<usize> {
        obj.get(key)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Parse(format!("matrix is missing integer field {key:?}")))
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix is missing \"data\"".into()))?;
    if data.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rows, got {}", data.len())));
    }
    let cells = data.iter().enumerate().map(|(i, row)| {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
        Ok(row)
    });
    match kind {
        "exact" => {
            let mut out = Vec::with_capacity(rows * cols);
            for row in cells {
                for cell in row? {
                    out.push(match cell {
                        Value::String(s) => parse_rational(s)?,
                        Value::Number(n) if n.is_i64() => Rational::from_integer(n.as_i64().unwrap_or(0).into()),
                        other => return Err(Error::Parse(format!("exact entries must be fraction strings, got {other}"))),
                    });
                }
            }
            Matrix::new(rows, cols, out).map(MatrixValue::Exact)
        }
        "float" => {
            let mut out = Vec::with_capacity(rows * cols);
            for row in cells {
                for cell in row? {
                    let x = cell.as_f64().ok_or_else(|| Error::Parse(format!("float entries must be numbers, got {cell}")))?;
                    out.push(x);
                }
            }
            Matrix::new(rows, cols, out).map(MatrixValue::Float)
        }
        other => Err(Error::Parse(format!("unknown matrix kind {other:?}"))),
    }
}

/// Reads a float matrix from comma-separated rows.
pub fn matrix_from_csv(text: &str) -> Result<MatrixValue> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(rows).map(MatrixValue::Float)
}

/// Parses a matrix file: JSON when it looks like an object, CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<MatrixValue> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        matrix_from_json(&v)
    } else {
        matrix_from_csv(text)
    }
}

impl Serialize for MatrixValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        matrix_from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn exact_json_layout() {
        let m = Matrix::from_rows(vec![vec![int(0), rat(1, 2)], vec![int(0), int(0)]]).unwrap();
        let s = serde_json::to_string(&MatrixValue::Exact(m.clone())).unwrap();
        assert_eq!(s, r#"{"cols":2,"data":[["0","1/2"],["0","0"]],"kind":"exact","rows":2}"#);
        assert_eq!(parse_matrix(&s).unwrap(), MatrixValue::Exact(m));
    }

    #[test]
    fn float_json_and_csv() {
        let v = parse_matrix(r#"{"kind":"float","rows":1,"cols":2,"data":[[0.5, 2]]}"#).unwrap();
        assert_eq!(v, MatrixValue::Float(Matrix::from_rows(vec![vec![0.5, 2.0]]).unwrap()));
        assert_eq!(parse_matrix("0.5, 2\n").unwrap(), v);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_matrix(r#"{"kind":"exact","rows":1,"cols":2,"data":[["1"]]}"#).is_err());
        assert!(parse_matrix(r#"{"kind":"exact","rows":1,"cols":1,"data":[["1/0"]]}"#).is_err());
        assert!(parse_matrix(r#"{"kind":"exact","rows":1,"cols":1,"data":[[0.5]]}"#).is_err());
        assert!(parse_matrix(r#"{"kind":"weird","rows":0,"cols":0,"data":[]}"#).is_err());
        assert!(parse_matrix("1,2\n3").is_err());
    }
}
