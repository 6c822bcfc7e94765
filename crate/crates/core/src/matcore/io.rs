//! Matrix file formats: JSON ({"dim": d, "rows": [[...], ...]}) and flat
//! CSV (d rows of d comma-separated values). Serialization prints 17
//! significant digits so that every f64 round-trips exactly.

use super::dense::SquareMatrix;
use crate::error::{Error, Result};

/// Formats one f64 with 17 significant digits in scientific notation.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes to the matrix JSON schema.
pub fn to_json(m: &SquareMatrix) -> String {
    let d = m.dim();
    let mut out = String::with_capacity(32 * d * d);
    out.push_str(&format!("{{\"dim\":{d},\"rows\":["));
    for i in 0..d {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..d {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_f64(m[(i, j)]));
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

/// Serializes to flat CSV.
pub fn to_csv(m: &SquareMatrix) -> String {
    let d = m.dim();
    let mut out = String::new();
    for i in 0..d {
        let row: Vec<String> = (0..d).map(|j| format_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses the matrix JSON schema.
pub fn from_json(text: &str) -> Result<SquareMatrix> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::DimensionMismatch(format!("JSON parse error: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::DimensionMismatch("top-level JSON value must be an object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::DimensionMismatch("missing integer field \"dim\"".into()))?
        as usize;
    let rows = obj
        .get("rows")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::DimensionMismatch("missing array field \"rows\"".into()))?;
    if rows.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "\"rows\" has {} rows, \"dim\" says {dim}",
            rows.len()
        )));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| {
            Error::DimensionMismatch(format!("row {i} is not an array of numbers"))
        })?;
        if row.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for v in row {
            data.push(v.as_f64().ok_or_else(|| {
                Error::DimensionMismatch(format!("row {i} contains a non-numeric entry"))
            })?);
        }
    }
    SquareMatrix::new(dim, data)
}

/// Parses flat CSV.
pub fn from_csv(text: &str) -> Result<SquareMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::DimensionMismatch(format!(
                    "CSV parse error at line {}, field {}: {field:?}",
                    lineno + 1,
                    col + 1
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    SquareMatrix::from_rows(&rows)
}

/// Dispatches on content: leading '{' means JSON, anything else CSV.
pub fn from_str_auto(text: &str) -> Result<SquareMatrix> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_csv(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_is_exact() {
        let m = SquareMatrix::from_rows(&[
            vec![0.1, 0.2 + 1e-17, 0.7],
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![0.0, 1e-300, 1.0],
        ])
        .unwrap();
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let m = SquareMatrix::from_rows(&[vec![0.25, 0.75], vec![std::f64::consts::PI, -1.5]])
            .unwrap();
        let back = from_csv(&to_csv(&m)).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_errors_are_descriptive() {
        assert!(from_json("not json").is_err());
        assert!(from_json("{\"dim\":2,\"rows\":[[1,0]]}").is_err());
        assert!(from_json("{\"rows\":[[1,0],[0,1]]}").is_err());
    }
}
