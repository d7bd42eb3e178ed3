//! Matrix input formats.
//!
//! JSON (any one of):
//! * `{"rows": n, "cols": m, "angles": [[radians, ...], ...]}`
//! * `{"angles_pi": [["p/q", ...], ...]}` with entries in multiples of pi
//! * `{"signs": [[1, -1, ...], ...]}` (1 -> phase 0, -1 -> phase pi)
//!
//! Inline: rows separated by `;`, entries by `,`, each entry one of
//! `1`, `-1`, `i`, `-i`, or `e^{ip pi/q}` (e.g. `e^{i3pi/4}`, `e^{-ipi/2}`).

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::PhaseMatrix;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parse a signed rational multiple of pi given as "p/q", "p", or "0".
fn parse_pi_fraction(s: &str) -> Result<f64> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = num
        .parse()
        .map_err(|_| parse_err(format!("bad pi-fraction numerator in {s:?}")))?;
    let q: i64 = den
        .parse()
        .map_err(|_| parse_err(format!("bad pi-fraction denominator in {s:?}")))?;
    if q <= 0 {
        return Err(parse_err(format!("pi-fraction denominator must be positive in {s:?}")));
    }
    Ok(p as f64 * PI / q as f64)
}

fn rows_from_value<T, F: Fn(&Value) -> Result<T>>(v: &Value, entry: F) -> Result<Vec<Vec<T>>> {
    let arr = v.as_array().ok_or_else(|| parse_err("matrix field must be an array of rows"))?;
    if arr.is_empty() {
        return Err(parse_err("matrix must have at least one row"));
    }
    arr.iter()
        .map(|row| {
            let cells = row
                .as_array()
                .ok_or_else(|| parse_err("each matrix row must be an array"))?;
            cells.iter().map(&entry).collect()
        })
        .collect()
}

/// Parse a phase matrix from any of the supported JSON shapes.
pub fn parse_matrix_json(text: &str) -> Result<PhaseMatrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| parse_err("matrix JSON must be an object"))?;
    if let Some(angles) = obj.get("angles") {
        let rows = rows_from_value(angles, |c| {
            c.as_f64().ok_or_else(|| parse_err("angles must be numbers (radians)"))
        })?;
        let m = PhaseMatrix::from_radians(&rows)?;
        if let (Some(r), Some(c)) = (obj.get("rows"), obj.get("cols")) {
            if r.as_u64() != Some(m.rows() as u64) || c.as_u64() != Some(m.cols() as u64) {
                return Err(parse_err("declared rows/cols do not match the angle grid"));
            }
        }
        Ok(m)
    } else if let Some(fracs) = obj.get("angles_pi") {
        let rows = rows_from_value(fracs, |c| {
            let s = c
                .as_str()
                .ok_or_else(|| parse_err("angles_pi entries must be strings like \"p/q\""))?;
            parse_pi_fraction(s)
        })?;
        PhaseMatrix::from_radians(&rows)
    } else if let Some(signs) = obj.get("signs") {
        let rows = rows_from_value(signs, |c| {
            match c.as_i64() {
                Some(1) => Ok(1i8),
                Some(-1) => Ok(-1i8),
                _ => Err(parse_err("signs entries must be 1 or -1")),
            }
        })?;
        PhaseMatrix::from_signs(&rows)
    } else {
        Err(parse_err(
            "matrix JSON needs one of the fields \"angles\", \"angles_pi\", or \"signs\"",
        ))
    }
}

/// Parse one inline unit-complex literal.
fn parse_inline_entry(s: &str) -> Result<f64> {
    match s.trim() {
        "1" | "+1" => Ok(0.0),
        "-1" => Ok(PI),
        "i" | "+i" => Ok(FRAC_PI_2),
        "-i" => Ok(-FRAC_PI_2),
        t if t.starts_with("e^{") && t.ends_with('}') => {
            let inner = &t[3..t.len() - 1]; // e.g. "i3pi/4", "-ipi/2"
            let (sign, rest) = match inner.strip_prefix('-') {
                Some(r) => (-1.0, r),
                None => (1.0, inner.strip_prefix('+').unwrap_or(inner)),
            };
            let rest = rest
                .strip_prefix('i')
                .ok_or_else(|| parse_err(format!("exponent in {t:?} must be imaginary")))?;
            let (p_str, q_str) = match rest.split_once("pi") {
                Some((p, rest_q)) => {
                    let q = rest_q.strip_prefix('/').unwrap_or("1");
                    (if p.is_empty() { "1" } else { p }, q)
                }
                None => return Err(parse_err(format!("exponent in {t:?} must be a multiple of pi"))),
            };
            let p: i64 = p_str
                .parse()
                .map_err(|_| parse_err(format!("bad multiplier in {t:?}")))?;
            let q: i64 = q_str
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad divisor in {t:?}")))?;
            if q <= 0 {
                return Err(parse_err(format!("divisor must be positive in {t:?}")));
            }
            Ok(sign * p as f64 * PI / q as f64)
        }
        other => Err(parse_err(format!(
            "unrecognized entry {other:?}; expected 1, -1, i, -i, or e^{{ip pi/q}}"
        ))),
    }
}

/// Parse the inline matrix grammar: `"1,1,1;1,i,-i;1,1,i"`.
pub fn parse_inline_matrix(text: &str) -> Result<PhaseMatrix> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| row.split(',').map(parse_inline_entry).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    PhaseMatrix::from_radians(&rows)
}

/// Parse a generalized sign matrix (entries -1, 0, 1) from JSON
/// `{"signs": [[...]]}` or the inline grammar with `0` allowed.
pub fn parse_sign_matrix(text: &str) -> Result<Vec<Vec<i8>>> {
    let parse_cell = |s: &str| -> Result<i8> {
        match s.trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            "0" => Ok(0),
            other => Err(parse_err(format!("sign entries must be -1, 0, or 1, got {other:?}"))),
        }
    };
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let v: Value =
            serde_json::from_str(trimmed).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
        let signs = v
            .get("signs")
            .ok_or_else(|| parse_err("sign matrix JSON needs a \"signs\" field"))?;
        rows_from_value(signs, |c| match c.as_i64() {
            Some(x @ -1..=1) => Ok(x as i8),
            _ => Err(parse_err("signs entries must be -1, 0, or 1")),
        })
    } else {
        trimmed
            .split(';')
            .map(|row| row.split(',').map(parse_cell).collect())
            .collect()
    }
}

/// Read a phase matrix from a file (JSON formats) or parse an inline
/// literal, depending on which argument is given.
pub fn load_matrix(path: Option<&Path>, inline: Option<&str>) -> Result<PhaseMatrix> {
    match (path, inline) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p)?;
            parse_matrix_json(&text)
        }
        (None, Some(s)) => {
            if s.trim_start().starts_with('{') {
                parse_matrix_json(s)
            } else {
                parse_inline_matrix(s)
            }
        }
        _ => Err(Error::Domain(
            "provide exactly one of an input file or an inline matrix".into(),
        )),
    }
}

/// Serialize a matrix to the canonical `{"rows", "cols", "angles"}` form.
pub fn matrix_to_json(m: &PhaseMatrix) -> Value {
    let angles: Vec<Vec<f64>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.angle(i, j).value()).collect())
        .collect();
    serde_json::json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "angles": angles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_radians_roundtrip() {
        let m = parse_matrix_json(r#"{"rows":2,"cols":2,"angles":[[0.0,1.5],[3.0,0.25]]}"#).unwrap();
        assert_eq!(m.rows(), 2);
        assert!((m.angle(0, 1).value() - 1.5).abs() < 1e-12);
        let back = matrix_to_json(&m);
        let re = parse_matrix_json(&back.to_string()).unwrap();
        assert_eq!(m, re);
    }

    #[test]
    fn json_pi_fractions() {
        let m = parse_matrix_json(r#"{"angles_pi":[["0","1/2"],["-1/2","1"]]}"#).unwrap();
        assert!((m.angle(0, 1).value() - FRAC_PI_2).abs() < 1e-12);
        assert!((m.angle(1, 0).value() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!((m.angle(1, 1).value() - PI).abs() < 1e-12);
    }

    #[test]
    fn json_signs() {
        let m = parse_matrix_json(r#"{"signs":[[1,-1],[-1,1]]}"#).unwrap();
        assert_eq!(m.angle(0, 1).value(), PI);
        assert_eq!(m.angle(0, 0).value(), 0.0);
    }

    #[test]
    fn inline_literals() {
        let m = parse_inline_matrix("1,1,1;1,i,-i;1,1,i").unwrap();
        assert_eq!(m.rows(), 3);
        assert!((m.angle(1, 1).value() - FRAC_PI_2).abs() < 1e-12);
        assert!((m.angle(1, 2).value() - 3.0 * FRAC_PI_2).abs() < 1e-12);

        let m = parse_inline_matrix("e^{i3pi/4},e^{-ipi/2};e^{ipi},e^{i2pi/3}").unwrap();
        assert!((m.angle(0, 0).value() - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!((m.angle(0, 1).value() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!((m.angle(1, 0).value() - PI).abs() < 1e-12);
        assert!((m.angle(1, 1).value() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inline_rejects_garbage() {
        assert!(parse_inline_matrix("1,2;3,4").is_err());
        assert!(parse_inline_matrix("e^{3pi/4},1").is_err());
        assert!(parse_inline_matrix("").is_err());
    }

    #[test]
    fn ragged_and_mismatched_rejected() {
        assert!(parse_matrix_json(r#"{"angles":[[0.0],[0.0,1.0]]}"#).is_err());
        assert!(parse_matrix_json(r#"{"rows":3,"cols":2,"angles":[[0.0,0.0]]}"#).is_err());
        assert!(parse_matrix_json(r#"{"nope":1}"#).is_err());
        assert!(parse_matrix_json(r#"{"signs":[[2]]}"#).is_err());
    }

    #[test]
    fn sign_matrix_parsing() {
        let s = parse_sign_matrix("1,-1,0;0,1,1").unwrap();
        assert_eq!(s, vec![vec![1, -1, 0], vec![0, 1, 1]]);
        let s = parse_sign_matrix(r#"{"signs":[[1,0],[-1,1]]}"#).unwrap();
        assert_eq!(s[1][0], -1);
        assert!(parse_sign_matrix("1,5").is_err());
    }
}
