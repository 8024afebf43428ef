//! JSON schema for polynomials.
//!
//! Float univariate: `{"var": "z", "coeffs": [[re, im], ...]}` ascending.
//! Exact univariate: the same with decimal strings, `[["3/2", "0"], ...]`.
//! Bivariate: `{"vars": ["z", "w"], "coeffs": [row per z-power]}` where each
//! row lists w-power coefficients.

use super::poly::Poly;
use super::scalar::{C64, CQ, Q};
use super::{BiPoly, PolyError};
use num::bigint::BigInt;
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::str::FromStr;

fn schema_err(msg: impl Into<String>) -> PolyError {
    PolyError::Schema(msg.into())
}

fn c64_to_json(c: &C64) -> Value {
    json!([c.re, c.im])
}

fn c64_from_json(v: &Value) -> Result<C64, PolyError> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| schema_err("re not a number"))?;
            let im = a[1].as_f64().ok_or_else(|| schema_err("im not a number"))?;
            Ok(C64::new(re, im))
        }
        Value::Number(n) => Ok(C64::new(
            n.as_f64().ok_or_else(|| schema_err("not a float"))?,
            0.0,
        )),
        _ => Err(schema_err("coefficient must be [re, im] or a number")),
    }
}

fn q_to_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn q_from_string(s: &str) -> Result<Q, PolyError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|e| schema_err(format!("bad numerator: {e}")))?;
        let den = BigInt::from_str(d.trim()).map_err(|e| schema_err(format!("bad denominator: {e}")))?;
        if den.is_zero() {
            return Err(schema_err("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    } else {
        let num = BigInt::from_str(s).map_err(|e| schema_err(format!("bad integer: {e}")))?;
        Ok(BigRational::from_integer(num))
    }
}

fn cq_to_json(c: &CQ) -> Value {
    json!([q_to_string(&c.re), q_to_string(&c.im)])
}

fn cq_from_json(v: &Value) -> Result<CQ, PolyError> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let re = a[0]
                .as_str()
                .ok_or_else(|| schema_err("exact re must be a decimal string"))?;
            let im = a[1]
                .as_str()
                .ok_or_else(|| schema_err("exact im must be a decimal string"))?;
            Ok(Complex::new(q_from_string(re)?, q_from_string(im)?))
        }
        Value::String(s) => Ok(Complex::new(q_from_string(s)?, Q::zero())),
        _ => Err(schema_err("exact coefficient must be [re, im] strings")),
    }
}

pub fn poly_c64_to_json(p: &Poly<C64>, var: &str) -> Value {
    json!({"var": var, "coeffs": p.coeffs().iter().map(c64_to_json).collect::<Vec<_>>()})
}

pub fn poly_c64_from_json(v: &Value) -> Result<(Poly<C64>, String), PolyError> {
    let var = v
        .get("var")
        .and_then(Value::as_str)
        .unwrap_or("z")
        .to_string();
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("missing coeffs array"))?;
    let c: Result<Vec<C64>, _> = coeffs.iter().map(c64_from_json).collect();
    Ok((Poly::new(c?), var))
}

pub fn poly_cq_to_json(p: &Poly<CQ>, var: &str) -> Value {
    json!({
        "var": var,
        "domain": "exact",
        "coeffs": p.coeffs().iter().map(cq_to_json).collect::<Vec<_>>()
    })
}

pub fn poly_cq_from_json(v: &Value) -> Result<(Poly<CQ>, String), PolyError> {
    let var = v
        .get("var")
        .and_then(Value::as_str)
        .unwrap_or("z")
        .to_string();
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("missing coeffs array"))?;
    let c: Result<Vec<CQ>, _> = coeffs.iter().map(cq_from_json).collect();
    Ok((Poly::new(c?), var))
}

pub fn bipoly_c64_to_json(p: &BiPoly<C64>) -> Value {
    let dz = p.deg(super::Var::Z).map_or(0, |d| d + 1);
    let dw = p.deg(super::Var::W).map_or(0, |d| d + 1);
    let rows: Vec<Value> = (0..dz)
        .map(|i| {
            Value::Array((0..dw).map(|j| c64_to_json(&p.coeff(i, j))).collect())
        })
        .collect();
    json!({"vars": ["z", "w"], "coeffs": rows})
}

pub fn bipoly_c64_from_json(v: &Value) -> Result<BiPoly<C64>, PolyError> {
    let rows = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("missing coeffs array"))?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r
            .as_array()
            .ok_or_else(|| schema_err("bivariate coeffs must be a matrix"))?;
        let row: Result<Vec<C64>, _> = r.iter().map(c64_from_json).collect();
        out.push(row?);
    }
    Ok(BiPoly::new(out))
}

pub fn bipoly_cq_to_json(p: &BiPoly<CQ>) -> Value {
    let dz = p.deg(super::Var::Z).map_or(0, |d| d + 1);
    let dw = p.deg(super::Var::W).map_or(0, |d| d + 1);
    let rows: Vec<Value> = (0..dz)
        .map(|i| Value::Array((0..dw).map(|j| cq_to_json(&p.coeff(i, j))).collect()))
        .collect();
    json!({"vars": ["z", "w"], "domain": "exact", "coeffs": rows})
}

pub fn bipoly_cq_from_json(v: &Value) -> Result<BiPoly<CQ>, PolyError> {
    let rows = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("missing coeffs array"))?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r
            .as_array()
            .ok_or_else(|| schema_err("bivariate coeffs must be a matrix"))?;
        let row: Result<Vec<CQ>, _> = r.iter().map(cq_from_json).collect();
        out.push(row?);
    }
    Ok(BiPoly::new(out))
}

/// True when the JSON declares the exact domain.
pub fn is_exact_domain(v: &Value) -> bool {
    v.get("domain").and_then(Value::as_str) == Some("exact")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roundtrip() {
        let p = Poly::new(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0)]);
        let v = poly_c64_to_json(&p, "z");
        let (q, var) = poly_c64_from_json(&v).unwrap();
        assert_eq!(var, "z");
        assert_eq!(p, q);
    }

    #[test]
    fn exact_roundtrip_with_rationals() {
        let p: Poly<CQ> = Poly::new(vec![
            Complex::new(q_from_string("3/2").unwrap(), Q::zero()),
            Complex::new(q_from_string("-7").unwrap(), q_from_string("1/3").unwrap()),
        ]);
        let v = poly_cq_to_json(&p, "w");
        assert!(is_exact_domain(&v));
        let (q, var) = poly_cq_from_json(&v).unwrap();
        assert_eq!(var, "w");
        assert_eq!(p, q);
    }
}
