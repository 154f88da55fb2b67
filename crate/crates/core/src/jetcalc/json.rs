//! Canonical JSON forms.
//!
//! A polynomial is `[{"coeff": "n/d", "mono": [[α, n, e], ...]}, ...]` in
//! canonical term order; a series is `{"trunc": H, "coeffs": [poly, ...]}`.

use serde_json::{json, Value};

use super::monomial::{Jet, Monomial};
use super::poly::JetPoly;
use super::series::HbarSeries;
use crate::error::JetError;
use crate::Rational;

pub fn rational_to_json(c: &Rational) -> Value {
    if c.is_integer() {
        Value::String(c.numer().to_string())
    } else {
        Value::String(format!("{}/{}", c.numer(), c.denom()))
    }
}

/// Accepts `"n/d"`, `"n"` or a JSON integer.
pub fn rational_from_json(v: &Value) -> Result<Rational, JetError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|k| Rational::from_integer(k.into()))
            .ok_or_else(|| JetError::Schema(format!("non-integer number {n}"))),
        Value::String(s) => parse_rational(s),
        other => Err(JetError::Schema(format!("expected a rational, got {other}"))),
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, JetError> {
    let bad = || JetError::Schema(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == 0.into() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl JetPoly {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(m, c)| json!({"coeff": rational_to_json(c), "mono": m.to_triples()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<JetPoly, JetError> {
        let terms = v
            .as_array()
            .ok_or_else(|| JetError::Schema("polynomial must be an array".into()))?;
        let mut p = JetPoly::zero();
        for t in terms {
            let c = rational_from_json(
                t.get("coeff")
                    .ok_or_else(|| JetError::Schema("term without coeff".into()))?,
            )?;
            let mono = t
                .get("mono")
                .and_then(Value::as_array)
                .ok_or_else(|| JetError::Schema("term without mono".into()))?;
            let mut factors = Vec::with_capacity(mono.len());
            for f in mono {
                let triple: Vec<i64> = f
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .and_then(|a| a.iter().map(Value::as_i64).collect())
                    .ok_or_else(|| JetError::Schema(format!("bad factor {f}")))?;
                let (a, n, e) = (triple[0], triple[1], triple[2]);
                if a < 1 || n < 0 || (n == 0 && e < 0) || !(-64..=64).contains(&e) {
                    return Err(JetError::Schema(format!("bad factor {f}")));
                }
                factors.push((Jet::new(a as usize, n as usize), e as i32));
            }
            p.add_term(Monomial::from_factors(factors), c);
        }
        Ok(p)
    }
}

impl HbarSeries {
    pub fn to_json(&self) -> Value {
        json!({
            "trunc": self.trunc(),
            "coeffs": self.coeffs().iter().map(JetPoly::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<HbarSeries, JetError> {
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| JetError::Schema("series without coeffs".into()))?;
        let coeffs: Vec<JetPoly> = coeffs.iter().map(JetPoly::from_json).collect::<Result<_, _>>()?;
        if coeffs.is_empty() {
            return Err(JetError::Schema("empty series".into()));
        }
        if let Some(t) = v.get("trunc") {
            if t.as_u64() != Some(coeffs.len() as u64 - 1) {
                return Err(JetError::Schema("trunc does not match coeffs".into()));
            }
        }
        Ok(HbarSeries::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::parse_poly;

    #[test]
    fn poly_roundtrip() {
        let p = parse_poly("w[1,3]*w[1,1]^-1 - 5/7*w[2,0]^2*w[1,4]").unwrap();
        let v = p.to_json();
        assert_eq!(JetPoly::from_json(&v).unwrap(), p);
        let s = HbarSeries::from_coeffs(vec![p.clone(), JetPoly::zero(), p]);
        assert_eq!(HbarSeries::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn rejects_malformed() {
        assert!(JetPoly::from_json(&json!([{"coeff": "1/0", "mono": []}])).is_err());
        assert!(JetPoly::from_json(&json!([{"coeff": "1", "mono": [[1, 0, -1]]}])).is_err());
        assert!(JetPoly::from_json(&json!({"coeff": "1"})).is_err());
    }
}
