//! JSON form: `{"vars": [...], "terms": [{"exp": [...], "coef": {"<b power>": [num, den]}}]}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::{LaurentPoly, ParamPoly};
use crate::lattice::Rational;

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i64>,
    coef: BTreeMap<String, (Value, Value)>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

fn int_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn json_int(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for ParamPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        param_json(self).serialize(s)
    }
}

fn param_json(p: &ParamPoly) -> BTreeMap<String, (Value, Value)> {
    p.coefficients()
        .iter()
        .map(|(k, c)| (k.to_string(), (int_json(c.numer()), int_json(c.denom()))))
        .collect()
}

fn json_param<E: serde::de::Error>(m: &BTreeMap<String, (Value, Value)>) -> Result<ParamPoly, E> {
    let mut out = ParamPoly::zero();
    for (k, (n, d)) in m {
        let k: u32 = k.parse().map_err(|_| E::custom(format!("bad power {k:?}")))?;
        let n = json_int(n).ok_or_else(|| E::custom("bad numerator"))?;
        let d = json_int(d).ok_or_else(|| E::custom("bad denominator"))?;
        if d == BigInt::from(0) {
            return Err(E::custom("zero denominator"));
        }
        out = &out + &ParamPoly::term(k, Rational::new(n, d));
    }
    Ok(out)
}

impl<'de> Deserialize<'de> for ParamPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = BTreeMap::<String, (Value, Value)>::deserialize(d)?;
        json_param(&m)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            vars: self.vars().to_vec(),
            terms: self
                .terms()
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coef: param_json(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.exp.len() != j.vars.len() {
                return Err(D::Error::custom("exponent length differs from variable count"));
            }
            terms.push((t.exp.clone(), json_param::<D::Error>(&t.coef)?));
        }
        Ok(LaurentPoly::from_terms(&j.vars, terms))
    }
}

#[cfg(test)]
mod tests {
    use crate::laurent::parse;

    use super::*;

    #[test]
    fn round_trip() {
        let v: Vec<String> = vec!["x".into(), "y".into()];
        let p = parse("(1 + b*y^-1)^2 - 3*x*y", &v).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with(r#"{"vars":["x","y"],"terms":[{"exp":[0,-2],"coef":{"2":[1,1]}}"#), "{s}");
        let q: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_bad_lengths() {
        let s = r#"{"vars":["x"],"terms":[{"exp":[1,2],"coef":{"0":[1,1]}}]}"#;
        assert!(serde_json::from_str::<LaurentPoly>(s).is_err());
    }
}
