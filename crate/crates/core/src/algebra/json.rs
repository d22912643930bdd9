//! JSON encoding of polynomials and rational expressions.
//!
//! A polynomial is a list of `{"coeff": "p/q", "exps": {name: int}}` in
//! canonical (descending graded lexicographic) term order; a rational
//! expression is `{"num": [...], "den": [...]}` with the denominator expanded.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{Monomial, Polynomial};
use super::rational::{RationalExpression, Substitution};
use super::var::Var;

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    exps: BTreeMap<Var, u16>,
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms()
            .iter()
            .map(|(m, c)| TermRepr {
                coeff: c.to_string(),
                exps: m.iter().collect(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let c: BigRational = t
                .coeff
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coefficient `{}`", t.coeff)))?;
            out.push((Monomial::from_pairs(t.exps), c));
        }
        Ok(Polynomial::from_terms(out))
    }
}

impl Serialize for RationalExpression {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.numerator().clone(),
            den: self.denominator(),
        }
        .serialize(serializer)
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.iter().map(|(v, e)| (v.name(), e)))
    }
}

impl<'de> Deserialize<'de> for RationalExpression {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        RationalExpression::new(repr.num, repr.den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{c, v};

    #[test]
    fn polynomial_schema() {
        let p = &(&v(Var::X) * &v(Var::Y)) * &c(3, 2);
        let json = serde_json::to_string(p.numerator()).unwrap();
        assert_eq!(json, r#"[{"coeff":"3/2","exps":{"x":1,"y":1}}]"#);
    }

    #[test]
    fn rational_round_trip_is_bit_exact() {
        let e = &(&v(Var::X) + &c(1, 3)) / &(&(&v(Var::T) * &v(Var::T)) * &(&v(Var::Y) - &c(1, 1)));
        let json = serde_json::to_string(&e).unwrap();
        let back: RationalExpression = serde_json::from_str(&json).unwrap();
        assert!(back.equals(&e));
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn rejects_zero_denominator() {
        let json = r#"{"num":[{"coeff":"1","exps":{}}],"den":[]}"#;
        assert!(serde_json::from_str::<RationalExpression>(json).is_err());
    }
}
