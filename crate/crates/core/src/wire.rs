//! JSON wire forms for exact values.
//!
//! Rationals travel as strings `"p/q"` (or `"p"`); integers are also accepted
//! on input. Cyclotomic numbers travel as
//! `{"conductor": n, "coeffs": ["p/q", ...]}`.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::scalar::{parse_rational, render_rational};
use crate::{CycNum, GaussianRational, Rational};

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Text(String),
    Int(i64),
}

impl RationalRepr {
    fn into_rational<E: de::Error>(self) -> Result<Rational, E> {
        match self {
            RationalRepr::Text(s) => {
                parse_rational(&s).ok_or_else(|| E::custom(format!("invalid rational {s:?}")))
            }
            RationalRepr::Int(v) => Ok(crate::scalar::int(v)),
        }
    }
}

/// `#[serde(with = "wire::rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalRepr::deserialize(d)?.into_rational()
    }
}

/// `#[serde(with = "wire::rational_vec")]`
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(render_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalRepr>::deserialize(d)?
            .into_iter()
            .map(RationalRepr::into_rational)
            .collect()
    }
}

/// Serde-facing mirror of a [`CycNum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycNumWire {
    pub conductor: u64,
    #[serde(with = "rational_vec")]
    pub coeffs: Vec<Rational>,
}

impl From<&CycNum> for CycNumWire {
    fn from(x: &CycNum) -> Self {
        Self {
            conductor: x.conductor(),
            coeffs: x.coeffs().to_vec(),
        }
    }
}

impl TryFrom<CycNumWire> for CycNum {
    type Error = crate::CyclotomicError;
    fn try_from(w: CycNumWire) -> Result<Self, Self::Error> {
        CycNum::from_coeffs(w.conductor, w.coeffs)
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycNumWire::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = CycNumWire::deserialize(d)?;
        CycNum::try_from(w).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct GaussianWire {
    #[serde(with = "rational")]
    re: Rational,
    #[serde(with = "rational")]
    im: Rational,
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GaussianWire {
            re: self.re.clone(),
            im: self.im.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = GaussianWire::deserialize(d)?;
        Ok(GaussianRational::new(w.re, w.im))
    }
}

/// Canonical string for a cyclotomic value: `"p/q"` when rational, otherwise
/// the power-basis expansion.
pub fn render_cyc(x: &CycNum) -> String {
    match x.to_scalar() {
        Ok(q) => render_rational(&q),
        Err(_) => x.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn cyc_json_shape() {
        let z8 = CycNum::root_of_unity(8, 1);
        let j = serde_json::to_value(&z8).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"conductor": 8, "coeffs": ["0", "1", "0", "0"]})
        );
        let back: CycNum = serde_json::from_value(j).unwrap();
        assert_eq!(back, z8);
    }

    #[test]
    fn rational_strings() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "rational")]
            q: Rational,
        }
        let w = W { q: ratio(21, 2) };
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"q":"21/2"}"#);
        let parsed: W = serde_json::from_str(r#"{"q": 3}"#).unwrap();
        assert_eq!(parsed.q, int(3));
        assert!(serde_json::from_str::<W>(r#"{"q": "1/0"}"#).is_err());
    }

    #[test]
    fn bad_cyc_length_rejected() {
        let r: Result<CycNum, _> =
            serde_json::from_value(serde_json::json!({"conductor": 5, "coeffs": ["1"]}));
        assert!(r.is_err());
    }

    #[test]
    fn render_cyc_forms() {
        assert_eq!(render_cyc(&CycNum::from_scalar(ratio(24, 8))), "3");
        assert_eq!(render_cyc(&CycNum::root_of_unity(4, 1)), "(1)*z4");
    }
}
