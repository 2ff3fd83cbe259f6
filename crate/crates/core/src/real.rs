//! JSON encoding of reals that may be infinite: `"Infinite"` / `"-Infinite"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Real(x)),
            Repr::Tag(t) if t == "Infinite" => Ok(Real(f64::INFINITY)),
            Repr::Tag(t) if t == "-Infinite" => Ok(Real(f64::NEG_INFINITY)),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("not a real: {t}"))),
        }
    }
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("NaN")
    } else if *x > 0.0 {
        s.serialize_str("Infinite")
    } else {
        s.serialize_str("-Infinite")
    }
}

pub fn serialize_pair<S: Serializer>(x: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    (Real(x.0), Real(x.1)).serialize(s)
}
