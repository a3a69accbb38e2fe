//! Serde helpers shared by the file schemas.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A complex number in JSON: a bare number when real, `[re, im]` otherwise.
/// `{"re": .., "im": ..}` is accepted on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonComplex(pub Complex64);

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Real(f64),
    Pair([f64; 2]),
    Obj {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = match Repr::deserialize(d)? {
            Repr::Real(re) => Complex64::new(re, 0.0),
            Repr::Pair([re, im]) => Complex64::new(re, im),
            Repr::Obj { re, im } => Complex64::new(re, im),
        };
        Ok(JsonComplex(c))
    }
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex(c)
    }
}

pub(crate) fn to_json(v: &[Complex64]) -> Vec<JsonComplex> {
    v.iter().copied().map(JsonComplex).collect()
}

pub(crate) fn from_json(v: &[JsonComplex]) -> Vec<Complex64> {
    v.iter().map(|c| c.0).collect()
}
