//! JSON helpers shared by the interchange formats.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serializer};

/// Version tag embedded in every document this crate writes.
pub const SCHEMA_VERSION: &str = "v1";

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Pair([f64; 2]),
    Real(f64),
}

/// Complex numbers as `[re, im]`; a bare number is read as a real value.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([c.re, c.im])
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(match ComplexRepr::deserialize(d)? {
            ComplexRepr::Pair([re, im]) => Complex64::new(re, im),
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
        })
    }
}
