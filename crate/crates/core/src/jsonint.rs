//! Flexible JSON encoding for arbitrary-precision integers.
//!
//! Values within the i64 range are emitted as plain JSON numbers; anything
//! larger becomes a decimal string. Parsing accepts numbers and decimal
//! strings interchangeably, so files and reports round-trip bit-exactly.

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

/// Transparent wrapper giving `BigInt` the flexible wire format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flex(pub BigInt);

impl Serialize for Flex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Flex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Flex;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Flex, E> {
                Ok(Flex(BigInt::from(v)))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Flex, E> {
                Ok(Flex(BigInt::from(v)))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Flex, E> {
                BigInt::from_str(v.trim())
                    .map(Flex)
                    .map_err(|_| E::custom(format!("not a decimal integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

/// `#[serde(with = "jsonint::scalar")]` for a `BigInt` field.
pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        Flex(x.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        Ok(Flex::deserialize(d)?.0)
    }
}

/// `#[serde(with = "jsonint::vec")]` for a `Vec<BigInt>` field.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(|x| Flex(x.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<Flex>::deserialize(d)?.into_iter().map(|f| f.0).collect())
    }
}

/// `#[serde(with = "jsonint::vec2")]` for a `Vec<Vec<BigInt>>` field.
pub mod vec2 {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        xs.iter()
            .map(|row| row.iter().map(|x| Flex(x.clone())).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Ok(Vec::<Vec<Flex>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(|f| f.0).collect())
            .collect())
    }
}

/// Parse a `serde_json::Value` that is either an integer or a decimal string.
pub fn from_value(v: &serde_json::Value) -> Result<BigInt, serde_json::Error> {
    serde_json::from_value::<Flex>(v.clone()).map(|f| f.0)
}
