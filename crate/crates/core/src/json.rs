//! JSON encodings: integers as decimal strings, rationals as `"p/q"`,
//! matrices as arrays of rows. Inputs also accept plain JSON integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{FiniteAbelianGroup, IntMatrix, RatMatrix};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Text(String),
    Signed(i64),
    Unsigned(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawNumber::deserialize(d)? {
            RawNumber::Text(t) => parse_int(&t).map(JsonInt).map_err(D::Error::custom),
            RawNumber::Signed(x) => Ok(JsonInt(x.into())),
            RawNumber::Unsigned(x) => Ok(JsonInt(x.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRat(pub BigRational);

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawNumber::deserialize(d)? {
            RawNumber::Text(t) => parse_rational(&t).map(JsonRat).map_err(D::Error::custom),
            RawNumber::Signed(x) => Ok(JsonRat(BigRational::from_integer(x.into()))),
            RawNumber::Unsigned(x) => Ok(JsonRat(BigRational::from_integer(x.into()))),
        }
    }
}

pub fn parse_int(text: &str) -> Result<BigInt> {
    text.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {text:?}")))
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    match text.split_once('/') {
        None => parse_int(text).map(BigRational::from_integer),
        Some((p, q)) => {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(BigRational::new(p, q))
        }
    }
}

pub type JsonIntRows = Vec<Vec<JsonInt>>;
pub type JsonRatRows = Vec<Vec<JsonRat>>;

pub fn ints(values: &[BigInt]) -> Vec<JsonInt> {
    values.iter().cloned().map(JsonInt).collect()
}

pub fn unwrap_ints(values: &[JsonInt]) -> Vec<BigInt> {
    values.iter().map(|x| x.0.clone()).collect()
}

pub fn int_rows(m: &IntMatrix) -> JsonIntRows {
    m.row_vecs().iter().map(|r| ints(r)).collect()
}

pub fn rat_rows(m: &RatMatrix) -> JsonRatRows {
    m.row_vecs()
        .into_iter()
        .map(|r| r.into_iter().map(JsonRat).collect())
        .collect()
}

pub fn int_matrix(rows: &JsonIntRows) -> Result<IntMatrix> {
    IntMatrix::from_rows(rows.iter().map(|r| unwrap_ints(r)).collect())
}

pub fn rat_matrix(rows: &JsonRatRows) -> Result<RatMatrix> {
    RatMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|x| x.0.clone()).collect())
            .collect(),
    )
}

pub fn group(g: &FiniteAbelianGroup) -> Vec<JsonInt> {
    ints(g.invariant_factors())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_forms() {
        let a: JsonInt = serde_json::from_str("\"-123456789012345678901234567890\"").unwrap();
        assert_eq!(a.0.to_string(), "-123456789012345678901234567890");
        let b: JsonInt = serde_json::from_str("42").unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"42\"");
        assert!(serde_json::from_str::<JsonInt>("1.5").is_err());
        assert!(serde_json::from_str::<JsonInt>("\"x\"").is_err());
    }

    #[test]
    fn rational_forms() {
        let a: JsonRat = serde_json::from_str("\"2/-4\"").unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"-1/2\"");
        let b: JsonRat = serde_json::from_str("3").unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"3/1\"");
        assert!(serde_json::from_str::<JsonRat>("\"1/0\"").is_err());
    }

    #[test]
    fn matrices() {
        let rows: JsonIntRows = serde_json::from_str("[[1, \"2\"], [3, 4]]").unwrap();
        let m = int_matrix(&rows).unwrap();
        assert_eq!(m, IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]));
        assert_eq!(
            serde_json::to_string(&int_rows(&m)).unwrap(),
            "[[\"1\",\"2\"],[\"3\",\"4\"]]"
        );
        let ragged: JsonIntRows = serde_json::from_str("[[1], [2, 3]]").unwrap();
        assert!(int_matrix(&ragged).is_err());
    }
}
