//! Serializers writing big integers as JSON numbers when they fit in an
//! `i64` and as decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

pub(crate) fn value(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

pub(crate) fn big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    value(x).serialize(s)
}

pub(crate) fn vector<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(value))
}

pub(crate) fn matrix<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(value).collect::<Vec<_>>()))
}

fn parse(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| format!("{n} is not an integer")),
        serde_json::Value::String(s) => s.parse().map_err(|_| format!("{s:?} is not an integer")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub(crate) fn de_vector<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let raw: Vec<serde_json::Value> = serde::Deserialize::deserialize(d)?;
    raw.iter().map(parse).collect::<Result<_, _>>().map_err(serde::de::Error::custom)
}

pub(crate) fn de_matrix<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
    let raw: Vec<Vec<serde_json::Value>> = serde::Deserialize::deserialize(d)?;
    raw.iter()
        .map(|r| r.iter().map(parse).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(serde::de::Error::custom)
}
