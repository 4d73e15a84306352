//! Numbers with units, and a serde form for extended reals.
//!
//! JSON has no infinities, so non-finite values are written as the strings
//! `"+inf"`, `"-inf"` and `"nan"`. Parsing also accepts `"inf"` and `"infinity"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    Nats,
    NatsPerSymbol,
    /// Variance of a log-likelihood ratio.
    NatsSquared,
    /// Second-order budget offset `r` in `exp(−nD − √n·r)`.
    NatsPerSqrtSymbol,
    Probability,
    /// Rényi order.
    Order,
    Symbols,
    Sweeps,
    Count,
    /// Dimensionless ratio.
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }
    pub fn nats(value: f64) -> Self {
        Self::new(value, Unit::Nats)
    }
    pub fn rate(value: f64) -> Self {
        Self::new(value, Unit::NatsPerSymbol)
    }
    pub fn prob(value: f64) -> Self {
        Self::new(value, Unit::Probability)
    }
    pub fn order(value: f64) -> Self {
        Self::new(value, Unit::Order)
    }
    pub fn count(value: usize) -> Self {
        Self::new(value as f64, Unit::Count)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

fn to_repr(v: f64) -> Repr {
    if v.is_finite() {
        Repr::Num(v)
    } else if v.is_nan() {
        Repr::Text("nan".into())
    } else if v > 0.0 {
        Repr::Text("+inf".into())
    } else {
        Repr::Text("-inf".into())
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
    match r {
        Repr::Num(v) => Ok(v),
        Repr::Text(s) => match s.to_ascii_lowercase().as_str() {
            "+inf" | "inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            _ => Err(E::custom(format!("expected a number or \"+inf\", got {s:?}"))),
        },
    }
}

pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

pub mod ext_f64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| to_repr(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }
}
