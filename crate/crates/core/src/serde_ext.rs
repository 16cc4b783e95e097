//! Serde helpers for extended reals: finite values are JSON numbers, infinities are
//! the strings `"inf"` / `"-inf"` (and NaN is `"nan"`).

pub mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::Real;

    pub fn serialize<T: Real, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > T::zero() {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged, bound = "T: Real")]
    enum Ext<T> {
        Num(T),
        Text(String),
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        match Ext::<T>::deserialize(d)? {
            Ext::Num(v) => Ok(v),
            Ext::Text(t) => match t.as_str() {
                "inf" | "+inf" | "infinity" => Ok(T::infinity()),
                "-inf" | "-infinity" => Ok(T::neg_infinity()),
                "nan" => Ok(T::nan()),
                other => Err(serde::de::Error::custom(format!("expected a number or inf, got {other:?}"))),
            },
        }
    }
}
