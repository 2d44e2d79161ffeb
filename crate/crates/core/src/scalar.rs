//! Exact scalar field abstraction.
//!
//! Everything in this crate is generic over [`Scalar`], an ordered field with
//! exact arithmetic. The default instantiation is [`BigRational`]; the
//! fixed-width `Ratio<i128>` is also provided for callers who know their
//! inputs are small and want to skip heap allocation.
//!
//! Canonical text form is always `p/q` with `q > 0` and `gcd(p, q) = 1`,
//! including integers (`10/1`).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Signed;

use crate::error::ParseError;

/// An exact ordered field.
pub trait Scalar: Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static {
    fn from_i128(value: i128) -> Self;

    /// Numerator and (positive) denominator in lowest terms, as decimal strings.
    fn parts(&self) -> (String, String);

    /// Parse `p/q` or a bare integer `p`.
    fn parse_canonical(text: &str) -> Result<Self, ParseError>;

    fn is_integer(&self) -> bool {
        self.parts().1 == "1"
    }

    fn from_i64(value: i64) -> Self {
        Self::from_i128(value as i128)
    }

    fn ratio(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num) / Self::from_i128(den)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    /// `p/q` string used in every serialized output.
    fn canonical(&self) -> String {
        let (p, q) = self.parts();
        format!("{p}/{q}")
    }

    /// `\frac{p}{q}`, or the bare integer.
    fn latex(&self) -> String {
        let (p, q) = self.parts();
        if q == "1" {
            return p;
        }
        match p.strip_prefix('-') {
            Some(p) => format!("-\\frac{{{p}}}{{{q}}}"),
            None => format!("\\frac{{{p}}}{{{q}}}"),
        }
    }

    /// Inline math for markdown output.
    fn typeset(&self) -> String {
        format!("${}$", self.latex())
    }

    fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

fn split_ratio(text: &str) -> Result<(&str, &str), ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::Rational(text.to_string()));
    }
    Ok(match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    })
}

macro_rules! impl_scalar_for_ratio {
    ($int:ty, $conv:expr) => {
        impl Scalar for Ratio<$int> {
            fn from_i128(value: i128) -> Self {
                Ratio::from_integer($conv(value))
            }

            fn parts(&self) -> (String, String) {
                (self.numer().to_string(), self.denom().to_string())
            }

            fn parse_canonical(text: &str) -> Result<Self, ParseError> {
                let (p, q) = split_ratio(text)?;
                let bad = || ParseError::Rational(text.to_string());
                let p = <$int>::from_str(p).map_err(|_| bad())?;
                let q = <$int>::from_str(q).map_err(|_| bad())?;
                if q == <$int>::from(0u8) {
                    return Err(bad());
                }
                Ok(Ratio::new(p, q))
            }
        }
    };
}

impl_scalar_for_ratio!(BigInt, BigInt::from);
impl_scalar_for_ratio!(i128, |v: i128| v);

/// Serde helpers writing scalars as canonical `p/q` strings.
pub mod as_str {
    use super::Scalar;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Ser: Serializer>(value: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.serialize_str(&value.canonical())
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(de: D) -> Result<S, D::Error> {
        let text = String::deserialize(de)?;
        S::parse_canonical(&text).map_err(D::Error::custom)
    }
}

/// Same as [`as_str`] for `Vec<S>`.
pub mod vec_as_str {
    use super::Scalar;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Ser: Serializer>(values: &[S], ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = ser.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.canonical())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(de: D) -> Result<Vec<S>, D::Error> {
        let texts = Vec::<String>::deserialize(de)?;
        texts
            .iter()
            .map(|t| S::parse_canonical(t).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    #[test]
    fn canonical_form_is_reduced() {
        assert_eq!(Q::ratio(10, 1).canonical(), "10/1");
        assert_eq!(Q::ratio(6, -4).canonical(), "-3/2");
        assert_eq!(Q::ratio(0, 7).canonical(), "0/1");
        assert_eq!(Ratio::<i128>::ratio(-9, -12).canonical(), "3/4");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Q::parse_canonical("1/0").is_err());
        assert!(Q::parse_canonical("").is_err());
        assert!(Q::parse_canonical("a/b").is_err());
        assert_eq!(Q::parse_canonical(" 5 ").unwrap(), Q::from_i64(5));
    }

    #[test]
    fn half_integers_are_exact() {
        let w_hat = Q::from_i64(3) - (Q::from_i64(2) + Q::half());
        assert_eq!(w_hat.canonical(), "1/2");
        assert_eq!(w_hat.pow(3), Q::ratio(1, 8));
    }

    proptest! {
        #[test]
        fn canonical_round_trip(p in -10_000i128..10_000, q in 1i128..10_000) {
            let x = Q::ratio(p, q);
            prop_assert_eq!(Q::parse_canonical(&x.canonical()).unwrap(), x.clone());
            let y = Ratio::<i128>::ratio(p, q);
            prop_assert_eq!(x.canonical(), y.canonical());
        }
    }
}
