//! Scalar abstraction for probabilities and expectations.
//!
//! The distribution engine is written once over [`Probability`] and is
//! instantiated with [`Rational`] for audits (exact equality) or with `f64`
//! / `f32` when only a fast numeric answer is needed.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{NumAssignOps, One, ToPrimitive, Zero};

/// Arbitrary-precision rational in lowest terms.
pub type Rational = BigRational;

/// A field-like scalar that can hold probabilities.
pub trait Probability:
    Clone + Debug + PartialOrd + Zero + One + NumAssignOps + Send + Sync + 'static
{
    /// `num / den`. `den` must be nonzero.
    fn from_ratio(num: u128, den: u128) -> Self;

    fn from_count(count: u64) -> Self {
        Self::from_ratio(u128::from(count), 1)
    }

    fn to_f64(&self) -> f64;

    /// Exact types compare with `==`; floats are subject to rounding.
    const EXACT: bool;
}

impl Probability for Rational {
    fn from_ratio(num: u128, den: u128) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        // Big denominators overflow a direct f64 conversion.
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let num = self.numer().to_f64().unwrap_or(f64::NAN);
            let den = self.denom().to_f64().unwrap_or(f64::NAN);
            num / den
        })
    }

    const EXACT: bool = true;
}

impl Probability for f64 {
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    const EXACT: bool = false;
}

impl Probability for f32 {
    fn from_ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    const EXACT: bool = false;
}

/// Formats a rational as `"num/den"` (always with a denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.trim().parse().ok()?;
            let den: BigInt = b.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rational::new(num, den))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Scalars that can be written into reports: exact values as `"num/den"`
/// strings, floats as JSON numbers.
pub trait ReportScalar {
    fn to_json(&self) -> serde_json::Value;
    fn to_text(&self) -> String;
}

impl ReportScalar for Rational {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }
}

impl ReportScalar for f64 {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(self.to_text()))
    }

    fn to_text(&self) -> String {
        if self.is_infinite() {
            if *self > 0.0 { "inf" } else { "-inf" }.to_string()
        } else {
            format!("{self}")
        }
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_rational_vec {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| {
                parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`")))
            })
            .collect()
    }
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Calls `visit` with every `k`-combination of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
