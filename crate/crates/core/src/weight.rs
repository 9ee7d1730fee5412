//! Scalar weights: `f64` with a fixed tolerance, or exact `BigRational`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Absolute tolerance used for every float comparison in the crate.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Numeric type carried by mass functions, flows and stability indices.
///
/// `f64` compares up to [`FLOAT_TOLERANCE`]; `BigRational` compares exactly.
pub trait Weight: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    fn tolerance() -> Self;

    fn to_f64(&self) -> f64;

    /// For rationals this reads the shortest decimal representation of `v`,
    /// so `0.6` becomes exactly `3/5`.
    fn from_f64(v: f64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_rational(&self) -> BigRational;

    fn from_rational(r: &BigRational) -> Self;

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    /// `self <= other` up to tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        self.clone() <= other.clone() + Self::tolerance()
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn total<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self
    where
        Self: 'a,
    {
        items.into_iter().fold(Self::zero(), |acc, w| acc + w.clone())
    }
}

impl Weight for f64 {
    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_f64(*self)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64()
    }
}

impl Weight for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Self {
        parse_decimal(&format!("{v}")).expect("finite f64 formats as a decimal")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Parses a plain decimal literal (`-0.25`, `+375`, `1e-3`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], i32::from_str(&t[pos + 1..]).ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes()[0] {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10u8));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Shorthand for an exact `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
