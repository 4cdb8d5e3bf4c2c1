//! Numeric field abstraction for the index calculus.
//!
//! All index functions are affine in the reciprocal exponents, so they can be
//! evaluated in exact rational arithmetic. [`Scalar`] lets the same code run
//! on `f64` (with an absolute comparison slack) and on [`Rational`] (exact).

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Num, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for verdicts on rational inputs.
pub type Rational = Ratio<i128>;

/// Absolute tolerance used when comparing floating-point verdict margins.
pub const FLOAT_SLACK: f64 = 1e-12;

pub trait Scalar: Copy + PartialOrd + Debug + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    /// Comparison slack: zero for exact types.
    fn slack() -> Self;

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn max2(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min2(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn slack() -> Self {
        FLOAT_SLACK
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn slack() -> Self {
        Ratio::zero()
    }
}

/// Parses `"3"`, `"-1/2"`, `"0.625"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{t}'")));
        }
        return Ok(num / den);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in '{t}'")))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("not a number: '{t}'")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: '{t}'")));
    }
    if int_part.len() + frac_part.len() > 30 || exp.abs() > 30 {
        return Err(Error::Parse(format!("number out of exact range: '{t}'")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value: i128 = if all.is_empty() { 0 } else { all.parse().map_err(|_| Error::Parse(format!("not a number: '{t}'")))? };
    if neg {
        value = -value;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = 10i128;
    let r = if scale >= 0 {
        Ratio::from_integer(value) * Ratio::from_integer(ten.pow(scale as u32))
    } else {
        Ratio::new(value, ten.pow((-scale) as u32))
    };
    Ok(r)
}

/// Parses a Lebesgue/summation exponent (`"inf"`, `"2"`, `"1/3"`) and
/// returns its reciprocal.
pub fn parse_exponent_reciprocal(text: &str) -> Result<Rational> {
    let t = text.trim().to_ascii_lowercase();
    if matches!(t.as_str(), "inf" | "infinity" | "oo" | "∞") {
        return Ok(Ratio::zero());
    }
    let p = parse_rational(&t)?;
    if p <= Ratio::zero() {
        return Err(Error::Parse(format!("exponent must be positive, got '{text}'")));
    }
    Ok(Ratio::one() / p)
}

/// Best rational approximation of a float with a bounded denominator.
pub fn rational_from_f64(x: f64, max_den: i128) -> Rational {
    if !x.is_finite() {
        return Ratio::zero();
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    Ratio::new(h1, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("0.6").unwrap(), Ratio::new(3, 5));
        assert_eq!(parse_rational("-1/2").unwrap(), Ratio::new(-1, 2));
        assert_eq!(parse_rational("1e-2").unwrap(), Ratio::new(1, 100));
        assert_eq!(parse_rational("2.5e1").unwrap(), Ratio::from_integer(25));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn exponent_reciprocals() {
        assert_eq!(parse_exponent_reciprocal("inf").unwrap(), Ratio::zero());
        assert_eq!(parse_exponent_reciprocal("2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_exponent_reciprocal("1/3").unwrap(), Ratio::from_integer(3));
        assert!(parse_exponent_reciprocal("0").is_err());
        assert!(parse_exponent_reciprocal("-2").is_err());
    }

    #[test]
    fn continued_fraction_recovers_small_rationals() {
        assert_eq!(rational_from_f64(0.25, 1000), Ratio::new(1, 4));
        assert_eq!(rational_from_f64(2.0 / 3.0, 1000), Ratio::new(2, 3));
        assert_eq!(rational_from_f64(-1.5, 1000), Ratio::new(-3, 2));
    }
}
