//! Exact rational helpers on top of `BigRational`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::BoundError;

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer >= r.
pub fn ceil_usize(r: &Rational) -> usize {
    r.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// Whether |x| <= sqrt(y), decided exactly by comparing squares. Requires y >= 0.
pub fn abs_le_sqrt(x: &Rational, y: &Rational) -> bool {
    debug_assert!(!y.is_negative());
    x * x <= *y
}

/// Parses `3`, `-2`, `2/3`, or a plain decimal such as `0.25`.
pub fn parse(s: &str) -> Result<Rational, BoundError> {
    let bad = || BoundError::BadRational(s.to_string());
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, decimals)) = s.split_once('.') {
        if decimals.is_empty() || !decimals.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = BigInt::from(10).pow(decimals.len() as u32);
        let frac_part = BigInt::from_str(decimals).map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac_part;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Canonical text form, `n` or `n/d`.
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
