//! Exact rational helpers shared by the solvers and the CLI.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Always `p/q`, including integers (`1/1`, `0/1`).
pub fn fraction_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with 12 significant digits.
pub fn decimal_string(x: &BigRational) -> String {
    let v = to_f64(x);
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", 11, v);
    // Re-render through f64 parsing so trailing zeros collapse.
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{}", parsed)
}

/// Parses `"0.25"`, `"-3"`, `"1/8"` or `"1e-2"`-free plain decimals exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::domain(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = BigRational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

pub fn clamp(x: BigRational, lo: &BigRational, hi: &BigRational) -> BigRational {
    if &x < lo {
        lo.clone()
    } else if &x > hi {
        hi.clone()
    } else {
        x
    }
}

pub fn mean(values: &[BigRational]) -> Option<BigRational> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(BigRational::zero(), |acc, v| acc + v);
    Some(sum / BigInt::from(values.len()))
}

pub fn is_positive(x: &BigRational) -> bool {
    x.is_positive()
}

pub fn one() -> BigRational {
    BigRational::one()
}
