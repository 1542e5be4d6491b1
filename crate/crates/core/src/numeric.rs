//! Exact rational helpers.
//!
//! Floats entering exact computations are read through their shortest
//! round-trip decimal form, so `0.4` becomes `2/5` rather than the binary
//! expansion of the nearest double.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational used by every closed-form rule.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_int(n: usize) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational whose decimal expansion is the shortest one that round-trips to `x`.
pub fn decimal_rational(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite value {x}")));
    }
    if x == 0.0 {
        return Ok(Q::zero());
    }
    let s = format!("{x:e}");
    let (mantissa, exp) = s.split_once('e').expect("LowerExp always has an exponent");
    let exp: i64 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Always `p/q`, including integers (`1/1`).
pub fn format_rational(r: &Q) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Schema(format!("not a rational: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Q::from_integer(n));
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    decimal_rational(x)
}

pub fn to_f64(r: &Q) -> f64 {
    // Ratio::to_f64 keeps precision for huge numerators and denominators.
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn q_abs(r: &Q) -> Q {
    r.abs()
}

pub fn is_one(r: &Q) -> bool {
    r.is_one()
}

/// Shannon entropy in bits of a list of non-negative masses; `0·log 0 = 0`.
pub fn shannon_bits(masses: impl IntoIterator<Item = f64>) -> f64 {
    let mut h = 0.0;
    for p in masses {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_reading() {
        assert_eq!(decimal_rational(0.4).unwrap(), q(2, 5));
        assert_eq!(decimal_rational(-1.25).unwrap(), q(-5, 4));
        assert_eq!(decimal_rational(3.0).unwrap(), q(3, 1));
        assert_eq!(decimal_rational(1e-20).unwrap(), Q::new(1.into(), num_traits::pow(BigInt::from(10), 20)));
        assert_eq!(decimal_rational(1.5e21).unwrap(), q_int(15) * Q::from_integer(num_traits::pow(BigInt::from(10), 20)));
        assert!(decimal_rational(f64::NAN).is_err());
    }

    #[test]
    fn rational_text_round_trip() {
        let r = q(-17, 60);
        assert_eq!(format_rational(&r), "-17/60");
        assert_eq!(parse_rational("-17/60").unwrap(), r);
        assert_eq!(format_rational(&q(1, 1)), "1/1");
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn entropy_of_halves_is_one_bit() {
        assert_eq!(shannon_bits([0.5, 0.5]), 1.0);
        assert_eq!(shannon_bits([1.0, 0.0]), 0.0);
    }
}
