//! Exact rational scalars.
//!
//! Everything in this crate computes over the rationals; no value ever
//! passes through floating point. `Rat` is an arbitrary-precision rational
//! kept in lowest terms with a positive denominator. The helpers here cover
//! construction from machine integers and the `p/q` text form used by the
//! JSON schemas.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = num_rational::BigRational;

/// `num/den` as a `Rat`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// The integer `n` as a `Rat`.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The unsigned integer `n` as a `Rat`.
pub fn rat_uint(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatParseError {
    pub input: String,
}

impl fmt::Display for RatParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse {:?} as a rational (expected p or p/q)", self.input)
    }
}

impl std::error::Error for RatParseError {}

/// Parses `"p"` or `"p/q"` with optional leading sign. The denominator must
/// be nonzero; the result is reduced.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let err = || RatParseError { input: s.to_owned() };
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    let (num_str, den_str) = match t.split_once('/') {
        Some((a, b)) => (a, b),
        None => (t, "1"),
    };
    let num: BigInt = num_str.parse().map_err(|_| err())?;
    let den: BigInt = den_str.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when `r` is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Largest integer `<= r`.
pub fn floor_rat(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// True when `r > 0`.
pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "1/2", "-7/3", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert_eq!(parse_rat("-4/-6").unwrap(), rat(2, 3));
        assert_eq!(parse_rat("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(format_rat(&parse_rat("8/4").unwrap()), "2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "/", "1/", "/2", "1/0", "a", "1.5", "1 / 2"] {
            assert!(parse_rat(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn floor_matches_integers() {
        assert_eq!(floor_rat(&rat(7, 2)), BigInt::from(3));
        assert_eq!(floor_rat(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(floor_rat(&rat_int(4)), BigInt::from(4));
    }
}
