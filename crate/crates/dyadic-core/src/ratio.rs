//! Exact rational scalars and their text form.
//!
//! Masses and coefficients are arbitrary-precision rationals. In files they
//! are written as `p/q` with decimal integers (or a bare integer when the
//! denominator is 1), which round-trips bit-exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// The scalar type used for all masses and coefficients.
pub type Rational = BigRational;

/// Error parsing a rational literal.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInt(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d` (test-friendly; panics on `d = 0`).
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `p`, `p/q`, or `-p/q` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, RatioParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, RatioParseError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| RatioParseError::BadInt(t.trim().to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(RatioParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Render a rational as `p/q`, or just `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
