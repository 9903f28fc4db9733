//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical text: `numerator/denominator`, also for integers (`1/1`, `0/1`).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses a non-negative rational written as `p/q` in lowest terms, or as a
/// bare integer.
pub fn parse(s: &str) -> Result<Rational, Error> {
    let bad = |why: &str| Error::Format(format!("rational {s:?}: {why}"));
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    if p.starts_with('-') || q.starts_with('-') {
        return Err(bad("negative entries are not probabilities"));
    }
    if !digits(p) || !digits(q) {
        return Err(bad("expected p/q with decimal integers"));
    }
    let p: BigInt = p.parse().map_err(|_| bad("bad numerator"))?;
    let q: BigInt = q.parse().map_err(|_| bad("bad denominator"))?;
    if q.is_zero() {
        return Err(bad("zero denominator"));
    }
    if !p.gcd(&q).is_one() {
        return Err(bad("not in lowest terms"));
    }
    Ok(Rational::new_raw(p, q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&int(1)), "1/1");
        assert_eq!(format(&zero()), "0/1");
        assert_eq!(parse("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse("1").unwrap(), int(1));
        assert_eq!(parse("0/1").unwrap(), zero());
        for bad in ["2/4", "0/5", "-1/2", "1/-2", "1/0", "a/b", "", "1/2/3", " 1/2"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
