//! Exact rationals. Everything user-facing is a fully reduced `BigRational`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Heap-free rational for hot loops; converted with [`widen`] at the boundary.
pub type SmallRational = num_rational::Ratio<i128>;

pub fn widen(r: &SmallRational) -> Rational {
    Rational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn narrow(r: &Rational) -> Option<SmallRational> {
    Some(SmallRational::new_raw(
        r.numer().to_i128()?,
        r.denom().to_i128()?,
    ))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `Some(n)` when the rational is an integer that fits in `i64`.
pub fn as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

/// `num/den` with the sign carried by the numerator; integers print without `/1`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n` or `n/m` (optionally signed). Zero denominators are rejected.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("15/7"), Some(rat(15, 7)));
        assert_eq!(parse_rational(" -4/6 "), Some(rat(-2, 3)));
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&rat(4, -14)), "-2/7");
        assert_eq!(fmt_rational(&int(0)), "0");
    }
}
