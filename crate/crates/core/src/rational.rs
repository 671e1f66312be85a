//! Exact rational helpers and the `p/q` text form used in files and reports.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

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

pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

/// Canonical text form: always `p/q` in lowest terms, sign on the numerator.
pub fn format(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `p`, `p/q`, optionally signed. Denominator must be positive.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Numerator of `x` over the denominator `den` (which must be a multiple of `x.denom()`).
pub fn scaled(x: &Rational, den: &BigInt) -> BigInt {
    x.numer() * (den / x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse("-2"), Some(int(-2)));
        assert_eq!(parse(" 0 "), Some(zero()));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1/-2"), None);
        assert_eq!(parse("0.5"), None);
        assert_eq!(parse("/2"), None);
        assert_eq!(parse(""), None);
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&zero()), "0/1");
        assert_eq!(format(&ratio(-3, 9)), "-1/3");
    }

    #[test]
    fn lcm_scaling() {
        let xs = [ratio(1, 4), ratio(1, 6), int(1)];
        let d = common_denominator(&xs);
        assert_eq!(d, BigInt::from(12));
        assert_eq!(scaled(&xs[1], &d), BigInt::from(2));
    }
}
