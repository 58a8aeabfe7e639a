//! Exact rational arithmetic helpers.
//!
//! Every share value, entitlement and weight in this crate is a
//! [`Rational`], an arbitrary-precision fraction kept in lowest terms.
//! Nothing on the share-computation path touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Builds `numer/denom`. Panics if `denom == 0`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn from_u64(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or `"p"` into lowest terms.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim().parse::<BigInt>().ok()?, q.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

/// `⌊value⌋` as an `i64`, saturating on overflow.
pub fn floor_i64(value: &Rational) -> i64 {
    value.floor().to_integer().to_i64().unwrap_or(if value.is_negative() { i64::MIN } else { i64::MAX })
}

/// `⌊b·k⌋` for a non-negative rational `b`.
pub fn floor_mul(b: &Rational, k: u64) -> u64 {
    let product = b * from_u64(k);
    product.floor().to_integer().to_u64().unwrap_or(0)
}

/// `⌈value / 2⌉` for a non-negative integer.
pub fn ceil_half(value: u64) -> u64 {
    value.div_ceil(2)
}

/// Converts an integral rational to `u64`, if it is one.
pub fn as_u64(value: &Rational) -> Option<u64> {
    if value.is_integer() {
        value.to_integer().to_u64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse("2/6").unwrap(), ratio(1, 3));
        assert_eq!(format(&parse("2/6").unwrap()), "1/3");
        assert_eq!(format(&parse("4/2").unwrap()), "2");
        assert_eq!(parse(" -3 / 9 ").unwrap(), ratio(-1, 3));
        assert!(parse("1/0").is_none());
        assert!(parse("abc").is_none());
        assert!(parse("").is_none());
    }

    #[test]
    fn ceil_half_small() {
        assert_eq!(ceil_half(0), 0);
        assert_eq!(ceil_half(1), 1);
        assert_eq!(ceil_half(2), 1);
        assert_eq!(ceil_half(7), 4);
    }

    proptest! {
        #[test]
        fn floor_mul_matches_integer_division(p in 1i64..50, q in 1i64..50, k in 0u64..200) {
            let b = ratio(p, q);
            prop_assert_eq!(floor_mul(&b, k), (p as u64 * k) / q as u64);
        }

        #[test]
        fn ceil_half_matches_rational(k in 0u64..10_000) {
            let half = from_u64(k) / int(2);
            prop_assert_eq!(from_u64(ceil_half(k)), half.ceil());
        }

        #[test]
        fn format_parse_roundtrip(p in -1000i64..1000, q in 1i64..1000) {
            let value = ratio(p, q);
            prop_assert_eq!(parse(&format(&value)).unwrap(), value);
        }
    }
}
