//! Exact rational scalars and their text forms.
//!
//! Input accepts integers, decimal literals (optionally with an exponent)
//! and fractions `p/q`. Output prefers the shortest terminating decimal and
//! falls back to `p/q`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational used for every coordinate in the crate.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"-3"`, `"0.570333"`, `"1.5e-3"` or `"7/12"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Number(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let mut numer: BigInt = joined.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * Pow::pow(&ten, scale as u64))
    } else {
        Rational::new(numer, Pow::pow(&ten, scale.unsigned_abs()))
    };
    Ok(value)
}

/// Shortest exact decimal when the denominator has only factors 2 and 5,
/// otherwise `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let denom = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut rest = denom.clone();
    let (mut twos, mut fives) = (0u64, 0u64);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value.numer() * (Pow::pow(&BigInt::from(10), places) / &denom);
    let sign = if scaled.sign() == Sign::Minus { "-" } else { "" };
    let mut digits = scaled.abs().to_string();
    let places = places as usize;
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    format!("{sign}{}.{}", &digits[..split], &digits[split..])
}

/// Arithmetic mean of a non-empty slice.
pub fn mean(values: &[Rational]) -> Rational {
    let total: Rational = values.iter().sum();
    total / int(values.len() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_every_literal_kind() {
        assert_eq!(parse_rational("72").unwrap(), int(72));
        assert_eq!(parse_rational("-6").unwrap(), int(-6));
        assert_eq!(parse_rational("0.570333").unwrap(), ratio(570333, 1_000_000));
        assert_eq!(parse_rational("1.5e-3").unwrap(), ratio(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert_eq!(parse_rational(" 7/12 ").unwrap(), ratio(7, 12));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "nan", "-", "1e", "--1"] {
            assert!(parse_rational(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn formats_shortest_decimal_or_fraction() {
        assert_eq!(format_rational(&int(-3)), "-3");
        assert_eq!(format_rational(&ratio(1, 2)), "0.5");
        assert_eq!(format_rational(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_rational(&ratio(21, 20)), "1.05");
        assert_eq!(format_rational(&ratio(1, 3)), "1/3");
        assert_eq!(format_rational(&ratio(-7, 6)), "-7/6");
        assert_eq!(format_rational(&ratio(3, 2000)), "0.0015");
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(p in -100_000i64..100_000, q in 1i64..5000) {
            let v = ratio(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
        }
    }
}
