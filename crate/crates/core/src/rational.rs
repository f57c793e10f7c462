//! Rational scalars and their canonical text forms.
//!
//! Certificates print every rational as `num/den` in lowest terms with a
//! positive denominator, so equal values always produce equal bytes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

/// Canonical `num/den` print (always with a slash).
pub fn to_canonical(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Strict parse of the canonical form: denominator positive, fraction reduced.
pub fn parse_canonical(s: &str) -> Result<Rational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("rational {s:?} is not of the form num/den")))?;
    let n: BigInt = parse_int(n)?;
    let d: BigInt = parse_int(d)?;
    if !d.is_positive() {
        return Err(Error::Parse(format!("rational {s:?} has non-positive denominator")));
    }
    if !n.gcd(&d).is_one() {
        return Err(Error::Parse(format!("rational {s:?} is not in lowest terms")));
    }
    Ok(Rational::new_raw(n, d))
}

/// Lenient parse used by the command line: `3`, `-2/6`, `0.001`, `1e-12`.
pub fn parse_lenient(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_int(n.trim())?;
        let d = parse_int(d.trim())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("rational {s:?} has zero denominator")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (
            m,
            e.parse::<i32>()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?,
        ),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() {
        return Err(Error::Parse(format!("empty number {s:?}")));
    }
    let mut value = Rational::from_integer(parse_int(&digits)?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

pub fn parse_int(s: &str) -> Result<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid integer {s:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("invalid integer {s:?}: {e}")))
}

/// Truncated decimal rendering with `digits` fractional digits.
pub fn rational_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r.abs() * Rational::from_integer(scale)).floor().to_integer();
    render_scaled(r.is_negative(), &scaled, digits)
}

pub(crate) fn render_scaled(negative: bool, scaled: &BigInt, digits: usize) -> String {
    let mut s = scaled.to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if negative && !scaled.is_zero() {
        s.insert(0, '-');
    }
    s
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod serde_canonical {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_canonical(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_canonical(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a [`num_bigint::BigInt`] as a decimal string.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_int(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let r = rat(-6, 4);
        assert_eq!(to_canonical(&r), "-3/2");
        assert_eq!(parse_canonical("-3/2").unwrap(), r);
        assert_eq!(to_canonical(&rat_int(7)), "7/1");
    }

    #[test]
    fn canonical_rejects_noncanonical() {
        assert!(parse_canonical("2/4").is_err());
        assert!(parse_canonical("1/-2").is_err());
        assert!(parse_canonical("3").is_err());
        assert!(parse_canonical("1/0").is_err());
        assert!(parse_canonical("+1/2").is_ok());
        assert!(parse_canonical(" 1/2").is_err());
    }

    #[test]
    fn lenient_forms() {
        assert_eq!(parse_lenient("1/1000000").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse_lenient("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_lenient("1e-12").unwrap(), Rational::new(1.into(), num_traits::pow(BigInt::from(10), 12)));
        assert_eq!(parse_lenient("-4/6").unwrap(), rat(-2, 3));
        assert!(parse_lenient("x").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_decimal(&rat(36, 31), 5), "1.16129");
        assert_eq!(rational_decimal(&rat(-1, 8), 3), "-0.125");
        assert_eq!(rational_decimal(&rat(3, 1), 0), "3");
    }
}
