use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};

use super::AlgebraError;

/// Exact rational number; `num_rational` keeps it reduced with a positive
/// denominator.
pub type Scalar = BigRational;

/// Parses an exact scalar literal.
///
/// Accepts integers (`"-3"`), fractions (`"-25/101"`) and decimals with an
/// optional exponent (`"0.149717"`, `"1.5e-3"`). Decimals are read as exact
/// base-10 fractions, so `"0.149717"` is `149717/1000000`.
pub fn parse_scalar(text: &str) -> Result<Scalar, AlgebraError> {
    let s = text.trim();
    let bad = || AlgebraError::InvalidScalar(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Scalar> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Scalar::from_integer(all_digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Scalar::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= Pow::pow(&ten, shift as u32);
    } else {
        value /= Pow::pow(&ten, (-shift) as u32);
    }
    Some(if negative { -value } else { value })
}

/// Nearest `f64` to an exact scalar.
pub fn scalar_to_f64(x: &Scalar) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // fall back to a scaled division for huge numerators and denominators
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let ns = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let ds = (d >> shift).to_f64().unwrap_or(f64::NAN);
    ns / ds
}

/// Exact rational value of a finite `f64`.
pub fn scalar_from_f64(x: f64) -> Scalar {
    Scalar::from_float(x).unwrap_or_else(Scalar::zero)
}

#[cfg(test)]
pub(crate) fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

#[cfg(test)]
pub(crate) fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_scalar("-25/101").unwrap(), frac(-25, 101));
        assert_eq!(parse_scalar("0.149717").unwrap(), frac(149717, 1_000_000));
        assert_eq!(parse_scalar("-0.00012165").unwrap(), frac(-12165, 100_000_000));
        assert_eq!(parse_scalar("3").unwrap(), int(3));
        assert_eq!(parse_scalar("1.5e-3").unwrap(), frac(3, 2000));
        assert_eq!(parse_scalar(" 2E2 ").unwrap(), int(200));
        assert_eq!(parse_scalar(".5").unwrap(), frac(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "-", "1e", "0x10"] {
            assert!(parse_scalar(s).is_err(), "{s}");
        }
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1_f64;
        assert_eq!(scalar_to_f64(&scalar_from_f64(x)), x);
    }
}
