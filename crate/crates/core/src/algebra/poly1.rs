use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::scalar_to_f64;
use super::zpoly;
use super::{AlgebraError, Scalar};

/// Dense univariate polynomial with exact coefficients, lowest degree first.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Poly1 {
    coeffs: Vec<Scalar>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `t`.
    pub fn var() -> Self {
        Self::from_coeffs(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn monomial(c: Scalar, degree: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Scalar::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + scalar_to_f64(c))
    }

    /// Sum of |c_k t^k|; the natural scale for judging `|p(t)|` small.
    pub fn abs_scale_f64(&self, t: f64) -> f64 {
        let at = t.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * at + scalar_to_f64(c).abs())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Scalar::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Euclidean division over the rationals.
    ///
    /// # Panics
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = Scalar::one() / divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Scalar::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn exact_div(&self, divisor: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::NonzeroRemainder)
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&(Scalar::one() / lc)),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let g = zpoly::gcd(&zpoly::from_poly1(self), &zpoly::from_poly1(other));
        zpoly::to_poly1(&g).monic()
    }

    /// Positive rational multiple of `self` with coprime integer coefficients.
    /// The sign of every coefficient is preserved.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let ints = self.to_integer_coeffs();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        Self::from_coeffs(ints.into_iter().map(|c| Scalar::from_integer(c / &g)).collect())
    }

    /// Integer coefficients of `m * self`, where `m > 0` is the lcm of the
    /// denominators.
    pub fn to_integer_coeffs(&self) -> Vec<BigInt> {
        let m = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |m, c| m.lcm(c.denom()));
        self.coeffs
            .iter()
            .map(|c| (c * Scalar::from_integer(m.clone())).to_integer())
            .collect()
    }

    /// `p(t) -> p(a t + b)`.
    pub fn compose_linear(&self, a: &Scalar, b: &Scalar) -> Self {
        let lin = Self::from_coeffs(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> Scalar {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            push_term(&mut out, c, &mono);
        }
        out
    }
}

pub(crate) fn push_term(out: &mut String, c: &Scalar, mono: &str) {
    let negative = c.is_negative();
    let abs = c.abs();
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if mono.is_empty() {
        out.push_str(&abs.to_string());
    } else if abs.is_one() {
        out.push_str(mono);
    } else {
        out.push_str(&format!("{abs}*{mono}"));
    }
}

impl fmt::Display for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("t"))
    }
}

impl Add for &Poly1 {
    type Output = Poly1;
    fn add(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;
    fn sub(self, rhs: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly1 {
    type Output = Poly1;
    fn mul(self, rhs: &Poly1) -> Poly1 {
        if self.is_zero() || rhs.is_zero() {
            return Poly1::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::from_coeffs(out)
    }
}

impl Neg for &Poly1 {
    type Output = Poly1;
    fn neg(self) -> Poly1 {
        Poly1 { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::frac;

    #[test]
    fn evaluates_exactly() {
        // y^2 - 2 at 3/2
        let p = Poly1::from_i64(&[-2, 0, 1]);
        assert_eq!(p.eval(&frac(3, 2)), frac(1, 4));
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly1::from_i64(&[-1, 0, 1]); // t^2 - 1
        let b = Poly1::from_i64(&[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, Poly1::from_i64(&[-1, 1]));
        assert!(r.is_zero());
        let c = Poly1::from_i64(&[2, 3, 1]); // (t+1)(t+2)
        assert_eq!(a.gcd(&c), b);
        assert!(Poly1::from_i64(&[1, 0, 1]).exact_div(&b).is_err());
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Poly1::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly1::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn primitive_part_keeps_signs() {
        let p = Poly1::from_coeffs(vec![frac(-1, 2), frac(3, 4)]);
        assert_eq!(p.primitive_part(), Poly1::from_i64(&[-2, 3]));
    }

    #[test]
    fn compose_linear_shifts() {
        // (t^2)(2t + 1) = 4t^2 + 4t + 1
        let p = Poly1::from_i64(&[0, 0, 1]);
        assert_eq!(
            p.compose_linear(&frac(2, 1), &frac(1, 1)),
            Poly1::from_i64(&[1, 4, 4])
        );
    }
}
