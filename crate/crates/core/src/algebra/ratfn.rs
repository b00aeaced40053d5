use std::fmt;

use super::{AlgebraError, Poly1, Poly2, Scalar, Var};

/// Quotient of two bivariate polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub num: Poly2,
    pub den: Poly2,
}

impl RationalFn {
    pub fn new(num: Poly2, den: Poly2) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(num: Poly2) -> Self {
        Self { num, den: Poly2::one() }
    }

    /// `self(u, w)` for polynomial substitutions `u`, `w`.
    pub fn compose(&self, u: &Poly2, w: &Poly2) -> Result<Self, AlgebraError> {
        Self::new(self.num.compose(u, w), self.den.compose(u, w))
    }

    /// Equality as functions: `n1 * d2 == n2 * d1`.
    pub fn same_function(&self, other: &RationalFn) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn eval(&self, first: &Scalar, second: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(first, second);
        if num_traits::Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.eval(first, second) / d)
        }
    }

    pub fn eval_f64(&self, first: f64, second: f64) -> f64 {
        self.num.eval_f64(first, second) / self.den.eval_f64(first, second)
    }

    /// Sets `v = value`; fails when the restricted denominator vanishes
    /// identically. The result is reduced.
    pub fn restrict(&self, v: Var, value: &Scalar) -> Result<RationalFn1, AlgebraError> {
        RationalFn1::new(self.num.restrict(v, value), self.den.restrict(v, value))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly2::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Reduced quotient of two univariate polynomials with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn1 {
    pub num: Poly1,
    pub den: Poly1,
}

impl RationalFn1 {
    pub fn new(num: Poly1, den: Poly1) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        } else {
            (num, den)
        };
        let lc = den.leading().cloned().expect("nonzero denominator");
        let inv = num_traits::Inv::inv(lc);
        Ok(Self { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.num.eval_f64(t) / self.den.eval_f64(t)
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.den == Poly1::one() {
            self.num.display_with(var)
        } else {
            format!("({}) / ({})", self.num.display_with(var), self.den.display_with(var))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::int;

    #[test]
    fn restriction_reduces_common_factors() {
        // (x + y^2 - y) / (y - 1 + x) at x = 0 -> y
        let num = Poly2::from_i64_terms(&[((1, 0), 1), ((0, 2), 1), ((0, 1), -1)]);
        let den = Poly2::from_i64_terms(&[((0, 1), 1), ((0, 0), -1), ((1, 0), 1)]);
        let h = RationalFn::new(num, den).unwrap();
        let r = h.restrict(Var::First, &int(0)).unwrap();
        assert_eq!(r.num, Poly1::from_i64(&[0, 1]));
        assert_eq!(r.den, Poly1::one());
    }

    #[test]
    fn vanishing_denominator_is_an_error() {
        let h = RationalFn::new(Poly2::one(), Poly2::var(Var::First)).unwrap();
        assert_eq!(h.restrict(Var::First, &int(0)), Err(AlgebraError::ZeroDenominator));
        assert!(RationalFn::new(Poly2::one(), Poly2::zero()).is_err());
    }
}
