use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly1::{push_term, Poly1};
use super::scalar::scalar_to_f64;
use super::{AlgebraError, Scalar};

/// One of the two variables of a [`Poly2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    First,
    Second,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::First => Var::Second,
            Var::Second => Var::First,
        }
    }
}

/// Sparse bivariate polynomial. Keys are exponent pairs `(i, j)` of
/// `first^i * second^j`; no zero coefficient is ever stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn var(v: Var) -> Self {
        let key = match v {
            Var::First => (1, 0),
            Var::Second => (0, 1),
        };
        Self::from_terms([(key, Scalar::one())])
    }

    /// `c0 + c1*first + c2*second`.
    pub fn linear(c0: &Scalar, c1: &Scalar, c2: &Scalar) -> Self {
        Self::from_terms([
            ((0, 0), c0.clone()),
            ((1, 0), c1.clone()),
            ((0, 1), c2.clone()),
        ])
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Scalar)>>(terms: I) -> Self {
        let mut map: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert_with(Scalar::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { terms: map }
    }

    pub fn from_i64_terms(terms: &[((u32, u32), i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(k, c)| (k, Scalar::from_integer(BigInt::from(c)))),
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Scalar {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|&k| pick(k, v)).max()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        for _ in 0..e {
            result = &result * self;
        }
        result
    }

    pub fn derivative(&self, v: Var) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(&(i, j), c)| {
            let (e, key) = match v {
                Var::First => (i, (i.checked_sub(1)?, j)),
                Var::Second => (j, (i, j.checked_sub(1)?)),
            };
            Some((key, c * Scalar::from_integer(BigInt::from(e))))
        }))
    }

    pub fn eval(&self, first: &Scalar, second: &Scalar) -> Scalar {
        self.coeffs_in(Var::First)
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * first + c.eval(second))
    }

    pub fn eval_f64(&self, first: f64, second: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, (&(i, j), c)| {
            acc + scalar_to_f64(c) * first.powi(i as i32) * second.powi(j as i32)
        })
    }

    /// Sum of the absolute values of the terms at a point.
    pub fn abs_scale_f64(&self, first: f64, second: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, (&(i, j), c)| {
            acc + (scalar_to_f64(c) * first.powi(i as i32) * second.powi(j as i32)).abs()
        })
    }

    pub fn max_abs_coeff(&self) -> Scalar {
        self.terms
            .values()
            .map(|c| num_traits::Signed::abs(c))
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// Exchanges the two variables.
    pub fn swap_vars(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.swap_vars()
    }

    /// Coefficients with respect to `v`, lowest power first; each one is a
    /// univariate polynomial in the other variable.
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly1> {
        let Some(d) = self.degree_in(v) else {
            return Vec::new();
        };
        let mut raw: Vec<Vec<Scalar>> = vec![Vec::new(); d as usize + 1];
        for (&k, c) in &self.terms {
            let (e, f) = (pick(k, v) as usize, pick(k, v.other()) as usize);
            let slot = &mut raw[e];
            if slot.len() <= f {
                slot.resize(f + 1, Scalar::zero());
            }
            slot[f] = c.clone();
        }
        raw.into_iter().map(Poly1::from_coeffs).collect()
    }

    /// Inverse of [`Poly2::coeffs_in`].
    pub fn from_coeffs_in(v: Var, coeffs: &[Poly1]) -> Self {
        let mut terms = Vec::new();
        for (e, p) in coeffs.iter().enumerate() {
            for (f, c) in p.coeffs().iter().enumerate() {
                let key = match v {
                    Var::First => (e as u32, f as u32),
                    Var::Second => (f as u32, e as u32),
                };
                terms.push((key, c.clone()));
            }
        }
        Self::from_terms(terms)
    }

    /// Embeds a univariate polynomial as a polynomial in `v` alone.
    pub fn from_poly1(v: Var, p: &Poly1) -> Self {
        Self::from_coeffs_in(v.other(), &[p.clone()])
    }

    /// Sets `v = value`, leaving a polynomial in the other variable.
    pub fn restrict(&self, v: Var, value: &Scalar) -> Poly1 {
        self.coeffs_in(v)
            .iter()
            .rev()
            .fold(Poly1::zero(), |acc, c| &acc.scale(value) + c)
    }

    /// `den^d * p(v = num/den)` with `d = degree_in(v)`: a polynomial in the
    /// other variable with the denominators cleared.
    pub fn substitute_rational(&self, v: Var, num: &Poly1, den: &Poly1) -> Poly1 {
        let coeffs = self.coeffs_in(v);
        let Some(d) = coeffs.len().checked_sub(1) else {
            return Poly1::zero();
        };
        let mut num_pow = vec![Poly1::one()];
        let mut den_pow = vec![Poly1::one()];
        for k in 1..=d {
            num_pow.push(&num_pow[k - 1] * num);
            den_pow.push(&den_pow[k - 1] * den);
        }
        let mut acc = Poly1::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(&(c * &num_pow[k]) * &den_pow[d - k]);
        }
        acc
    }

    /// `p(u(first, second), w(first, second))`.
    pub fn compose(&self, u: &Poly2, w: &Poly2) -> Self {
        let di = self.degree_in(Var::First).unwrap_or(0) as usize;
        let dj = self.degree_in(Var::Second).unwrap_or(0) as usize;
        let mut upow = vec![Poly2::one()];
        for k in 1..=di {
            upow.push(&upow[k - 1] * u);
        }
        let mut wpow = vec![Poly2::one()];
        for k in 1..=dj {
            wpow.push(&wpow[k - 1] * w);
        }
        let mut acc = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            acc = &acc + &(&upow[i as usize] * &wpow[j as usize]).scale(c);
        }
        acc
    }

    /// Exact quotient `self / divisor` by lexicographic leading-term division.
    pub fn exact_divide(&self, divisor: &Poly2) -> Result<Poly2, AlgebraError> {
        let (&(di, dj), dc) = divisor
            .terms
            .last_key_value()
            .ok_or(AlgebraError::ZeroDenominator)?;
        let dc_inv = Scalar::one() / dc;
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while let Some((&(ri, rj), rc)) = rem.terms.last_key_value() {
            if ri < di || rj < dj {
                return Err(AlgebraError::NonzeroRemainder);
            }
            let key = (ri - di, rj - dj);
            let c = rc * &dc_inv;
            let step = Poly2 {
                terms: divisor
                    .terms
                    .iter()
                    .map(|(&(i, j), d)| ((i + key.0, j + key.1), d * &c))
                    .collect(),
            };
            rem = &rem - &step;
            quot.insert(key, c);
        }
        Ok(Poly2 { terms: quot })
    }

    /// `first - second`.
    pub fn difference() -> Self {
        &Self::var(Var::First) - &Self::var(Var::Second)
    }

    pub fn display_with(&self, names: [&str; 2]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.cmp(a)));
        let mut out = String::new();
        for k in keys {
            let mut parts = Vec::new();
            for (e, name) in [k.0, k.1].into_iter().zip(names) {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            push_term(&mut out, &self.terms[&k], &parts.join("*"));
        }
        out
    }
}

fn pick(k: (u32, u32), v: Var) -> u32 {
    match v {
        Var::First => k.0,
        Var::Second => k.1,
    }
}

/// A [`Poly2`] with `f64` coefficients, for repeated evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2F64(Vec<(i32, i32, f64)>);

impl Poly2F64 {
    pub fn new(p: &Poly2) -> Self {
        Self(p.terms.iter().map(|(&(i, j), c)| (i as i32, j as i32, scalar_to_f64(c))).collect())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.0.iter().map(|&(i, j, c)| c * x.powi(i) * y.powi(j)).sum()
    }

    /// Sum of the absolute values of the terms at a point.
    pub fn abs_scale(&self, x: f64, y: f64) -> f64 {
        self.0.iter().map(|&(i, j, c)| (c * x.powi(i) * y.powi(j)).abs()).sum()
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(["x", "y"]))
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(Scalar::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Poly2 { terms }
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &(-rhs)
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut terms: BTreeMap<(u32, u32), Scalar> = BTreeMap::new();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &rhs.terms {
                *terms.entry((i + k, j + l)).or_insert_with(Scalar::zero) += a * b;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly2 { terms }
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{frac, int};
    use proptest::prelude::*;

    fn y1() -> Poly2 {
        Poly2::var(Var::First)
    }
    fn y2() -> Poly2 {
        Poly2::var(Var::Second)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&y1() - &y2()) * &(&y1() + &y2());
        assert_eq!(p, Poly2::from_i64_terms(&[((2, 0), 1), ((0, 2), -1)]));
        assert_eq!(p.exact_divide(&Poly2::difference()).unwrap(), &y1() + &y2());
    }

    #[test]
    fn inexact_division_is_reported() {
        let p = Poly2::from_i64_terms(&[((2, 0), 1), ((0, 0), 1)]);
        assert_eq!(
            p.exact_divide(&Poly2::difference()),
            Err(AlgebraError::NonzeroRemainder)
        );
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly2::from_i64_terms(&[((2, 1), 1)]);
        assert_eq!(p.derivative(Var::First), Poly2::from_i64_terms(&[((1, 1), 2)]));
        assert_eq!(p.eval(&frac(1, 2), &int(3)), frac(3, 4));
        assert!((p.eval_f64(0.5, 3.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn substitute_zero_kills_product() {
        let p = &y1() * &y2();
        let r = p.substitute_rational(Var::First, &Poly1::zero(), &Poly1::one());
        assert!(r.is_zero());
    }

    #[test]
    fn substitute_clears_denominators() {
        // y1^2 + y2 at y1 = t/2 -> 4 * (t^2/4 + t) = t^2 + 4t
        let p = &y1().pow(2) + &y2();
        let r = p.substitute_rational(Var::First, &Poly1::var(), &Poly1::from_i64(&[2]));
        assert_eq!(r, Poly1::from_i64(&[0, 4, 1]));
    }

    #[test]
    fn compose_with_affine_forms() {
        let p = &y1().pow(2) - &y2();
        let u = Poly2::linear(&int(1), &int(1), &int(0));
        let w = Poly2::linear(&int(0), &int(0), &int(2));
        // (x+1)^2 - 2y
        let expect = Poly2::from_i64_terms(&[((2, 0), 1), ((1, 0), 2), ((0, 0), 1), ((0, 1), -2)]);
        assert_eq!(p.compose(&u, &w), expect);
    }

    #[test]
    fn coefficient_round_trip() {
        let p = Poly2::from_i64_terms(&[((3, 1), 2), ((0, 2), -1), ((1, 0), 5)]);
        for v in [Var::First, Var::Second] {
            assert_eq!(Poly2::from_coeffs_in(v, &p.coeffs_in(v)), p);
        }
        assert_eq!(p.restrict(Var::First, &int(0)), Poly1::from_i64(&[0, 0, -1]));
    }

    fn small_poly() -> impl Strategy<Value = Poly2> {
        prop::collection::vec(((0u32..4, 0u32..4), -5i64..=5), 0..6)
            .prop_map(|t| Poly2::from_i64_terms(&t))
    }

    proptest! {
        #[test]
        fn ring_axioms(p in small_poly(), q in small_poly(), r in small_poly()) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn divide_undoes_multiply(p in small_poly(), q in small_poly()) {
            prop_assume!(!q.is_zero());
            prop_assert_eq!((&p * &q).exact_divide(&q).unwrap(), p);
        }

        #[test]
        fn eval_is_a_homomorphism(p in small_poly(), q in small_poly(), a in -6i64..6, b in -6i64..6) {
            let (a, b) = (frac(a, 3), frac(b, 2));
            prop_assert_eq!((&p * &q).eval(&a, &b), p.eval(&a, &b) * q.eval(&a, &b));
            prop_assert_eq!((&p + &q).eval(&a, &b), p.eval(&a, &b) + q.eval(&a, &b));
        }
    }
}
