use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::scalar::{scalar_from_f64, scalar_to_f64};
use super::{zpoly, AlgebraError, Poly1, Scalar};

/// An isolated real root: the only root of the squarefree part in
/// `(lo, hi]`, or exactly `lo` when `lo == hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub lo: Scalar,
    pub hi: Scalar,
    pub approx: f64,
}

/// `p / gcd(p, p')` in primitive integer form.
pub fn squarefree(p: &Poly1) -> Poly1 {
    if p.degree().unwrap_or(0) == 0 {
        return p.primitive_part();
    }
    let a = zpoly::primitive(&zpoly::from_poly1(p));
    if zpoly::squarefree_mod_prime(&a) {
        return zpoly::to_poly1(&a);
    }
    let g = zpoly::gcd(&a, &zpoly::derivative(&a));
    let q = zpoly::exact_div(&a, &g).expect("gcd divides");
    zpoly::to_poly1(&zpoly::primitive(&q))
}

/// Sturm sequence `p, p', -rem(...)...`, each term scaled by a positive
/// constant to primitive integer form.
pub fn sturm_sequence(p: &Poly1) -> Vec<Poly1> {
    sturm_ints(p).iter().map(zpoly::to_poly1).collect()
}

fn sturm_ints(p: &Poly1) -> Vec<zpoly::ZPoly> {
    let a = zpoly::primitive(&zpoly::from_poly1(p));
    let d = zpoly::primitive(&zpoly::derivative(&a));
    let mut seq = vec![a];
    if d.is_empty() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = zpoly::prem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(zpoly::primitive(&zpoly::negate(&r)));
    }
    seq
}

/// Integer coefficient vectors for fast exact sign evaluation.
struct IntSeq {
    polys: Vec<Vec<BigInt>>,
}

impl IntSeq {
    fn new(p: &Poly1) -> Self {
        Self { polys: sturm_ints(p) }
    }

    fn variations(&self, x: &Scalar) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.polys {
            let s = sign_at(p, x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn count(&self, lo: &Scalar, hi: &Scalar) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// Sign of `sum a_i x^i` for integer `a_i` and rational `x = n/d`, computed as
/// the sign of `sum a_i n^i d^(k-i)` (`d > 0`).
fn sign_at(a: &[BigInt], x: &Scalar) -> Ordering {
    let Some(k) = a.len().checked_sub(1) else {
        return Ordering::Equal;
    };
    let (n, d) = (x.numer(), x.denom());
    let mut acc = a[k].clone();
    let mut dpow = BigInt::one();
    for i in (0..k).rev() {
        dpow *= d;
        acc = acc * n + &a[i] * &dpow;
    }
    acc.sign().cmp_zero()
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// Power of two strictly above the Cauchy bound `1 + max |a_i / a_n|`.
fn root_bound(p: &Poly1) -> Scalar {
    let lead = p.leading().expect("nonzero").abs();
    let max = p.coeffs().iter().map(|c| c.abs() / &lead).max().unwrap();
    let bound = max + Scalar::one();
    let mut b = Scalar::one();
    while b <= bound {
        b *= Scalar::from_integer(BigInt::from(2));
    }
    b
}

const REL_WIDTH: f64 = 1e-14;

/// All real roots of `p`, in increasing order, with disjoint isolating
/// intervals refined to relative width `1e-14`.
pub fn isolate_real_roots(p: &Poly1) -> Result<Vec<RealRoot>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let sq = squarefree(p);
    if sq.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let b = root_bound(&sq);
    let full = zpoly::primitive(&zpoly::from_poly1(&sq));
    let mut a = full.clone();
    let mut found = Vec::new();
    if a[0].is_zero() {
        a.remove(0);
        found.push((Scalar::zero(), Scalar::zero()));
    }
    for negative in [false, true] {
        let mut q = a.clone();
        if negative {
            for c in q.iter_mut().skip(1).step_by(2) {
                *c = -&*c;
            }
        }
        // q(t) proportional to p(±b t) on (0, 1)
        let mut scale = BigInt::one();
        let b_int = b.to_integer();
        for c in q.iter_mut() {
            *c *= &scale;
            scale *= &b_int;
        }
        let mut hits = Vec::new();
        descartes(zpoly::primitive(&q), &full, negative, b.clone(), &mut hits);
        for (lo, hi) in hits {
            found.push(if negative { (-hi, -lo) } else { (lo, hi) });
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let refiner = Refiner::new(&sq);
    Ok(found.into_iter().map(|(lo, hi)| refiner.refine(lo, hi)).collect())
}

/// Bisection of `(0, hi)` using Descartes' rule of signs. Each stacked `q(t)`
/// is proportional to `p(±(lo + (hi - lo) t))` with `q(0) != 0`. Returned
/// intervals have endpoints where `p` is nonzero; exact roots come back as
/// `(r, r)`.
fn descartes(
    q: zpoly::ZPoly,
    p: &[BigInt],
    negative: bool,
    hi: Scalar,
    out: &mut Vec<(Scalar, Scalar)>,
) {
    let mut stack = vec![(q, Scalar::zero(), hi)];
    let two = Scalar::from_integer(BigInt::from(2));
    let vanishes = |x: &Scalar| {
        let x = if negative { -x } else { x.clone() };
        sign_at(p, &x) == Ordering::Equal
    };
    while let Some((q, lo, hi)) = stack.pop() {
        match unit_variations(&q) {
            0 => continue,
            1 if !vanishes(&lo) && !vanishes(&hi) => {
                out.push((lo, hi));
                continue;
            }
            _ => {}
        }
        let mid = (&lo + &hi) / &two;
        let n = q.len() - 1;
        let mut left = q;
        let mut pow = BigInt::one();
        for c in left.iter_mut().take(n).rev() {
            pow <<= 1;
            *c *= &pow;
        }
        let mut right = taylor_shift(&left);
        if right[0].is_zero() {
            right.remove(0);
            out.push((mid.clone(), mid.clone()));
        }
        stack.push((zpoly::primitive(&right), mid.clone(), hi));
        stack.push((zpoly::primitive(&left), lo, mid));
    }
}

/// `q(t + 1)`.
fn taylor_shift(q: &[BigInt]) -> zpoly::ZPoly {
    let mut a = q.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = a[j + 1].clone();
            a[j] += next;
        }
    }
    a
}

/// Sign variations of `(1 + t)^n q(1 / (1 + t))`, an upper bound on the roots
/// of `q` in `(0, 1)` with the same parity.
fn unit_variations(q: &[BigInt]) -> usize {
    let rev: Vec<BigInt> = q.iter().rev().cloned().collect();
    let shifted = taylor_shift(&rev);
    let mut count = 0;
    let mut last = num_bigint::Sign::NoSign;
    for c in &shifted {
        let s = c.sign();
        if s == num_bigint::Sign::NoSign {
            continue;
        }
        if last != num_bigint::Sign::NoSign && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

struct Refiner {
    ints: Vec<BigInt>,
    /// Coefficients scaled to max magnitude one, for Newton steps.
    f: Vec<f64>,
    df: Vec<f64>,
}

impl Refiner {
    fn new(p: &Poly1) -> Self {
        let m = p.max_abs_coeff();
        let f: Vec<f64> = p.coeffs().iter().map(|c| scalar_to_f64(&(c / &m))).collect();
        let df = f.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        Self { ints: p.to_integer_coeffs(), f, df }
    }

    fn newton_point(&self, x: f64) -> Option<f64> {
        let fx = horner(&self.f, x);
        let dfx = horner(&self.df, x);
        let next = x - fx / dfx;
        next.is_finite().then_some(next)
    }

    fn refine(&self, mut lo: Scalar, mut hi: Scalar) -> RealRoot {
        let two = Scalar::from_integer(BigInt::from(2));
        if lo == hi {
            return exact(lo);
        }
        let s_lo = sign_at(&self.ints, &lo);
        for _ in 0..2000 {
            let (flo, fhi) = (scalar_to_f64(&lo), scalar_to_f64(&hi));
            let scale = flo.abs().max(fhi.abs());
            if fhi - flo <= REL_WIDTH * scale || scale == 0.0 {
                break;
            }
            let mid = (&lo + &hi) / &two;
            if let Some(x) = self.newton_point(scalar_to_f64(&mid)) {
                if x > flo && x < fhi {
                    let xs = scalar_from_f64(x);
                    if sign_at(&self.ints, &xs) == Ordering::Equal {
                        return exact(xs);
                    }
                    let w = (x.abs() * 4e-15).max(f64::MIN_POSITIVE);
                    let (a, b) = (scalar_from_f64(x - w), scalar_from_f64(x + w));
                    if a > lo && b < hi {
                        let (sa, sb) = (sign_at(&self.ints, &a), sign_at(&self.ints, &b));
                        if sa == Ordering::Equal {
                            return exact(a);
                        }
                        if sb == Ordering::Equal {
                            return exact(b);
                        }
                        if sa == s_lo && sb != s_lo {
                            lo = a;
                            hi = b;
                            continue;
                        }
                    }
                }
            }
            match sign_at(&self.ints, &mid) {
                Ordering::Equal => return exact(mid),
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        let approx = scalar_to_f64(&((&lo + &hi) / &two));
        RealRoot { lo, hi, approx }
    }
}

fn exact(x: Scalar) -> RealRoot {
    RealRoot { approx: scalar_to_f64(&x), lo: x.clone(), hi: x }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn count_roots(p: &Poly1, lo: &Scalar, hi: &Scalar) -> usize {
    let sq = squarefree(p);
    if sq.degree().unwrap_or(0) == 0 {
        return 0;
    }
    IntSeq::new(&sq).count(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let r = isolate_real_roots(&Poly1::from_i64(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].approx + 2f64.sqrt()).abs() < 1e-14);
        assert!((r[1].approx - 2f64.sqrt()).abs() < 1e-14);
        for root in &r {
            let w = scalar_to_f64(&(&root.hi - &root.lo));
            assert!(w <= 1e-14 * root.approx.abs());
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&Poly1::from_i64(&[1, 0, 1])).unwrap().is_empty());
        assert!(isolate_real_roots(&Poly1::from_i64(&[5])).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(isolate_real_roots(&Poly1::zero()), Err(AlgebraError::ZeroPolynomial));
    }

    #[test]
    fn repeated_and_rational_roots() {
        // (t - 1/2)^3 (t + 3) t
        let a = Poly1::from_coeffs(vec![frac(-1, 2), int(1)]);
        let p = &(&a.pow(3) * &Poly1::from_i64(&[3, 1])) * &Poly1::var();
        let r = isolate_real_roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        for (root, want) in r.iter().zip([-3.0, 0.0, 0.5]) {
            assert!((root.approx - want).abs() < 1e-14);
        }
        assert_eq!(squarefree(&p).degree(), Some(3));
    }

    #[test]
    fn close_roots_are_separated() {
        // (t - 1)(t - 1 - 1e-9)
        let e = frac(1, 1_000_000_000);
        let p = &Poly1::from_i64(&[-1, 1]) * &Poly1::from_coeffs(vec![-(int(1) + e), int(1)]);
        let r = isolate_real_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].hi <= r[1].lo);
    }

    fn int_poly() -> impl Strategy<Value = Poly1> {
        prop::collection::vec(-20i64..=20, 1..9).prop_map(|c| Poly1::from_i64(&c))
    }

    proptest! {
        #[test]
        fn intervals_are_disjoint_and_bracket_one_root(p in int_poly()) {
            prop_assume!(!p.is_zero());
            let roots = isolate_real_roots(&p).unwrap();
            let sq = squarefree(&p);
            prop_assert!(roots.len() <= sq.degree().unwrap_or(0));
            for w in roots.windows(2) {
                prop_assert!(w[0].hi < w[1].lo || (w[0].hi == w[0].lo && w[0].hi < w[1].lo));
            }
            for r in &roots {
                if r.lo == r.hi {
                    prop_assert!(sq.eval(&r.lo).is_zero());
                } else {
                    prop_assert_eq!(count_roots(&sq, &r.lo, &r.hi), 1);
                    let (a, b) = (sq.eval(&r.lo), sq.eval(&r.hi));
                    prop_assert!(a.is_negative() != b.is_negative() || b.is_zero());
                }
                prop_assert!(sq.eval_f64(r.approx).abs() <= 1e-6 * sq.abs_scale_f64(r.approx).max(1.0));
            }
        }
    }
}
