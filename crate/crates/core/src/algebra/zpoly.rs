//! Integer coefficient vectors (lowest degree first) for the inner loops of
//! gcd, Sturm and resultant computations, where rational normalization after
//! every operation would dominate the cost.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Poly1, Scalar};

pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub(crate) fn from_poly1(p: &Poly1) -> ZPoly {
    trim(p.to_integer_coeffs())
}

pub(crate) fn to_poly1(a: &ZPoly) -> Poly1 {
    Poly1::from_coeffs(a.iter().map(|c| Scalar::from_integer(c.clone())).collect())
}

pub(crate) fn mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub(crate) fn sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect())
}

/// `a / b` when `b` divides `a` over the integers.
pub(crate) fn exact_div(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let db = b.len().checked_sub(1)?;
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() <= db {
        return None;
    }
    let lead = &b[db];
    let mut rem = a.clone();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &rem[k + db];
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (j, c) in b.iter().enumerate() {
            rem[k + j] -= &q * c;
        }
        quot[k] = q;
    }
    rem.iter().all(Zero::is_zero).then(|| trim(quot))
}

/// Pseudo-remainder `|lc(b)|^(deg a - deg b + 1) a mod b`; the multiplier is
/// positive so signs are preserved.
pub(crate) fn prem(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let db = b.len() - 1;
    if a.len() <= db {
        return a.clone();
    }
    let lead = &b[db];
    let mut rem = a.clone();
    let steps = a.len() - db;
    for k in (0..steps).rev() {
        let top = rem[k + db].clone();
        for c in rem.iter_mut() {
            *c *= lead;
        }
        if !top.is_zero() {
            for (j, c) in b.iter().enumerate() {
                rem[k + j] -= &top * c;
            }
        }
    }
    rem.truncate(db);
    let mut rem = trim(rem);
    if lead.is_negative() && steps % 2 == 1 {
        for c in rem.iter_mut() {
            *c = -&*c;
        }
    }
    rem
}

pub(crate) fn content(a: &ZPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides by the (positive) content.
pub(crate) fn primitive(a: &ZPoly) -> ZPoly {
    let g = content(a);
    if g.is_zero() || g.is_one() {
        return a.clone();
    }
    a.iter().map(|c| c / &g).collect()
}

pub(crate) fn derivative(a: &ZPoly) -> ZPoly {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
}

pub(crate) fn negate(a: &ZPoly) -> ZPoly {
    a.iter().map(|c| -c).collect()
}

/// Primitive gcd with positive leading coefficient.
pub(crate) fn gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive(&prem(&a, &b));
        a = b;
        b = r;
    }
    if a.last().is_some_and(|c| c.sign() == Sign::Minus) {
        a = negate(&a);
    }
    a
}

/// Sufficient test for `a` being squarefree: `gcd(a, a')` is constant modulo
/// a prime that keeps both degrees.
pub(crate) fn squarefree_mod_prime(a: &ZPoly) -> bool {
    const PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847, 1_000_000_007];
    let Some(n) = a.len().checked_sub(1) else {
        return false;
    };
    let der = derivative(a);
    PRIMES.iter().any(|&m| {
        let reduce = |c: &BigInt| -> u64 {
            let r = c.mod_floor(&BigInt::from(m));
            r.try_into().expect("reduced below modulus")
        };
        let f: Vec<u64> = a.iter().map(reduce).collect();
        let g: Vec<u64> = der.iter().map(reduce).collect();
        if f[n] == 0 || g.get(n.wrapping_sub(1)).copied().unwrap_or(0) == 0 {
            return false;
        }
        mod_gcd_degree(f, g, m) == 0
    })
}

fn mod_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> usize {
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % m as u128) as u64;
    let inv = |x: u64| {
        let (mut base, mut e, mut acc) = (x, m - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        acc
    };
    let strip = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    while !b.is_empty() {
        let db = b.len() - 1;
        let lead_inv = inv(b[db]);
        while a.len() > db {
            let k = a.len() - 1 - db;
            let q = mulm(a[a.len() - 1], lead_inv);
            for (j, c) in b.iter().enumerate() {
                a[k + j] = (a[k + j] + m - mulm(q, *c)) % m;
            }
            strip(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
