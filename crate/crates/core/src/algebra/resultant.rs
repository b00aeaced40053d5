use num_bigint::BigInt;
use num_traits::{One, Pow};

use super::zpoly::{self, ZPoly};
use super::{AlgebraError, Poly1, Poly2, Scalar, Var};

/// Sylvester resultant of `p` and `q` with respect to `eliminate`, as a
/// polynomial in the other variable.
///
/// Denominators are cleared first, then the Sylvester determinant is taken
/// by fraction-free (Bareiss) elimination over polynomial entries, so every
/// intermediate division is exact.
pub fn resultant(p: &Poly2, q: &Poly2, eliminate: Var) -> Result<Poly1, AlgebraError> {
    let m = p.degree_in(eliminate).ok_or(AlgebraError::DegreeZero)? as usize;
    let n = q.degree_in(eliminate).ok_or(AlgebraError::DegreeZero)? as usize;
    if m == 0 || n == 0 {
        return Err(AlgebraError::DegreeZero);
    }
    let (cp, pc) = integer_coeffs(&p.coeffs_in(eliminate));
    let (cq, qc) = integer_coeffs(&q.coeffs_in(eliminate));

    let size = m + n;
    let mut rows: Vec<Vec<ZPoly>> = Vec::with_capacity(size);
    for (coeffs, count) in [(&pc, n), (&qc, m)] {
        for r in 0..count {
            let mut row = vec![ZPoly::new(); size];
            for (k, c) in coeffs.iter().rev().enumerate() {
                row[r + k] = zpoly::from_poly1(c);
            }
            rows.push(row);
        }
    }

    let det = zpoly::to_poly1(&bareiss_determinant(rows)?);
    // Res(cp*p, cq*q) = cp^n * cq^m * Res(p, q)
    let scale: Scalar = Pow::pow(&cp, n as u32) * Pow::pow(&cq, m as u32);
    Ok(det.scale(&(Scalar::one() / scale)))
}

/// Multiplies the coefficient list by the positive lcm of all denominators.
fn integer_coeffs(coeffs: &[Poly1]) -> (Scalar, Vec<Poly1>) {
    let all: Vec<Scalar> = coeffs.iter().flat_map(|c| c.coeffs().iter().cloned()).collect();
    let m = Poly1::from_coeffs(all)
        .coeffs()
        .iter()
        .fold(BigInt::one(), |m, c| num_integer::Integer::lcm(&m, c.denom()));
    let s = Scalar::from_integer(m);
    (s.clone(), coeffs.iter().map(|c| c.scale(&s)).collect())
}

fn bareiss_determinant(mut a: Vec<Vec<ZPoly>>) -> Result<ZPoly, AlgebraError> {
    let n = a.len();
    let mut sign_flip = false;
    let mut prev: ZPoly = vec![BigInt::one()];
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_empty() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_empty()) else {
                return Ok(ZPoly::new());
            };
            a.swap(k, swap);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = zpoly::sub(&zpoly::mul(&a[i][j], &a[k][k]), &zpoly::mul(&a[i][k], &a[k][j]));
                a[i][j] = zpoly::exact_div(&num, &prev).ok_or(AlgebraError::NonzeroRemainder)?;
            }
            a[i][k] = ZPoly::new();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign_flip { zpoly::negate(&det) } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::frac;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn circle_and_diagonal() {
        // Res_x(x^2 + y^2 - 1, x - y) = 2y^2 - 1
        let p = Poly2::from_i64_terms(&[((2, 0), 1), ((0, 2), 1), ((0, 0), -1)]);
        let q = Poly2::from_i64_terms(&[((1, 0), 1), ((0, 1), -1)]);
        assert_eq!(resultant(&p, &q, Var::First).unwrap(), Poly1::from_i64(&[-1, 0, 2]));
    }

    #[test]
    fn self_resultant_vanishes() {
        let p = Poly2::from_i64_terms(&[((2, 0), 3), ((1, 1), 1), ((0, 0), -2)]);
        assert!(resultant(&p, &p, Var::First).unwrap().is_zero());
    }

    #[test]
    fn constant_in_eliminated_variable_is_rejected() {
        let p = Poly2::from_i64_terms(&[((0, 2), 1)]);
        let q = Poly2::from_i64_terms(&[((1, 0), 1)]);
        assert_eq!(resultant(&p, &q, Var::First), Err(AlgebraError::DegreeZero));
    }

    #[test]
    fn rational_coefficients_are_handled() {
        // Res_x(x/2 - y, x - 1/3) = 1/6 - y
        let p = Poly2::from_terms([((1, 0), frac(1, 2)), ((0, 1), frac(-1, 1))]);
        let q = Poly2::from_terms([((1, 0), frac(1, 1)), ((0, 0), frac(-1, 3))]);
        let r = resultant(&p, &q, Var::First).unwrap();
        assert_eq!(r.eval(&frac(1, 6)), Scalar::zero());
        assert_eq!(r.degree(), Some(1));
    }

    /// Common roots in x of two univariate integer polynomials by direct search
    /// over the rational candidates k/6 in a small range.
    fn share_rational_root(p: &Poly1, q: &Poly1) -> bool {
        (-150..=150).any(|k| {
            let x = frac(k, 6);
            p.eval(&x).is_zero() && q.eval(&x).is_zero()
        })
    }

    fn linear_factor() -> impl Strategy<Value = Poly2> {
        // (a x + b y + c) with a != 0
        (1i64..4, -3i64..4, -3i64..4).prop_map(|(a, b, c)| {
            Poly2::from_i64_terms(&[((1, 0), a), ((0, 1), b), ((0, 0), c)])
        })
    }

    proptest! {
        // Leading coefficients in x are nonzero constants and every root in x
        // is a multiple of 1/6, so the scan below sees all common roots.
        #[test]
        fn vanishes_exactly_at_common_roots(
            f1 in linear_factor(), f2 in linear_factor(), g1 in linear_factor(), g2 in linear_factor()
        ) {
            let p = &f1 * &f2;
            let q = &g1 * &g2;
            let r = resultant(&p, &q, Var::First).unwrap();
            for y0 in -6i64..=6 {
                let y = frac(y0, 1);
                let pr = p.restrict(Var::Second, &y);
                let qr = q.restrict(Var::Second, &y);
                prop_assert_eq!(r.eval(&y).is_zero(), share_rational_root(&pr, &qr));
            }
        }
    }
}
