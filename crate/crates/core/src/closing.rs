//! Closing conditions on the switching line and their elimination.
//!
//! A crossing cycle meets `x = 0` at `(0, y1)` and `(0, y2)`, and each
//! subsystem's first integral takes equal values there. Removing the trivial
//! factor `y1 - y2` from `H(0, y1) - H(0, y2)` leaves one symmetric
//! polynomial per side; the pair of them is the [`ClosingSystem`].

use std::fmt;

use thiserror::Error;

use crate::algebra::{resultant, AlgebraError, Poly1, Poly2, RationalFn1, Scalar, Var};
use crate::centers::{restrict_to_sigma, CenterError, Family, Pairing, PiecewiseSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error("unknown pairing {0:?}")]
    UnknownPairing(String),
}

/// Data of one subsystem restricted to `x = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideData {
    pub family: Family,
    /// `H(0, y)`, reduced.
    pub sigma_integral: RationalFn1,
    /// `x`-component of the field on `x = 0`.
    pub normal: Poly1,
    /// Numerator of `H(0, y1) - H(0, y2)` divided by `y1 - y2`.
    pub closing: Poly2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosingSystem {
    pub plus: SideData,
    pub minus: SideData,
    /// Non-constant denominators of the restricted integrals; a solution
    /// must avoid their zeros.
    pub excluded: Vec<Poly1>,
}

impl ClosingSystem {
    /// A bare system from two closing polynomials, with no normals or
    /// excluded sets.
    pub fn from_polynomials(plus: Poly2, minus: Poly2) -> Self {
        let side = |closing: Poly2| SideData {
            family: Family::Lc,
            sigma_integral: RationalFn1 { num: Poly1::zero(), den: Poly1::one() },
            normal: Poly1::zero(),
            closing,
        };
        Self { plus: side(plus), minus: side(minus), excluded: Vec::new() }
    }

    pub fn pairing(&self) -> Pairing {
        Pairing::new(self.plus.family, self.minus.family)
    }

    pub fn has_normals(&self) -> bool {
        !self.plus.normal.is_zero() || !self.minus.normal.is_zero()
    }

    /// True when no excluded denominator (nearly) vanishes at `y`.
    pub fn avoids_excluded(&self, y: f64) -> bool {
        self.excluded
            .iter()
            .all(|d| d.eval_f64(y).abs() > 1e-12 * d.abs_scale_f64(y))
    }

    /// The same system with the roles of the two sides exchanged.
    pub fn swapped(&self) -> ClosingSystem {
        ClosingSystem {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
            excluded: self.excluded.clone(),
        }
    }
}

/// `(n(y1) d(y2) - n(y2) d(y1)) / (y1 - y2)` for `h = n/d`.
pub fn closing_polynomial(h: &RationalFn1) -> Result<Poly2, AlgebraError> {
    let at = |p: &Poly1, v: Var| Poly2::from_poly1(v, p);
    let lhs = &at(&h.num, Var::First) * &at(&h.den, Var::Second);
    let rhs = &at(&h.num, Var::Second) * &at(&h.den, Var::First);
    (&lhs - &rhs).exact_divide(&Poly2::difference())
}

fn side(spec: &crate::centers::CenterSpec) -> Result<SideData, ClosingError> {
    let sigma_integral = restrict_to_sigma(&spec.first_integral())?;
    let closing = closing_polynomial(&sigma_integral)?;
    let normal = spec.field().p.restrict(Var::First, &Scalar::from_integer(0.into()));
    Ok(SideData { family: spec.family(), sigma_integral, normal, closing })
}

pub fn build_closing_system(pw: &PiecewiseSystem) -> Result<ClosingSystem, ClosingError> {
    let plus = side(&pw.plus)?;
    let minus = side(&pw.minus)?;
    let mut excluded = Vec::new();
    for d in [&plus.sigma_integral.den, &minus.sigma_integral.den] {
        if d.degree().unwrap_or(0) > 0 && !excluded.contains(d) {
            excluded.push(d.clone());
        }
    }
    Ok(ClosingSystem { plus, minus, excluded })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// One closing polynomial is `k y1 + p(y2)` with constant `k`.
    LinearSolve,
    /// One closing polynomial is `q(y2) y1 + p(y2)`.
    RationalSolve,
    Resultant,
    /// One closing polynomial is a constant.
    Constant,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::LinearSolve => "linear solve",
            Strategy::RationalSolve => "rational solve",
            Strategy::Resultant => "resultant",
            Strategy::Constant => "constant",
        })
    }
}

/// Result of eliminating `y1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    /// Univariate polynomial in `y2`; zero means a continuum of solutions.
    pub poly: Poly1,
    pub strategy: Strategy,
    /// `y1 = num(y2) / den(y2)` for the solve strategies.
    pub explicit: Option<(Poly1, Poly1)>,
}

impl Elimination {
    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn is_continuum(&self) -> bool {
        self.poly.is_zero()
    }
}

/// `(q, p)` with `poly = q(y2) y1 + p(y2)` when `poly` has degree one in `y1`.
fn linear_in_y1(poly: &Poly2) -> Option<(Poly1, Poly1)> {
    if poly.degree_in(Var::First) != Some(1) {
        return None;
    }
    let c = poly.coeffs_in(Var::First);
    Some((c[1].clone(), c[0].clone()))
}

pub fn eliminate(cs: &ClosingSystem) -> Result<Elimination, ClosingError> {
    let (pp, pm) = (&cs.plus.closing, &cs.minus.closing);
    // Symmetric polynomials free of y1 are constants.
    for (p, other) in [(pp, pm), (pm, pp)] {
        if p.degree_in(Var::First).unwrap_or(0) == 0 {
            let c = p.coeff(0, 0);
            let poly = if num_traits::Zero::is_zero(&c) {
                // one equation is vacuous; the other alone leaves a curve
                // of solutions unless it is a nonzero constant too
                if other.degree_in(Var::First).unwrap_or(0) == 0 && !other.is_zero() {
                    Poly1::constant(other.coeff(0, 0))
                } else {
                    Poly1::zero()
                }
            } else {
                Poly1::constant(c)
            };
            return Ok(Elimination { poly, strategy: Strategy::Constant, explicit: None });
        }
    }
    let mut solves: Vec<(usize, Poly1, Poly1, &Poly2)> = Vec::new();
    for (p, other) in [(pp, pm), (pm, pp)] {
        if let Some((q, r)) = linear_in_y1(p) {
            solves.push((q.degree().unwrap_or(0), q, r, other));
        }
    }
    solves.sort_by_key(|s| s.0);
    if let Some((dq, q, r, other)) = solves.into_iter().next() {
        let num = -&r;
        let poly = other.substitute_rational(Var::First, &num, &q);
        let strategy = if dq == 0 { Strategy::LinearSolve } else { Strategy::RationalSolve };
        return Ok(Elimination { poly, strategy, explicit: Some((num, q)) });
    }
    let poly = resultant(pp, pm, Var::First)?;
    Ok(Elimination { poly, strategy: Strategy::Resultant, explicit: None })
}

/// Upper bound on the number of crossing limit cycles for a pairing, where
/// one is known.
pub fn max_cycles_bound(pairing: Pairing) -> Option<u32> {
    use Family::*;
    match (pairing.0, pairing.1) {
        (Lc, Lc) => Some(0),
        (Lc, S1) => Some(1),
        (Lc, S2) => Some(2),
        (Lc, S3) | (Lc, S4) => Some(3),
        (S1, S1) => Some(1),
        (S1, S2) => Some(3),
        (S1, S3) | (S1, S4) => Some(5),
        (S2, S2) => Some(8),
        (S2, S3) | (S2, S4) => Some(13),
        _ => None,
    }
}

/// Parses labels such as `"Lc-S3"` or `"s2-s4"`.
pub fn parse_pairing(label: &str) -> Result<Pairing, ClosingError> {
    let bad = || ClosingError::UnknownPairing(label.to_string());
    let (a, b) = label.split_once(['-', '_', '/']).ok_or_else(bad)?;
    let f: Family = a.parse().map_err(|_| bad())?;
    let g: Family = b.parse().map_err(|_| bad())?;
    Ok(Pairing::new(f, g))
}

/// Degree of the eliminated polynomial for generic parameters, where known.
pub fn generic_degree(pairing: Pairing) -> Option<usize> {
    use Family::*;
    match (pairing.0, pairing.1) {
        (Lc, S3) | (Lc, S4) => Some(6),
        (S1, S3) | (S1, S4) => Some(10),
        (S2, S2) => Some(16),
        (S2, S3) | (S2, S4) => Some(26),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub pairing: Pairing,
    pub strategy: Strategy,
    /// Degree of the eliminated polynomial (`None` for a continuum).
    pub degree: Option<usize>,
    /// `floor(degree / 2)`: solutions come in mirrored pairs.
    pub pair_bound: Option<usize>,
    pub generic_degree: Option<usize>,
    pub table_bound: Option<u32>,
}

impl BoundReport {
    pub fn new(cs: &ClosingSystem, elim: &Elimination) -> Self {
        let pairing = cs.pairing();
        let degree = elim.degree();
        Self {
            pairing,
            strategy: elim.strategy,
            degree,
            pair_bound: degree.map(|d| d / 2),
            generic_degree: generic_degree(pairing),
            table_bound: max_cycles_bound(pairing),
        }
    }

    /// Degree within the generic degree and pair bound within the table.
    pub fn consistent(&self) -> bool {
        let deg_ok = match (self.degree, self.generic_degree) {
            (Some(d), Some(g)) => d <= g,
            _ => true,
        };
        let bound_ok = match (self.pair_bound, self.table_bound) {
            (Some(p), Some(t)) => p <= t as usize,
            _ => true,
        };
        deg_ok && bound_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_scalar;
    use crate::centers::{AffineMap, CenterSpec, LinearCenterParams};

    fn s(t: &str) -> Scalar {
        parse_scalar(t).unwrap()
    }

    fn lc(v: [&str; 5]) -> CenterSpec {
        CenterSpec::Linear(LinearCenterParams::new(s(v[0]), s(v[1]), s(v[2]), s(v[3]), s(v[4])).unwrap())
    }

    fn cubic(f: Family, v: [&str; 6]) -> CenterSpec {
        let m = AffineMap::new(s(v[0]), s(v[1]), s(v[2]), s(v[3]), s(v[4]), s(v[5])).unwrap();
        CenterSpec::cubic(f, m).unwrap()
    }

    #[test]
    fn linear_side_closing() {
        let spec = lc(["-9/10", "-7/10", "-1/2", "1", "3/5"]);
        let pw = PiecewiseSystem::new(spec.clone(), spec);
        let cs = build_closing_system(&pw).unwrap();
        // (4A^2 + w^2)(y1 + y2) - 8BD
        let k = s("4") * s("81/100") + s("9/25");
        let expect = Poly2::from_terms([((1, 0), k.clone()), ((0, 1), k), ((0, 0), s("56/10"))]);
        assert_eq!(cs.plus.closing, expect);
        assert!(cs.excluded.is_empty());
    }

    #[test]
    fn generic_degrees_and_symmetry() {
        let m = ["3/10", "-1/5", "-1/5", "1/7", "1/10", "-3/10"];
        for (f, d) in [(Family::S1, 2), (Family::S2, 5), (Family::S3, 7), (Family::S4, 7)] {
            let spec = cubic(f, m);
            let pw = PiecewiseSystem::new(spec.clone(), spec);
            let cs = build_closing_system(&pw).unwrap();
            assert_eq!(cs.plus.closing.total_degree(), Some(d), "{f}");
            assert!(cs.plus.closing.is_symmetric());
            assert!(cs.plus.closing.exact_divide(&Poly2::difference()).is_err());
        }
    }

    #[test]
    fn strategy_selection() {
        let l = lc(["-9/10", "-7/10", "-1/2", "1", "3/5"]);
        let s1 = cubic(Family::S1, ["3/10", "-1/5", "-1/5", "1/7", "1/10", "-3/10"]);
        let s3 = cubic(Family::S3, ["1/2", "1/2", "3/10", "3/10", "1/3", "0"]);
        let cases = [
            (l.clone(), s3.clone(), Strategy::LinearSolve),
            (s1.clone(), s3.clone(), Strategy::RationalSolve),
            (l, s1.clone(), Strategy::LinearSolve),
            (s3.clone(), s3, Strategy::Resultant),
        ];
        for (p, m, want) in cases {
            let cs = build_closing_system(&PiecewiseSystem::new(p, m)).unwrap();
            assert_eq!(eliminate(&cs).unwrap().strategy, want);
        }
    }

    #[test]
    fn continuum_and_constants() {
        let y = Poly2::from_i64_terms(&[((1, 0), 1), ((0, 1), 1)]);
        let cs = ClosingSystem::from_polynomials(y.clone(), y);
        assert!(eliminate(&cs).unwrap().is_continuum());
        let one = Poly2::one();
        let cs = ClosingSystem::from_polynomials(one, Poly2::from_i64_terms(&[((1, 1), 1)]));
        let e = eliminate(&cs).unwrap();
        assert_eq!(e.strategy, Strategy::Constant);
        assert!(!e.is_continuum());
    }

    #[test]
    fn bounds_table() {
        let p = |l: &str| parse_pairing(l).unwrap();
        assert_eq!(max_cycles_bound(p("Lc-S3")), Some(3));
        assert_eq!(max_cycles_bound(p("S2-S2")), Some(8));
        assert_eq!(max_cycles_bound(p("S4-S2")), Some(13));
        assert_eq!(max_cycles_bound(p("S3-S3")), None);
        assert_eq!(max_cycles_bound(p("S3-S4")), None);
        assert!(parse_pairing("S5-S1").is_err());
        for f in Family::ALL {
            for g in Family::ALL {
                let pr = Pairing::new(f, g);
                if let (Some(d), Some(b)) = (generic_degree(pr), max_cycles_bound(pr)) {
                    assert!(d / 2 <= b as usize);
                }
            }
        }
    }
}
