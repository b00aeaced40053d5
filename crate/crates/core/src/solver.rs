//! Real solutions `(y1, y2)`, `y1 < y2`, of a closing system.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{isolate_real_roots, scalar_from_f64, AlgebraError, Poly1, Poly2, Poly2F64, Var};
use crate::closing::{eliminate, BoundReport, ClosingError, ClosingSystem, Elimination, Strategy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Closing(#[from] ClosingError),
    #[error("Newton refinement from ({0}, {1}) did not converge")]
    NoConvergence(f64, f64),
}

impl From<AlgebraError> for SolverError {
    fn from(e: AlgebraError) -> Self {
        SolverError::Closing(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Largest scaled residual accepted for a refined pair.
    pub residual_tol: f64,
    /// Scaled residual below which a back-substituted candidate counts as a
    /// common root.
    pub match_tol: f64,
    /// Pairs closer than this in max-norm are merged.
    pub dedupe_tol: f64,
    /// Normalized Jacobian determinant below which a pair is not isolated.
    pub isolation_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-10, match_tol: 1e-8, dedupe_tol: 1e-8, isolation_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingPair {
    pub y1: f64,
    pub y2: f64,
    /// Scaled residuals of the plus and minus closing polynomials.
    pub residual_plus: f64,
    pub residual_minus: f64,
    /// Jacobian determinant divided by the product of the gradient norms.
    pub jacobian_det: f64,
    pub strategy: Strategy,
}

impl CrossingPair {
    pub fn is_isolated(&self, tol: f64) -> bool {
        self.jacobian_det.abs() > tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscardReason {
    /// One endpoint is not a crossing point, or both halves leave the line
    /// on the same side.
    NotCrossing,
    /// An endpoint is a zero of a first-integral denominator.
    Excluded,
    /// Residual above tolerance after refinement.
    Residual,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscardReason::NotCrossing => "not crossing",
            DiscardReason::Excluded => "on an excluded set",
            DiscardReason::Residual => "residual too large",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscardedPair {
    pub pair: CrossingPair,
    pub reason: DiscardReason,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub pairs: Vec<CrossingPair>,
    pub discarded: Vec<DiscardedPair>,
    /// Solutions with `y1 = y2`; never cycles.
    pub diagonal: Vec<f64>,
    pub continuum: bool,
    pub bound: BoundReport,
    /// Number of real roots of the eliminated polynomial.
    pub real_roots: usize,
}

impl SolveReport {
    /// Every real solution with `y1 < y2`, kept or discarded.
    pub fn all_solutions(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = self.pairs.iter().map(|p| (p.y1, p.y2)).collect();
        v.extend(self.discarded.iter().map(|d| (d.pair.y1, d.pair.y2)));
        v
    }
}

/// The two closing polynomials with their partial derivatives.
struct Equations<'a> {
    p: &'a Poly2,
    m: &'a Poly2,
    grads: [Poly2; 4],
}

impl<'a> Equations<'a> {
    fn new(cs: &'a ClosingSystem) -> Self {
        let (p, m) = (&cs.plus.closing, &cs.minus.closing);
        let grads = [
            p.derivative(Var::First),
            p.derivative(Var::Second),
            m.derivative(Var::First),
            m.derivative(Var::Second),
        ];
        Self { p, m, grads }
    }

    fn residuals(&self, y1: f64, y2: f64) -> (f64, f64) {
        (scaled(self.p, y1, y2), scaled(self.m, y1, y2))
    }

    fn jacobian(&self, y1: f64, y2: f64) -> [f64; 4] {
        let g = &self.grads;
        [g[0].eval_f64(y1, y2), g[1].eval_f64(y1, y2), g[2].eval_f64(y1, y2), g[3].eval_f64(y1, y2)]
    }

    fn normalized_det(&self, y1: f64, y2: f64) -> f64 {
        let j = self.jacobian(y1, y2);
        let n1 = j[0].hypot(j[1]);
        let n2 = j[2].hypot(j[3]);
        if n1 == 0.0 || n2 == 0.0 {
            return 0.0;
        }
        (j[0] * j[3] - j[1] * j[2]) / (n1 * n2)
    }
}

/// `|p(y1, y2)|` over the sum of the absolute values of its terms.
fn scaled(p: &Poly2, y1: f64, y2: f64) -> f64 {
    let s = p.abs_scale_f64(y1, y2);
    if s == 0.0 {
        0.0
    } else {
        p.eval_f64(y1, y2).abs() / s
    }
}

const NEWTON_ITERS: usize = 30;
const NEWTON_TOL: f64 = 1e-12;

fn newton(eq: &Equations, y1: f64, y2: f64) -> Option<(f64, f64)> {
    let (mut a, mut b) = (y1, y2);
    let norm = |(r1, r2): (f64, f64)| r1.max(r2);
    let mut res = norm(eq.residuals(a, b));
    for _ in 0..NEWTON_ITERS {
        if res <= NEWTON_TOL {
            return Some((a, b));
        }
        let j = eq.jacobian(a, b);
        let det = j[0] * j[3] - j[1] * j[2];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let (f, g) = (eq.p.eval_f64(a, b), eq.m.eval_f64(a, b));
        let da = (f * j[3] - g * j[1]) / det;
        let db = (g * j[0] - f * j[2]) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let (na, nb) = (a - t * da, b - t * db);
            let nr = norm(eq.residuals(na, nb));
            if nr.is_finite() && nr < res {
                a = na;
                b = nb;
                res = nr;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let step = (t * da).abs().max((t * db).abs());
        if !accepted || step <= 1e-16 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if a.abs().max(b.abs()) > 1e12 {
            return None;
        }
    }
    (res <= NEWTON_TOL).then_some((a, b))
}

/// Damped two-dimensional Newton on the closing polynomials from `seed`.
pub fn refine(cs: &ClosingSystem, seed: (f64, f64)) -> Result<CrossingPair, SolverError> {
    let eq = Equations::new(cs);
    let (y1, y2) = newton(&eq, seed.0, seed.1).ok_or(SolverError::NoConvergence(seed.0, seed.1))?;
    Ok(pair_at(&eq, y1, y2, Strategy::Resultant))
}

fn pair_at(eq: &Equations, y1: f64, y2: f64, strategy: Strategy) -> CrossingPair {
    let (rp, rm) = eq.residuals(y1, y2);
    CrossingPair {
        y1,
        y2,
        residual_plus: rp,
        residual_minus: rm,
        jacobian_det: eq.normalized_det(y1, y2),
        strategy,
    }
}

/// Candidate `y1` values for a root `y2` of the eliminated polynomial.
fn back_substitute(cs: &ClosingSystem, elim: &Elimination, y2: f64, opts: &SolveOptions) -> Vec<f64> {
    if let Some((num, den)) = &elim.explicit {
        let d = den.eval_f64(y2);
        if d.abs() > 1e-9 * den.abs_scale_f64(y2) {
            return vec![num.eval_f64(y2) / d];
        }
    }
    let (pp, pm) = (&cs.plus.closing, &cs.minus.closing);
    let deg = |p: &Poly2| p.degree_in(Var::First).unwrap_or(0);
    let (first, second) = if deg(pp) <= deg(pm) { (pp, pm) } else { (pm, pp) };
    let y2s = scalar_from_f64(y2);
    let mut restricted = first.restrict(Var::Second, &y2s);
    let mut check = second;
    if restricted.degree().unwrap_or(0) == 0 {
        restricted = second.restrict(Var::Second, &y2s);
        check = first;
    }
    if restricted.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    isolate_real_roots(&restricted)
        .map(|roots| {
            roots
                .into_iter()
                .map(|r| r.approx)
                .filter(|&y1| scaled(check, y1, y2) <= opts.match_tol)
                .collect()
        })
        .unwrap_or_default()
}

fn x_sign(normal: &Poly1, y: f64) -> f64 {
    normal.eval_f64(y)
}

/// True when `(0, y1)` and `(0, y2)` are crossing points and the plus half
/// of the orbit runs between them.
pub fn crossing_ok(cs: &ClosingSystem, y1: f64, y2: f64) -> bool {
    if !cs.has_normals() {
        return true;
    }
    let (xp1, xp2) = (x_sign(&cs.plus.normal, y1), x_sign(&cs.plus.normal, y2));
    let (xm1, xm2) = (x_sign(&cs.minus.normal, y1), x_sign(&cs.minus.normal, y2));
    xp1 * xm1 > 0.0 && xp2 * xm2 > 0.0 && xp1 * xp2 < 0.0
}

pub fn solve_closing(cs: &ClosingSystem) -> Result<SolveReport, SolverError> {
    solve_closing_with(cs, &SolveOptions::default())
}

pub fn solve_closing_with(cs: &ClosingSystem, opts: &SolveOptions) -> Result<SolveReport, SolverError> {
    let elim = eliminate(cs)?;
    let bound = BoundReport::new(cs, &elim);
    if elim.is_continuum() {
        return Ok(SolveReport {
            pairs: Vec::new(),
            discarded: Vec::new(),
            diagonal: Vec::new(),
            continuum: true,
            bound,
            real_roots: 0,
        });
    }
    let roots = isolate_real_roots(&elim.poly)?;
    let eq = Equations::new(cs);
    let mut candidates: Vec<CrossingPair> = roots
        .par_iter()
        .flat_map_iter(|r| {
            let y2 = r.approx;
            back_substitute(cs, &elim, y2, opts)
                .into_iter()
                .map(move |y1| (y1, y2))
                .collect::<Vec<_>>()
        })
        .map(|(y1, y2)| {
            let (a, b) = newton(&eq, y1, y2).unwrap_or((y1, y2));
            pair_at(&eq, a, b, elim.strategy)
        })
        .collect();
    candidates.sort_by(|a, b| a.y1.total_cmp(&b.y1).then(a.y2.total_cmp(&b.y2)));

    let mut pairs = Vec::new();
    let mut discarded = Vec::new();
    let mut diagonal: Vec<f64> = Vec::new();
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for c in candidates {
        let tol = opts.dedupe_tol * (1.0 + c.y1.abs().max(c.y2.abs()));
        if (c.y2 - c.y1).abs() <= tol {
            if !diagonal.iter().any(|d| (d - c.y1).abs() <= tol) {
                diagonal.push(c.y1);
            }
            continue;
        }
        if c.y1 > c.y2 {
            continue;
        }
        if seen.iter().any(|&(a, b)| (a - c.y1).abs().max((b - c.y2).abs()) <= tol) {
            continue;
        }
        seen.push((c.y1, c.y2));
        let reason = if c.residual_plus.max(c.residual_minus) > opts.residual_tol {
            Some(DiscardReason::Residual)
        } else if !(cs.avoids_excluded(c.y1) && cs.avoids_excluded(c.y2)) {
            Some(DiscardReason::Excluded)
        } else if !crossing_ok(cs, c.y1, c.y2) {
            Some(DiscardReason::NotCrossing)
        } else {
            None
        };
        match reason {
            Some(reason) => discarded.push(DiscardedPair { pair: c, reason }),
            None => pairs.push(c),
        }
    }
    Ok(SolveReport { pairs, discarded, diagonal, continuum: false, bound, real_roots: roots.len() })
}

/// A grid cell where both closing polynomials change sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCell {
    pub i: usize,
    pub j: usize,
    pub y1: (f64, f64),
    pub y2: (f64, f64),
}

/// Cells of a `grid_n x grid_n` grid over
/// `window = [y1_lo, y1_hi, y2_lo, y2_hi]` where both closing polynomials
/// change sign and their linear interpolants on one of the cell's two
/// triangles vanish at a common point. The triangle test rejects cells that
/// two nearly parallel zero curves merely pass through.
pub fn brute_force_scan(cs: &ClosingSystem, window: [f64; 4], grid_n: usize) -> Vec<ScanCell> {
    assert!(grid_n >= 2, "grid needs at least two cells per side");
    let n = grid_n;
    let node = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * k as f64 / n as f64;
    let values = |p: &Poly2| -> Vec<Vec<f64>> {
        let p = Poly2F64::new(p);
        (0..=n)
            .into_par_iter()
            .map(|i| {
                let a = node(i, window[0], window[1]);
                (0..=n).map(|j| p.eval(a, node(j, window[2], window[3]))).collect()
            })
            .collect()
    };
    let (vp, vm) = (values(&cs.plus.closing), values(&cs.minus.closing));
    let corners = |v: &Vec<Vec<f64>>, i: usize, j: usize| [v[i][j], v[i + 1][j], v[i][j + 1], v[i + 1][j + 1]];
    let changes = |c: &[f64; 4]| c.iter().any(|&v| v >= 0.0) && c.iter().any(|&v| v <= 0.0);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (cp, cm) = (corners(&vp, i, j), corners(&vm, i, j));
            if changes(&cp) && changes(&cm) && cell_crossing(&cp, &cm) {
                out.push(ScanCell {
                    i,
                    j,
                    y1: (node(i, window[0], window[1]), node(i + 1, window[0], window[1])),
                    y2: (node(j, window[2], window[3]), node(j + 1, window[2], window[3])),
                });
            }
        }
    }
    out
}

/// Corner values are ordered `(0,0), (1,0), (0,1), (1,1)`. Each triangle is
/// given by a vertex and its two neighbours along the cell edges.
fn cell_crossing(f: &[f64; 4], g: &[f64; 4]) -> bool {
    [(0, 1, 2), (3, 2, 1)].iter().any(|&(o, a, b)| {
        let (f0, fa, fb) = (f[o], f[a] - f[o], f[b] - f[o]);
        let (g0, ga, gb) = (g[o], g[a] - g[o], g[b] - g[o]);
        let det = fa * gb - fb * ga;
        if det == 0.0 {
            return false;
        }
        let s = (-f0 * gb + fb * g0) / det;
        let t = (-fa * g0 + f0 * ga) / det;
        let eps = 1e-12;
        s >= -eps && t >= -eps && s + t <= 1.0 + eps
    })
}

/// Groups cells that touch (including diagonally) into clusters.
pub fn cluster_cells(cells: &[ScanCell]) -> Vec<Vec<ScanCell>> {
    let mut clusters: Vec<Vec<ScanCell>> = Vec::new();
    let mut assigned = vec![false; cells.len()];
    for start in 0..cells.len() {
        if assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut group = vec![cells[start]];
        let mut k = 0;
        while k < group.len() {
            let c = group[k];
            for (idx, d) in cells.iter().enumerate() {
                if !assigned[idx] && c.i.abs_diff(d.i) <= 1 && c.j.abs_diff(d.j) <= 1 {
                    assigned[idx] = true;
                    group.push(*d);
                }
            }
            k += 1;
        }
        clusters.push(group);
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(terms: &[((u32, u32), i64)]) -> Poly2 {
        Poly2::from_i64_terms(terms)
    }

    /// y1 + y2 = 1 and y1 y2 = -2: solutions (-1, 2) and (2, -1).
    fn toy() -> ClosingSystem {
        let p = sym(&[((1, 0), 1), ((0, 1), 1), ((0, 0), -1)]);
        let m = sym(&[((1, 1), 1), ((0, 0), 2)]);
        ClosingSystem::from_polynomials(p, m)
    }

    #[test]
    fn toy_system_has_one_pair() {
        let r = solve_closing(&toy()).unwrap();
        assert_eq!(r.pairs.len(), 1);
        let p = &r.pairs[0];
        assert!((p.y1 + 1.0).abs() < 1e-12 && (p.y2 - 2.0).abs() < 1e-12);
        assert_eq!(p.strategy, Strategy::LinearSolve);
        assert!(p.is_isolated(1e-9));
    }

    #[test]
    fn identical_equations_are_a_continuum() {
        let y = sym(&[((1, 0), 1), ((0, 1), 1)]);
        let r = solve_closing(&ClosingSystem::from_polynomials(y.clone(), y)).unwrap();
        assert!(r.continuum);
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn exact_seed_is_unchanged() {
        let p = refine(&toy(), (-1.0, 2.0)).unwrap();
        assert_eq!((p.y1, p.y2), (-1.0, 2.0));
    }

    #[test]
    fn far_seed_fails() {
        // y1^2 + y2^2 + 1 has no real zeros
        let p = sym(&[((2, 0), 1), ((0, 2), 1), ((0, 0), 1)]);
        let cs = ClosingSystem::from_polynomials(p.clone(), p);
        assert!(matches!(refine(&cs, (100.0, 200.0)), Err(SolverError::NoConvergence(..))));
    }

    #[test]
    fn scan_finds_both_mirrors() {
        let cells = brute_force_scan(&toy(), [-3.0, 3.0, -3.0, 3.0], 60);
        let clusters = cluster_cells(&cells);
        assert_eq!(clusters.len(), 2);
        let empty = brute_force_scan(&toy(), [5.0, 6.0, 5.0, 6.0], 10);
        assert!(empty.is_empty());
    }

    #[test]
    fn resultant_route_matches_roots() {
        // y1^2 + y2^2 = 5 and y1 y2 = 2: pairs (1, 2) and (-2, -1)
        let p = sym(&[((2, 0), 1), ((0, 2), 1), ((0, 0), -5)]);
        let m = sym(&[((1, 1), 1), ((0, 0), -2)]);
        // make m quadratic in y1 so no explicit solve applies
        let m = &m * &sym(&[((1, 0), 1), ((0, 1), 1), ((0, 0), 10)]);
        let r = solve_closing(&ClosingSystem::from_polynomials(p, m)).unwrap();
        assert_eq!(r.bound.strategy, Strategy::Resultant);
        let got: Vec<(f64, f64)> = r.pairs.iter().map(|p| (p.y1, p.y2)).collect();
        assert_eq!(got.len(), 2, "{got:?}");
        assert!((got[0].0 + 2.0).abs() < 1e-10 && (got[0].1 + 1.0).abs() < 1e-10);
        assert!((got[1].0 - 1.0).abs() < 1e-10 && (got[1].1 - 2.0).abs() < 1e-10);
    }
}
