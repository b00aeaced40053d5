//! Numerical certification of crossing limit cycles: crossing conditions,
//! first-integral consistency, orbit closure and isolation.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{scalar_to_f64, Poly2F64, RationalFn};
use crate::centers::{canonical_integral, CenterSpec, PiecewiseSystem, VectorField};
use crate::solver::CrossingPair;

pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;
pub const EVENT_TOL: f64 = 1e-12;
pub const MAX_STEPS: usize = 1_000_000;
pub const MAX_TIME: f64 = 1e3;
pub const CLOSURE_TOL: f64 = 1e-6;
pub const DRIFT_TOL: f64 = 1e-8;
pub const INTEGRAL_TOL: f64 = 1e-9;
pub const ISOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("the field at (0, {y}) does not point into the {half} half-plane")]
    WrongHalf { y: f64, half: Half },
    #[error("orbit from (0, {y}) did not return to x = 0 ({steps} steps, t = {t})")]
    NoReturn { y: f64, steps: usize, t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Half {
    Plus,
    Minus,
}

impl Half {
    pub fn sign(self) -> f64 {
        match self {
            Half::Plus => 1.0,
            Half::Minus => -1.0,
        }
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Half::Plus => "plus",
            Half::Minus => "minus",
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct FastField {
    p: Poly2F64,
    q: Poly2F64,
}

impl FastField {
    pub(crate) fn new(f: &VectorField) -> Self {
        Self { p: Poly2F64::new(&f.p), q: Poly2F64::new(&f.q) }
    }

    pub(crate) fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        [self.p.eval(z[0], z[1]), self.q.eval(z[0], z[1])]
    }
}

/// A first integral in floating point. Cubic integrals are evaluated in the
/// canonical coordinates `(u, v)`: the expanded form loses most of its digits
/// to cancellation far from the center.
#[derive(Clone, Debug)]
struct FastIntegral {
    num: Poly2F64,
    den: Poly2F64,
    map: Option<[f64; 6]>,
}

impl FastIntegral {
    fn new(spec: &CenterSpec) -> Self {
        match spec {
            CenterSpec::Linear(p) => {
                let h = RationalFn::polynomial(p.first_integral());
                Self { num: Poly2F64::new(&h.num), den: Poly2F64::new(&h.den), map: None }
            }
            CenterSpec::Cubic { family, map } => {
                let h = canonical_integral(*family).expect("cubic family");
                let m = [&map.a, &map.b, &map.c, &map.alpha, &map.beta, &map.gamma].map(scalar_to_f64);
                Self { num: Poly2F64::new(&h.num), den: Poly2F64::new(&h.den), map: Some(m) }
            }
        }
    }

    fn coords(&self, x: f64, y: f64) -> (f64, f64) {
        match self.map {
            None => (x, y),
            Some([a, b, c, al, be, ga]) => (a * x + b * y + c, al * x + be * y + ga),
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.coords(x, y);
        self.num.eval(u, v) / self.den.eval(u, v)
    }

    /// True when the denominator is zero to rounding at `(x, y)`.
    fn singular(&self, x: f64, y: f64) -> bool {
        let (u, v) = self.coords(x, y);
        self.den.eval(u, v).abs() <= 1e-12 * self.den.abs_scale(u, v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTrace {
    pub half: Half,
    /// Accepted states `(t, x, y)`, from the start point to the return point.
    pub samples: Vec<(f64, f64, f64)>,
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub steps: usize,
}

impl OrbitTrace {
    pub fn period(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    /// `max |H(state) - H(start)|` over the samples for the first integral
    /// of `spec`, relative to `max(1, |H(start)|)`.
    pub fn drift(&self, spec: &CenterSpec) -> f64 {
        drift(&FastIntegral::new(spec), self)
    }
}

fn drift(h: &FastIntegral, trace: &OrbitTrace) -> f64 {
    let h0 = h.eval(trace.start.0, trace.start.1);
    let scale = h0.abs().max(1.0);
    trace
        .samples
        .iter()
        .map(|&(_, x, y)| (h.eval(x, y) - h0).abs() / scale)
        .fold(0.0, f64::max)
}

// Dormand-Prince 5(4) tableau (autonomous fields only).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step: the fifth-order state and the scaled error norm.
fn dopri_step(f: &FastField, z: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut k = [[0.0; 2]; 7];
    k[0] = f.eval(z);
    for s in 1..7 {
        let mut zs = z;
        for (j, kj) in k.iter().enumerate().take(s) {
            zs[0] += h * A[s][j] * kj[0];
            zs[1] += h * A[s][j] * kj[1];
        }
        k[s] = f.eval(zs);
    }
    let mut hi = z;
    let mut err = 0.0f64;
    for d in 0..2 {
        let (mut s5, mut s4) = (0.0, 0.0);
        for s in 0..7 {
            s5 += B5[s] * k[s][d];
            s4 += B4[s] * k[s][d];
        }
        hi[d] = z[d] + h * s5;
        let e = h * (s5 - s4);
        let tol = ATOL + RTOL * z[d].abs().max(hi[d].abs());
        err = err.max((e / tol).abs());
    }
    (hi, err)
}

/// Follows `field` from `(0, y)` into `half` until it returns to `x = 0`.
pub fn integrate_half_orbit(field: &VectorField, y: f64, half: Half) -> Result<OrbitTrace, VerifyError> {
    integrate(&FastField::new(field), y, half)
}

fn integrate(f: &FastField, y: f64, half: Half) -> Result<OrbitTrace, VerifyError> {
    let s = half.sign();
    let [px, py] = f.eval([0.0, y]);
    if !(s * px > 0.0) {
        return Err(VerifyError::WrongHalf { y, half });
    }
    let speed = px.hypot(py);
    let mut h = (1e-3 * (1.0 + y.abs()) / speed).min(1e-2);
    let mut t = 0.0;
    let mut z = [0.0, y];
    let mut samples = vec![(t, z[0], z[1])];
    let mut steps = 0;
    let no_return = |steps, t| VerifyError::NoReturn { y, steps, t };
    loop {
        if steps >= MAX_STEPS || t > MAX_TIME {
            return Err(no_return(steps, t));
        }
        let (next, err) = dopri_step(f, z, h);
        steps += 1;
        if !next[0].is_finite() || !next[1].is_finite() || !err.is_finite() {
            h *= 0.1;
            if h < 1e-300 {
                return Err(no_return(steps, t));
            }
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }
        if s * next[0] <= 0.0 {
            let (hit, dt) = locate_return(f, z, h, s);
            t += dt;
            samples.push((t, 0.0, hit[1]));
            return Ok(OrbitTrace { half, samples, start: (0.0, y), end: (hit[0], hit[1]), steps });
        }
        t += h;
        z = next;
        samples.push((t, z[0], z[1]));
        let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= grow;
    }
}

/// Bisection on the step length for the first zero of `x` inside a step
/// of length `h` from `z`, where `s * x` is positive at the start.
fn locate_return(f: &FastField, z: [f64; 2], h: f64, s: f64) -> ([f64; 2], f64) {
    let (mut lo, mut hi) = (0.0, h);
    let mut best = (dopri_step(f, z, h).0, h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (zm, _) = dopri_step(f, z, mid);
        if zm[0].abs() <= EVENT_TOL {
            return (zm, mid);
        }
        if s * zm[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            best = (zm, mid);
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    best
}

/// `(0, y)` is a crossing point: `X+(0, y) X-(0, y) > 0`.
pub fn is_crossing_point(pw: &PiecewiseSystem, y: f64) -> bool {
    let xp = pw.plus.field().p.eval_f64(0.0, y);
    let xm = pw.minus.field().p.eval_f64(0.0, y);
    xp * xm > 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    NotCrossing,
    /// The orbit from the chosen start point leaves into the minus half-plane.
    Orientation,
    /// An endpoint lies on a zero of a first-integral denominator.
    Singular,
    IntegralMismatch,
    NoReturn,
    NotClosed,
    Drift,
    NotIsolated,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::NotCrossing => "crossing",
            RejectReason::Orientation => "orientation",
            RejectReason::Singular => "singular",
            RejectReason::IntegralMismatch => "first integral",
            RejectReason::NoReturn => "no return",
            RejectReason::NotClosed => "closure",
            RejectReason::Drift => "drift",
            RejectReason::NotIsolated => "isolation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_verified(self) -> bool {
        self == Verdict::Verified
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("verified"),
            Verdict::Rejected(r) => write!(f, "rejected ({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    pub pair: CrossingPair,
    /// Crossing condition at `y1` and at `y2`.
    pub crossing_ok: [bool; 2],
    /// Relative mismatch of `H+` and `H-` between the two endpoints.
    pub integral_gap: [f64; 2],
    pub closure_error: f64,
    pub drift_plus: f64,
    pub drift_minus: f64,
    pub isolated: bool,
    pub plus: Option<OrbitTrace>,
    pub minus: Option<OrbitTrace>,
    pub verdict: Verdict,
}

/// Fields and integrals of both halves, prepared once per system.
#[derive(Clone, Debug)]
pub struct Certifier {
    plus: FastField,
    minus: FastField,
    h_plus: FastIntegral,
    h_minus: FastIntegral,
}

impl Certifier {
    pub fn new(pw: &PiecewiseSystem) -> Self {
        Self {
            plus: FastField::new(&pw.plus.field()),
            minus: FastField::new(&pw.minus.field()),
            h_plus: FastIntegral::new(&pw.plus),
            h_minus: FastIntegral::new(&pw.minus),
        }
    }

    fn crossing(&self, y: f64) -> bool {
        self.plus.p.eval(0.0, y) * self.minus.p.eval(0.0, y) > 0.0
    }

    /// Checks the pair, starting the plus half-orbit at whichever endpoint
    /// the plus field leaves into `x > 0`.
    pub fn verify(&self, pair: &CrossingPair) -> CycleReport {
        let (a, b) = (pair.y1, pair.y2);
        let start = if self.plus.p.eval(0.0, a) > 0.0 { a } else { b };
        self.check(pair, start)
    }

    /// Like [`Certifier::verify`] but with a fixed start point.
    pub fn verify_from(&self, pair: &CrossingPair, start: f64) -> CycleReport {
        self.check(pair, start)
    }

    fn check(&self, pair: &CrossingPair, start: f64) -> CycleReport {
        let (a, b) = (pair.y1, pair.y2);
        let target = if start == a { b } else { a };
        let gap = |h: &FastIntegral| {
            let (ha, hb) = (h.eval(0.0, a), h.eval(0.0, b));
            (ha - hb).abs() / ha.abs().max(hb.abs()).max(f64::MIN_POSITIVE)
        };
        let mut report = CycleReport {
            pair: pair.clone(),
            crossing_ok: [self.crossing(a), self.crossing(b)],
            integral_gap: [gap(&self.h_plus), gap(&self.h_minus)],
            closure_error: f64::INFINITY,
            drift_plus: f64::INFINITY,
            drift_minus: f64::INFINITY,
            isolated: pair.is_isolated(ISOLATION_TOL),
            plus: None,
            minus: None,
            verdict: Verdict::Verified,
        };
        let singular = [a, b].iter().any(|&y| self.h_plus.singular(0.0, y) || self.h_minus.singular(0.0, y));
        let reject = |r: &mut CycleReport, reason| {
            r.verdict = Verdict::Rejected(reason);
        };
        if singular {
            reject(&mut report, RejectReason::Singular);
            return report;
        }
        if !report.crossing_ok.iter().all(|&ok| ok) {
            reject(&mut report, RejectReason::NotCrossing);
            return report;
        }
        let plus = match integrate(&self.plus, start, Half::Plus) {
            Ok(t) => t,
            Err(VerifyError::WrongHalf { .. }) => {
                reject(&mut report, RejectReason::Orientation);
                return report;
            }
            Err(VerifyError::NoReturn { .. }) => {
                reject(&mut report, RejectReason::NoReturn);
                return report;
            }
        };
        report.drift_plus = drift(&self.h_plus, &plus);
        let minus = match integrate(&self.minus, plus.end.1, Half::Minus) {
            Ok(t) => t,
            Err(_) => {
                report.plus = Some(plus);
                reject(&mut report, RejectReason::NoReturn);
                return report;
            }
        };
        report.drift_minus = drift(&self.h_minus, &minus);
        report.closure_error = (minus.end.1 - start).abs().max((plus.end.1 - target).abs());
        report.plus = Some(plus);
        report.minus = Some(minus);
        let failed = if report.integral_gap.iter().any(|&g| g > INTEGRAL_TOL) {
            Some(RejectReason::IntegralMismatch)
        } else if report.closure_error > CLOSURE_TOL {
            Some(RejectReason::NotClosed)
        } else if report.drift_plus.max(report.drift_minus) > DRIFT_TOL {
            Some(RejectReason::Drift)
        } else if !report.isolated {
            Some(RejectReason::NotIsolated)
        } else {
            None
        };
        if let Some(reason) = failed {
            reject(&mut report, reason);
        }
        report
    }
}

pub fn verify_cycle(pw: &PiecewiseSystem, pair: &CrossingPair) -> CycleReport {
    Certifier::new(pw).verify(pair)
}

/// Verifies starting the plus half-orbit at `(0, start)`; a start point
/// whose plus field points into `x < 0` is rejected for orientation.
pub fn trace_cycle_from(pw: &PiecewiseSystem, pair: &CrossingPair, start: f64) -> CycleReport {
    Certifier::new(pw).verify_from(pair, start)
}

/// Verifies every pair concurrently; the output keeps the input order.
pub fn verify_all(pw: &PiecewiseSystem, pairs: &[CrossingPair]) -> Vec<CycleReport> {
    let cert = Certifier::new(pw);
    pairs.par_iter().map(|p| cert.verify(p)).collect()
}
