//! Commands behind the `iso-cycles` binary. Each returns a report that
//! prints as text and serializes to JSON.

pub mod config;
pub mod plot;

use std::fmt;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::centers::{restrict_to_sigma, CenterError, CenterSpec};
use crate::closing::{build_closing_system, eliminate, BoundReport, ClosingError, ClosingSystem};
use crate::solver::{solve_closing_with, CrossingPair, SolveOptions, SolveReport, SolverError};
use crate::verifier::{verify_all, CycleReport};

pub use config::{ConfigError, SystemConfig};

pub const DEFAULT_BOX: [f64; 4] = [-50.0, 50.0, -50.0, 50.0];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error(transparent)]
    Closing(#[from] ClosingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Overrides from the command line; unset fields fall back to the config.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub window: Option<[f64; 4]>,
    pub tol: Option<f64>,
}

impl RunOptions {
    fn window(&self, cfg: &SystemConfig) -> Result<Option<[f64; 4]>, ConfigError> {
        match self.window {
            Some(w) => check_box(w).map(Some),
            None => cfg.window(),
        }
    }

    fn solve_options(&self, cfg: &SystemConfig) -> SolveOptions {
        let mut opts = SolveOptions::default();
        if let Some(t) = self.tol.or(cfg.tol) {
            opts.residual_tol = t;
        }
        opts
    }
}

fn check_box(b: [f64; 4]) -> Result<[f64; 4], ConfigError> {
    if b.iter().all(|v| v.is_finite()) && b[0] < b[1] && b[2] < b[3] {
        Ok(b)
    } else {
        Err(ConfigError::InvalidBox)
    }
}

/// Parses `x0,x1,y0,y1`.
pub fn parse_box(text: &str) -> Result<[f64; 4], ConfigError> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError::InvalidBox)?;
    let b: [f64; 4] = vals.try_into().map_err(|_| ConfigError::InvalidBox)?;
    check_box(b)
}

#[derive(Clone, Debug, Serialize)]
pub struct SideDerivation {
    pub family: String,
    pub x_dot: String,
    pub y_dot: String,
    pub first_integral: String,
    /// `H(0, y)`.
    pub on_sigma: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeriveReport {
    pub name: String,
    pub plus: SideDerivation,
    pub minus: SideDerivation,
}

fn derive_side(spec: &CenterSpec) -> Result<SideDerivation, CliError> {
    let f = spec.field();
    let h = spec.first_integral();
    let names = ["x", "y"];
    let integral = if h.den.total_degree() == Some(0) {
        h.num.display_with(names)
    } else {
        format!("({}) / ({})", h.num.display_with(names), h.den.display_with(names))
    };
    Ok(SideDerivation {
        family: spec.family().to_string(),
        x_dot: f.p.display_with(names),
        y_dot: f.q.display_with(names),
        first_integral: integral,
        on_sigma: restrict_to_sigma(&h)?.display_with("y"),
    })
}

pub fn cmd_derive(cfg: &SystemConfig) -> Result<DeriveReport, CliError> {
    let pw = cfg.system()?;
    Ok(DeriveReport { name: cfg.name.clone(), plus: derive_side(&pw.plus)?, minus: derive_side(&pw.minus)? })
}

impl fmt::Display for DeriveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for (label, side) in [("x > 0", &self.plus), ("x < 0", &self.minus)] {
            writeln!(f, "{label}: {}", side.family)?;
            writeln!(f, "  x' = {}", side.x_dot)?;
            writeln!(f, "  y' = {}", side.y_dot)?;
            writeln!(f, "  H = {}", side.first_integral)?;
            writeln!(f, "  H(0, y) = {}", side.on_sigma)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSummary {
    pub pairing: String,
    pub strategy: String,
    pub degree: Option<usize>,
    pub pair_bound: Option<usize>,
    pub generic_degree: Option<usize>,
    pub table_bound: Option<u32>,
    pub consistent: bool,
}

impl From<&BoundReport> for BoundSummary {
    fn from(b: &BoundReport) -> Self {
        Self {
            pairing: b.pairing.to_string(),
            strategy: b.strategy.to_string(),
            degree: b.degree,
            pair_bound: b.pair_bound,
            generic_degree: b.generic_degree,
            table_bound: b.table_bound,
            consistent: b.consistent(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CloseReport {
    pub name: String,
    pub closing_plus: String,
    pub closing_minus: String,
    pub excluded: Vec<String>,
    pub eliminated: String,
    pub bound: BoundSummary,
}

pub fn cmd_close(cfg: &SystemConfig) -> Result<CloseReport, CliError> {
    let cs = closing_system(cfg)?;
    let elim = eliminate(&cs)?;
    let names = ["y1", "y2"];
    Ok(CloseReport {
        name: cfg.name.clone(),
        closing_plus: cs.plus.closing.display_with(names),
        closing_minus: cs.minus.closing.display_with(names),
        excluded: cs.excluded.iter().map(|p| p.display_with("y")).collect(),
        eliminated: elim.poly.display_with("y2"),
        bound: BoundSummary::from(&BoundReport::new(&cs, &elim)),
    })
}

fn closing_system(cfg: &SystemConfig) -> Result<ClosingSystem, CliError> {
    Ok(build_closing_system(&cfg.system()?)?)
}

fn fmt_bound(f: &mut fmt::Formatter<'_>, b: &BoundSummary) -> fmt::Result {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    writeln!(
        f,
        "{}: strategy {}, degree {}, pair bound {}, generic degree {}, table bound {}",
        b.pairing,
        b.strategy,
        opt(b.degree.map(|d| d.to_string())),
        opt(b.pair_bound.map(|d| d.to_string())),
        opt(b.generic_degree.map(|d| d.to_string())),
        opt(b.table_bound.map(|d| d.to_string())),
    )
}

impl fmt::Display for CloseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(f, "P+(y1, y2) = {}", self.closing_plus)?;
        writeln!(f, "P-(y1, y2) = {}", self.closing_minus)?;
        for e in &self.excluded {
            writeln!(f, "excluded: {e} = 0")?;
        }
        writeln!(f, "eliminated: {}", self.eliminated)?;
        fmt_bound(f, &self.bound)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSummary {
    pub y1: f64,
    pub y2: f64,
    pub residual_plus: f64,
    pub residual_minus: f64,
    pub jacobian_det: f64,
    pub strategy: String,
}

impl From<&CrossingPair> for PairSummary {
    fn from(p: &CrossingPair) -> Self {
        Self {
            y1: p.y1,
            y2: p.y2,
            residual_plus: p.residual_plus,
            residual_minus: p.residual_minus,
            jacobian_det: p.jacobian_det,
            strategy: p.strategy.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscardSummary {
    pub y1: f64,
    pub y2: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutput {
    pub name: String,
    pub continuum: bool,
    pub real_roots: usize,
    pub pairs: Vec<PairSummary>,
    pub discarded: Vec<DiscardSummary>,
    pub diagonal: Vec<f64>,
    pub bound: BoundSummary,
}

impl SolveOutput {
    fn new(name: &str, r: &SolveReport) -> Self {
        Self {
            name: name.to_string(),
            continuum: r.continuum,
            real_roots: r.real_roots,
            pairs: r.pairs.iter().map(PairSummary::from).collect(),
            discarded: r
                .discarded
                .iter()
                .map(|d| DiscardSummary { y1: d.pair.y1, y2: d.pair.y2, reason: d.reason.to_string() })
                .collect(),
            diagonal: r.diagonal.clone(),
            bound: BoundSummary::from(&r.bound),
        }
    }

    /// 3 for a continuum, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.continuum {
            3
        } else {
            0
        }
    }
}

impl fmt::Display for SolveOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        fmt_bound(f, &self.bound)?;
        if self.continuum {
            return writeln!(f, "continuum of solutions");
        }
        writeln!(f, "{} pairs ({} real roots eliminated)", self.pairs.len(), self.real_roots)?;
        for p in &self.pairs {
            writeln!(
                f,
                "  y1 = {:.9}  y2 = {:.9}  residuals {:.1e} {:.1e}  det {:.3e}",
                p.y1, p.y2, p.residual_plus, p.residual_minus, p.jacobian_det
            )?;
        }
        for d in &self.discarded {
            writeln!(f, "  discarded ({:.6}, {:.6}): {}", d.y1, d.y2, d.reason)?;
        }
        for y in &self.diagonal {
            writeln!(f, "  diagonal y1 = y2 = {y:.6}")?;
        }
        Ok(())
    }
}

pub fn cmd_solve(cfg: &SystemConfig, opts: &RunOptions) -> Result<SolveOutput, CliError> {
    let report = solve(cfg, opts)?;
    Ok(SolveOutput::new(&cfg.name, &report))
}

fn solve(cfg: &SystemConfig, opts: &RunOptions) -> Result<SolveReport, CliError> {
    let cs = closing_system(cfg)?;
    Ok(solve_closing_with(&cs, &opts.solve_options(cfg))?)
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleSummary {
    pub y1: f64,
    pub y2: f64,
    pub crossing_ok: [bool; 2],
    pub integral_gap: [f64; 2],
    pub closure_error: f64,
    pub drift_plus: f64,
    pub drift_minus: f64,
    pub isolated: bool,
    pub period: Option<f64>,
    pub verdict: String,
}

impl From<&CycleReport> for CycleSummary {
    fn from(r: &CycleReport) -> Self {
        let finite = |v: f64| if v.is_finite() { v } else { f64::NAN };
        let period = match (&r.plus, &r.minus) {
            (Some(p), Some(m)) => Some(p.period() + m.period()),
            _ => None,
        };
        Self {
            y1: r.pair.y1,
            y2: r.pair.y2,
            crossing_ok: r.crossing_ok,
            integral_gap: r.integral_gap,
            closure_error: finite(r.closure_error),
            drift_plus: finite(r.drift_plus),
            drift_minus: finite(r.drift_minus),
            isolated: r.isolated,
            period,
            verdict: r.verdict.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutput {
    pub name: String,
    pub continuum: bool,
    pub verified: usize,
    pub cycles: Vec<CycleSummary>,
    /// Pairs outside the box, not integrated.
    pub skipped: Vec<PairSummary>,
}

impl VerifyOutput {
    /// 3 for a continuum, 4 when a pair fails verification, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.continuum {
            3
        } else if self.verified < self.cycles.len() {
            4
        } else {
            0
        }
    }
}

impl fmt::Display for VerifyOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        if self.continuum {
            return writeln!(f, "continuum of solutions");
        }
        writeln!(f, "{} of {} cycles verified", self.verified, self.cycles.len())?;
        for c in &self.cycles {
            writeln!(
                f,
                "  ({:.6}, {:.6}) {}  closure {:.1e}  drift {:.1e} {:.1e}",
                c.y1, c.y2, c.verdict, c.closure_error, c.drift_plus, c.drift_minus
            )?;
        }
        for p in &self.skipped {
            writeln!(f, "  ({:.6}, {:.6}) outside the box, skipped", p.y1, p.y2)?;
        }
        Ok(())
    }
}

/// Solves and verifies; pairs with an endpoint outside the box's `y` range
/// are skipped.
pub fn verify_reports(
    cfg: &SystemConfig,
    opts: &RunOptions,
) -> Result<(SolveReport, Vec<CycleReport>, Vec<CrossingPair>), CliError> {
    let report = solve(cfg, opts)?;
    let w = opts.window(cfg)?.unwrap_or(DEFAULT_BOX);
    let inside = |y: f64| y >= w[2] && y <= w[3];
    let (kept, skipped): (Vec<CrossingPair>, Vec<CrossingPair>) =
        report.pairs.iter().cloned().partition(|p| inside(p.y1) && inside(p.y2));
    let cycles = verify_all(&cfg.system()?, &kept);
    Ok((report, cycles, skipped))
}

pub fn cmd_verify(cfg: &SystemConfig, opts: &RunOptions) -> Result<VerifyOutput, CliError> {
    let (report, cycles, skipped) = verify_reports(cfg, opts)?;
    Ok(VerifyOutput {
        name: cfg.name.clone(),
        continuum: report.continuum,
        verified: cycles.iter().filter(|c| c.verdict.is_verified()).count(),
        cycles: cycles.iter().map(CycleSummary::from).collect(),
        skipped: skipped.iter().map(PairSummary::from).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlotOutput {
    pub svg: String,
    pub csv: String,
    pub cycles: usize,
    pub window: [f64; 4],
}

impl fmt::Display for PlotOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} cycles", self.cycles)?;
        writeln!(f, "wrote {}", self.svg)?;
        writeln!(f, "wrote {}", self.csv)
    }
}

/// Writes `<name>.svg` and `<name>.csv` under `out`.
pub fn cmd_plot(cfg: &SystemConfig, opts: &RunOptions, out: &Path) -> Result<PlotOutput, CliError> {
    let pw = cfg.system()?;
    let explicit = opts.window(cfg)?;
    // Verification runs over the default box; the plot window is separate.
    let (_, cycles, _) = verify_reports(cfg, &RunOptions { window: None, ..*opts })?;
    let verified: Vec<&CycleReport> = cycles.iter().filter(|c| c.verdict.is_verified()).collect();
    let window = explicit.unwrap_or_else(|| plot::auto_window(&verified));
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    let svg_path = out.join(format!("{}.svg", cfg.name));
    let csv_path = out.join(format!("{}.csv", cfg.name));
    std::fs::write(&svg_path, plot::svg(&pw, &verified, window)).map_err(io(&svg_path))?;
    std::fs::write(&csv_path, plot::csv(&verified)).map_err(io(&csv_path))?;
    Ok(PlotOutput {
        svg: svg_path.display().to_string(),
        csv: csv_path.display().to_string(),
        cycles: verified.len(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_parsing() {
        assert_eq!(parse_box("-2, 1,-3,4").unwrap(), [-2.0, 1.0, -3.0, 4.0]);
        assert!(parse_box("1,0,0,1").is_err());
        assert!(parse_box("1,2,3").is_err());
        assert!(parse_box("a,b,c,d").is_err());
    }
}
