//! Convergence sweeps, the `c -> infinity` study, slope fits and CSV output.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KgzError, Result};
use crate::integrator_uaosc1::propagate1;
use crate::integrator_uaosc2::{propagate2_with, Uaosc2Options};
use crate::kgz_model::{
    benchmark_initial_data, initial_state, to_physical_z, KgzState, ModelParams, PhysicalState,
    SchemeOrder,
};
use crate::spectral_core::{sobolev_norm, TorusGrid};
use crate::zakharov_limit::{limit_initial, propagate_zakharov, twisted_compare};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Uaosc1,
    Uaosc2,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Uaosc1 => "uaosc1",
            Self::Uaosc2 => "uaosc2",
        }
    }

    pub fn order(&self) -> SchemeOrder {
        match self {
            Self::Uaosc1 => SchemeOrder::First,
            Self::Uaosc2 => SchemeOrder::Second,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = KgzError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uaosc1" => Ok(Self::Uaosc1),
            "uaosc2" => Ok(Self::Uaosc2),
            other => Err(KgzError::Config(format!(
                "unknown scheme '{other}' (expected uaosc1 or uaosc2)"
            ))),
        }
    }
}

/// Number of steps of size `tau` that make up `t_end`, or an error if `tau`
/// does not divide `t_end`.
pub fn steps_for(tau: f64, t_end: f64) -> Result<usize> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(KgzError::Config(format!("step size must be positive, got {tau}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(KgzError::Config(format!("final time must be nonnegative, got {t_end}")));
    }
    let ratio = t_end / tau;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(KgzError::Config(format!(
            "step size {tau} does not divide the final time {t_end} ({ratio} steps)"
        )));
    }
    Ok(steps as usize)
}

/// Propagates `data` to `num_steps * tau` with the chosen scheme.
pub fn simulate(
    scheme: Scheme,
    params: &ModelParams,
    data: &PhysicalState,
    tau: f64,
    num_steps: usize,
    options: Uaosc2Options,
) -> Result<KgzState> {
    let s0 = initial_state(data, params, tau, scheme.order())?;
    let out = match scheme {
        Scheme::Uaosc1 => propagate1(&s0, params, tau, num_steps),
        Scheme::Uaosc2 => propagate2_with(&s0, &s0.u.clone(), params, tau, num_steps, options),
    };
    out.map_err(|e| match e {
        KgzError::Divergence { .. } => KgzError::Divergence { c: params.c, tau },
        e => e,
    })
}

/// Errors between two states: `(||z_a - z_b||_{H^1}, ||n_a - n_b||_{L^2}, ||ndot_a - ndot_b||_{H^{-1}})`.
pub fn state_errors(a: &KgzState, b: &KgzState) -> Result<(f64, f64, f64)> {
    let dz = to_physical_z(&a.u).sub(&to_physical_z(&b.u))?;
    Ok((
        sobolev_norm(&dz, 1.0),
        sobolev_norm(&a.n.sub(&b.n)?, 0.0),
        sobolev_norm(&a.ndot.sub(&b.ndot)?, -1.0),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub c_list: Vec<f64>,
    pub tau_list: Vec<f64>,
    pub t_end: f64,
    pub ref_tau: f64,
    pub scheme: Scheme,
    pub grid: TorusGrid,
    pub uaosc2: Uaosc2Options,
}

impl SweepConfig {
    /// Benchmark sweep: `tau_j = T / 2^{j+2}` for `j = 0..6`, reference `T / 2^12`, `N = 128`.
    pub fn standard(scheme: Scheme, c_list: Vec<f64>) -> Self {
        let t_end = 1.0;
        Self {
            c_list,
            tau_list: default_tau_list(t_end),
            t_end,
            ref_tau: t_end / 4096.0,
            scheme,
            grid: TorusGrid::default(),
            uaosc2: Uaosc2Options::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_list.is_empty() || self.tau_list.is_empty() {
            return Err(KgzError::Config("c-list and tau-list must be nonempty".into()));
        }
        for &c in &self.c_list {
            if !(c.is_finite() && c >= 1.0) {
                return Err(KgzError::Config(format!("plasma frequency must be >= 1, got {c}")));
            }
        }
        for &tau in &self.tau_list {
            steps_for(tau, self.t_end)?;
        }
        steps_for(self.ref_tau, self.t_end)?;
        let min_tau = self.tau_list.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.ref_tau.partial_cmp(&(min_tau / 4.0)) != Some(std::cmp::Ordering::Less) {
            return Err(KgzError::Config(format!(
                "reference step {} must be below a quarter of the smallest step {min_tau}",
                self.ref_tau
            )));
        }
        Ok(())
    }
}

pub fn default_tau_list(t_end: f64) -> Vec<f64> {
    (0..7).map(|j| t_end / f64::powi(2.0, j + 2)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub scheme: Scheme,
    pub c: f64,
    pub tau: f64,
    pub err_z_h1: f64,
    pub err_n_l2: f64,
}

impl ConvergenceRow {
    pub fn combined(&self) -> f64 {
        self.err_z_h1 + self.err_n_l2
    }
}

/// Rows sorted by scheme, then `c`, then decreasing `tau`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub scheme: Scheme,
    pub c: f64,
    pub slope: f64,
}

impl ConvergenceReport {
    fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.scheme
                .cmp(&b.scheme)
                .then(a.c.total_cmp(&b.c))
                .then(b.tau.total_cmp(&a.tau))
        });
    }

    /// Least-squares slope of `log(err_z + err_n)` against `log tau` for each `(scheme, c)`.
    pub fn slopes(&self) -> Result<Vec<SlopeFit>> {
        let mut out: Vec<SlopeFit> = Vec::new();
        let mut i = 0;
        while i < self.rows.len() {
            let (scheme, c) = (self.rows[i].scheme, self.rows[i].c);
            let group: Vec<(f64, f64)> = self.rows[i..]
                .iter()
                .take_while(|r| r.scheme == scheme && r.c == c)
                .map(|r| (r.tau, r.combined()))
                .collect();
            i += group.len();
            out.push(SlopeFit {
                scheme,
                c,
                slope: fit_slope(&group)?,
            });
        }
        Ok(out)
    }

    /// Largest over smallest combined error among the rows with step `tau`.
    pub fn uniformity_ratio(&self, scheme: Scheme, tau: f64) -> Option<f64> {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.scheme == scheme && (r.tau - tau).abs() <= 1e-12 * tau)
            .map(|r| r.combined())
            .collect();
        if errs.is_empty() {
            return None;
        }
        let max = errs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = errs.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(max / min)
    }

    /// Log-log slope of `err_z_h1` against `c` over the rows of `scheme`.
    pub fn c_slope(&self, scheme: Scheme, c_min: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.scheme == scheme && r.c >= c_min)
            .map(|r| (r.c, r.err_z_h1))
            .collect();
        fit_slope(&pts)
    }
}

/// Runs every `(c, tau)` cell and compares against the same scheme at `ref_tau`.
pub fn run_convergence(cfg: &SweepConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let run = |c: f64, tau: f64| -> Result<KgzState> {
        let params = ModelParams {
            c,
            grid: cfg.grid,
            dealias: false,
        };
        let data = benchmark_initial_data(cfg.grid, c);
        simulate(cfg.scheme, &params, &data, tau, steps_for(tau, cfg.t_end)?, cfg.uaosc2)
    };
    let refs: Vec<KgzState> = cfg
        .c_list
        .par_iter()
        .map(|&c| run(c, cfg.ref_tau))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, f64)> = (0..cfg.c_list.len())
        .flat_map(|i| cfg.tau_list.iter().map(move |&t| (i, t)))
        .collect();
    let rows: Vec<ConvergenceRow> = cells
        .par_iter()
        .map(|&(i, tau)| {
            let c = cfg.c_list[i];
            let s = run(c, tau)?;
            let (ez, en, _) = state_errors(&s, &refs[i])?;
            Ok(ConvergenceRow {
                scheme: cfg.scheme,
                c,
                tau,
                err_z_h1: ez,
                err_n_l2: en,
            })
        })
        .collect::<Result<_>>()?;
    let mut report = ConvergenceReport { rows };
    report.sort();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitConfig {
    pub c_list: Vec<f64>,
    /// Step of the first-order scheme.
    pub tau: f64,
    /// Step of the limit-system reference.
    pub zref_tau: f64,
    pub t_end: f64,
    pub grid: TorusGrid,
}

impl LimitConfig {
    pub fn standard() -> Self {
        Self {
            c_list: vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            tau: 2e-5,
            zref_tau: 1e-5,
            t_end: 1.0,
            grid: TorusGrid::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_list.is_empty() {
            return Err(KgzError::Config("c-list must be nonempty".into()));
        }
        for &c in &self.c_list {
            if !(c.is_finite() && c >= 1.0) {
                return Err(KgzError::Config(format!("plasma frequency must be >= 1, got {c}")));
            }
        }
        steps_for(self.tau, self.t_end)?;
        steps_for(self.zref_tau, self.t_end)?;
        Ok(())
    }
}

/// Compares the first-order scheme at each `c` with the limit system.
///
/// Rows carry `tau = cfg.tau`; [`ConvergenceReport::c_slope`] gives the rate in `c`.
pub fn run_limit_study(cfg: &LimitConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let rows: Vec<ConvergenceRow> = cfg
        .c_list
        .par_iter()
        .map(|&c| {
            let params = ModelParams {
                c,
                grid: cfg.grid,
                dealias: false,
            };
            let data = benchmark_initial_data(cfg.grid, c);
            let steps = steps_for(cfg.tau, cfg.t_end)?;
            let ua = simulate(Scheme::Uaosc1, &params, &data, cfg.tau, steps, Uaosc2Options::default())?;
            let z0 = limit_initial(&data, &params)?;
            let zak = propagate_zakharov(&z0, cfg.zref_tau, steps_for(cfg.zref_tau, cfg.t_end)?)
                .map_err(|_| KgzError::Divergence { c, tau: cfg.zref_tau })?;
            let (ez, en) = twisted_compare(&ua, &zak, cfg.t_end, c)?;
            Ok(ConvergenceRow {
                scheme: Scheme::Uaosc1,
                c,
                tau: cfg.tau,
                err_z_h1: ez,
                err_n_l2: en,
            })
        })
        .collect::<Result<_>>()?;
    let mut report = ConvergenceReport { rows };
    report.sort();
    Ok(report)
}

/// Ordinary least-squares slope of `log y` against `log x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(KgzError::Input("a slope needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(KgzError::Input("slope fit needs positive finite values".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(KgzError::Input("slope fit needs at least two distinct x values".into()));
    }
    Ok(sxy / sxx)
}

pub const CSV_HEADER: [&str; 5] = ["scheme", "c", "tau", "err_z_h1", "err_n_l2"];

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(report: &ConvergenceReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.scheme.name().to_string(),
            fmt17(r.c),
            fmt17(r.tau),
            fmt17(r.err_z_h1),
            fmt17(r.err_n_l2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(report, std::io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(input: R) -> Result<ConvergenceReport> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(KgzError::Input("unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| KgzError::Input(format!("bad number '{}'", &rec[i])))
        };
        rows.push(ConvergenceRow {
            scheme: rec[0].parse()?,
            c: num(1)?,
            tau: num(2)?,
            err_z_h1: num(3)?,
            err_n_l2: num(4)?,
        });
    }
    Ok(ConvergenceReport { rows })
}
