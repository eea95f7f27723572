//! Epsilon sweeps, log-log rate fits and the example4 alpha study.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble, peclet_guard, DiscreteField};
use crate::mesh::{classify_boundary, edge_quadrature, BoundaryTag, EdgeRule, Mesh, CLASSIFY_TOL};
use crate::norms::{compute_norms, ErrorNorms, ErrorRecord};
use crate::problem::{alpha_of_s, alpha_rate, Norm, Problem};
use crate::quadrature::QuadratureRule;
use crate::solver::{solve, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `n_cells = 256`, `k in [4, 11]`, fit on `[6, 11]`.
    Desk,
    /// `n_cells = 512`, `k in [0, 14]`, fit on `[8, 14]`.
    Paper,
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(format!("unknown preset '{other}' (expected desk or paper)")),
        }
    }
}

/// Sweep over `eps = base^-k` for `k = k_min..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub example: String,
    pub s: Option<f64>,
    pub n_cells: usize,
    pub base: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub fit_lo: i32,
    pub fit_hi: i32,
    pub solver: SolverOptions,
    /// Concurrent solves; 0 means one per available core.
    #[serde(default)]
    pub jobs: usize,
}

impl SweepConfig {
    pub fn preset(preset: Preset, example: &str, s: Option<f64>) -> Self {
        let (n_cells, k_min, k_max, fit_lo, fit_hi) = match preset {
            Preset::Desk => (256, 4, 11, 6, 11),
            Preset::Paper => (512, 0, 14, 8, 14),
        };
        Self {
            example: example.to_string(),
            s,
            n_cells,
            base: 1.6,
            k_min,
            k_max,
            fit_lo,
            fit_hi,
            solver: SolverOptions::default(),
            jobs: 0,
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::from_label(&self.example, self.s)
    }

    pub fn epsilon(&self, k: i32) -> f64 {
        self.base.powi(-k)
    }

    pub fn ks(&self) -> impl Iterator<Item = i32> {
        self.k_min..=self.k_max
    }

    /// Checks what `run_sweep` needs: a valid problem, mesh and epsilon grid.
    pub fn validate_grid(&self) -> Result<()> {
        self.problem()?;
        if self.n_cells == 0 {
            return Err(Error::EmptyMesh);
        }
        if !(self.base > 1.0 && self.base.is_finite()) {
            return Err(Error::InvalidConfig(format!("base must be > 1, got {}", self.base)));
        }
        if self.k_min > self.k_max {
            return Err(Error::InvalidConfig(format!(
                "k_min {} exceeds k_max {}",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }

    /// Full check, including a fit window of at least two points inside the grid.
    pub fn validate(&self) -> Result<()> {
        self.validate_grid()?;
        if !(self.k_min <= self.fit_lo && self.fit_lo <= self.fit_hi && self.fit_hi <= self.k_max) {
            return Err(Error::InvalidConfig(format!(
                "fit window [{}, {}] must lie inside [{}, {}]",
                self.fit_lo, self.fit_hi, self.k_min, self.k_max
            )));
        }
        if self.fit_hi - self.fit_lo < 1 {
            return Err(Error::InvalidConfig(format!(
                "fit window [{}, {}] is too small: at least 2 points are needed",
                self.fit_lo, self.fit_hi
            )));
        }
        Ok(())
    }
}

/// Mesh, boundary tags and quadrature for one problem; reused across epsilon.
#[derive(Debug, Clone)]
pub struct SolveContext {
    pub problem: Problem,
    pub mesh: Mesh,
    pub tags: Vec<BoundaryTag>,
    pub rule: QuadratureRule,
    pub edge_rules: Vec<EdgeRule>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub epsilon: f64,
    pub norms: ErrorNorms,
    pub residual: f64,
    pub iterations: usize,
    pub peclet: f64,
    /// Discrete solution at every mesh vertex.
    pub values: Vec<f64>,
}

impl SolveOutcome {
    pub fn peclet_warning(&self) -> bool {
        self.peclet > 1.0
    }
}

impl SolveContext {
    pub fn new(problem: Problem, n_cells: usize) -> Result<Self> {
        let mesh = Mesh::unit_square(n_cells)?;
        let tags = classify_boundary(&mesh, |x| problem.beta(x), CLASSIFY_TOL);
        let edge_rules = edge_quadrature(&mesh, 3)?;
        Ok(Self {
            problem,
            mesh,
            tags,
            rule: QuadratureRule::degree5(),
            edge_rules,
        })
    }

    pub fn solve(&self, epsilon: f64, solver: &SolverOptions) -> Result<SolveOutcome> {
        let peclet = peclet_guard(&self.mesh, &self.problem, epsilon).max;
        let system = assemble(&self.mesh, &self.problem, &self.tags, epsilon, &self.rule)?;
        let report = solve(&system.matrix, &system.rhs, solver)?;
        let field = DiscreteField::from_solution(&self.mesh, &system, &report.solution);
        let norms = compute_norms(&field, &self.problem, &self.tags, &self.rule, &self.edge_rules);
        Ok(SolveOutcome {
            epsilon,
            norms,
            residual: report.residual,
            iterations: report.iterations,
            peclet,
            values: field.values,
        })
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// One record per `k`, ordered by increasing `k` (decreasing epsilon). The
/// first failing `k` aborts the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ErrorRecord>> {
    config.validate_grid()?;
    let ctx = SolveContext::new(config.problem()?, config.n_cells)?;
    let ks: Vec<i32> = config.ks().collect();
    let outcomes: Vec<Result<SolveOutcome>> = with_pool(config.jobs, || {
        ks.par_iter()
            .map(|&k| ctx.solve(config.epsilon(k), &config.solver))
            .collect()
    });
    ks.iter()
        .zip(outcomes)
        .map(|(&k, outcome)| {
            let o = outcome.map_err(|e| Error::SweepSolve { k, source: Box::new(e) })?;
            Ok(ErrorRecord {
                k,
                epsilon: o.epsilon,
                l2_domain: o.norms.l2_domain,
                l2_gamma_plus: o.norms.l2_gamma_plus,
                h1_semi: o.norms.h1_semi,
                l2_gamma0: o.norms.l2_gamma0,
                residual: o.residual,
                peclet: o.peclet,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub norm: Norm,
    /// Fitted exponent `r` in `error ~ C eps^r`.
    pub rate: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln(value)` against `ln(eps)`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(e, v)| *e > 0.0 && *v > 0.0 && v.is_finite())
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, intercept, r_squared))
}

/// Fits the rate of `norm` over records with `lo <= k <= hi` and a positive error.
pub fn fit_rate(records: &[ErrorRecord], norm: Norm, lo: i32, hi: i32) -> Result<RateFit> {
    let in_window: Vec<&ErrorRecord> = records.iter().filter(|r| r.k >= lo && r.k <= hi).collect();
    let samples: Vec<(f64, f64)> = in_window
        .iter()
        .filter_map(|r| r.get(norm).map(|v| (r.epsilon, v)))
        .collect();
    let positive = samples.iter().filter(|(_, v)| *v > 0.0).count();
    if positive < 2 {
        return Err(if samples.len() >= 2 {
            Error::NonPositiveErrors
        } else {
            Error::TooFewPoints(positive)
        });
    }
    let (rate, intercept, r_squared) = fit_power_law(&samples)?;
    Ok(RateFit {
        norm,
        rate,
        intercept,
        r_squared,
        points: positive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub norm: String,
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub expected_rate: Option<f64>,
}

/// Fits every norm present in the records and pairs it with the theoretical rate.
pub fn fit_summary(records: &[ErrorRecord], config: &SweepConfig) -> Result<Vec<FitRow>> {
    let problem = config.problem()?;
    let mut rows = Vec::new();
    for norm in Norm::ALL {
        if records.iter().all(|r| r.get(norm).is_none()) {
            continue;
        }
        let fit = fit_rate(records, norm, config.fit_lo, config.fit_hi)?;
        rows.push(FitRow {
            norm: norm.to_string(),
            rate: fit.rate,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            expected_rate: problem.expected_rate(norm).ok(),
        });
    }
    Ok(rows)
}

pub fn write_records_csv<W: Write>(records: &[ErrorRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    if records.is_empty() {
        out.write_record([
            "k",
            "eps",
            "l2_domain",
            "l2_gamma_plus",
            "h1_semi",
            "l2_gamma0",
            "residual",
            "peclet",
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_fit_csv<W: Write>(rows: &[FitRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(["norm", "rate", "intercept", "r_squared", "expected_rate"])?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub s: f64,
    pub alpha: f64,
    /// Fitted L^2(Omega) rate; `None` when the sweep or fit failed.
    pub rate: Option<f64>,
    pub expected_rate: f64,
    pub status: String,
}

impl AlphaRow {
    pub fn succeeded(&self) -> bool {
        self.rate.is_some()
    }
}

/// Default `s` grid, giving `alpha = 1/s` in {0.25, 0.5, 0.75, 1, 1.25}.
pub const DEFAULT_S_LIST: [f64; 5] = [4.0, 2.0, 4.0 / 3.0, 1.0, 0.8];

/// Runs an example4 sweep per `s` using the grid and solver of `template`.
pub fn alpha_study(s_list: &[f64], template: &SweepConfig) -> Result<Vec<AlphaRow>> {
    for &s in s_list {
        Problem::from_label("example4", Some(s))?;
    }
    Ok(s_list
        .iter()
        .map(|&s| {
            let config = SweepConfig {
                example: "example4".to_string(),
                s: Some(s),
                ..template.clone()
            };
            let alpha = alpha_of_s(s);
            let fitted =
                run_sweep(&config).and_then(|records| fit_rate(&records, Norm::L2Domain, config.fit_lo, config.fit_hi));
            let (rate, status) = match fitted {
                Ok(fit) => (Some(fit.rate), "ok".to_string()),
                Err(e) => (None, format!("failed: {e}")),
            };
            AlphaRow {
                s,
                alpha,
                rate,
                expected_rate: alpha_rate(alpha),
                status,
            }
        })
        .collect())
}

pub fn write_alpha_csv<W: Write>(rows: &[AlphaRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
