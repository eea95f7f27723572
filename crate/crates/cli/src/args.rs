use std::path::PathBuf;

use advreg_core::{Preset, SolverKind, SolverOptions, SweepConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "advreg",
    version,
    about = "P1 finite elements for the elliptically regularized stationary advection equation"
)]
pub struct Cli {
    /// Suppress the summary on standard output; warnings and errors still go to standard error.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve once at a single epsilon and print the error norms.
    Solve(SolveArgs),
    /// Sweep eps = base^-k, write per-eps errors and fitted rates.
    Sweep(SweepArgs),
    /// Run example4 sweeps over several s and compare rates with min(1, (3 + alpha)/4).
    AlphaStudy(AlphaArgs),
    /// Repeat a sweep or alpha study from its manifest.json.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Linear solver: direct (sparse LU) or gmres (ILU(0)-preconditioned GMRES).
    #[arg(long, default_value = "direct")]
    pub solver: SolverKind,

    /// Relative residual tolerance for gmres.
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,

    /// Iteration cap for gmres.
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            kind: self.solver,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// example1, example2, example3 or example4.
    #[arg(long, default_value = "example2")]
    pub example: String,

    /// Shape parameter of example1 (default 0.51) and example4 (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,

    /// Regularization parameter.
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    pub eps: f64,

    /// Cells per side of the unit square.
    #[arg(long, default_value_t = 64)]
    pub n_cells: usize,

    #[command(flatten)]
    pub solver: SolverArgs,

    /// Write the mesh as `v x y`, `t i j k` and `e i j tag` lines.
    #[arg(long)]
    pub dump_mesh: Option<PathBuf>,

    /// Write `x,y,u_h,u` per vertex as CSV.
    #[arg(long)]
    pub dump_field: Option<PathBuf>,
}

/// Grid, solver and output flags shared by `sweep` and `alpha-study`.
/// Explicit values override the preset.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// desk: 256 cells, k in [4, 11], fit [6, 11]. paper: 512 cells, k in [0, 14], fit [8, 14].
    #[arg(long, default_value = "desk")]
    pub preset: Preset,

    /// Cells per side [default: from preset]
    #[arg(long)]
    pub n_cells: Option<usize>,

    /// Epsilon base b in eps = b^-k.
    #[arg(long, default_value_t = 1.6, allow_hyphen_values = true)]
    pub base: f64,

    /// First exponent [default: from preset]
    #[arg(long, allow_hyphen_values = true)]
    pub k_min: Option<i32>,

    /// Last exponent [default: from preset]
    #[arg(long, allow_hyphen_values = true)]
    pub k_max: Option<i32>,

    /// First exponent of the fit window [default: preset window clipped to the grid]
    #[arg(long, allow_hyphen_values = true)]
    pub fit_lo: Option<i32>,

    /// Last exponent of the fit window [default: preset window clipped to the grid]
    #[arg(long, allow_hyphen_values = true)]
    pub fit_hi: Option<i32>,

    /// Concurrent solves; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    #[command(flatten)]
    pub solver: SolverArgs,

    /// Output directory.
    #[arg(long, env = "ADVREG_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,

    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

impl GridArgs {
    pub fn config(&self, example: &str, s: Option<f64>) -> SweepConfig {
        let preset = SweepConfig::preset(self.preset, example, s);
        let k_min = self.k_min.unwrap_or(preset.k_min);
        let k_max = self.k_max.unwrap_or(preset.k_max);
        SweepConfig {
            n_cells: self.n_cells.unwrap_or(preset.n_cells),
            base: self.base,
            k_min,
            k_max,
            fit_lo: self.fit_lo.unwrap_or(preset.fit_lo.max(k_min)),
            fit_hi: self.fit_hi.unwrap_or(preset.fit_hi.min(k_max)),
            solver: self.solver.options(),
            jobs: self.jobs,
            ..preset
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// example1, example2, example3 or example4.
    #[arg(long)]
    pub example: String,

    /// Shape parameter of example1 (default 0.51) and example4 (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// Comma-separated s values, alpha = 1/s.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "4,2,1.3333333333333333,1,0.8"
    )]
    pub s_list: Vec<f64>,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// Manifest written by a previous sweep or alpha-study.
    #[arg(long)]
    pub manifest: PathBuf,

    /// Output directory.
    #[arg(long, env = "ADVREG_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
}
