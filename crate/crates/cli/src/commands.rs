use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use advreg_core::plot::{alpha_chart, rate_chart};
use advreg_core::sweep::{fit_summary, write_alpha_csv, write_fit_csv, write_records_csv, FitRow};
use advreg_core::{
    alpha_study, fit_rate, run_sweep, AlphaRow, DiscreteField, ErrorRecord, Norm, Problem, RegularizedProblem,
    SolveContext, SweepConfig,
};

use crate::args::{AlphaArgs, RerunArgs, SolveArgs, SweepArgs};
use crate::manifest::{Run, RunManifest};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<advreg_core::Error> for Failure {
    fn from(e: advreg_core::Error) -> Self {
        let code = if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_USAGE };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CmdResult = Result<i32, Failure>;

/// Standard-output summary sink.
#[derive(Debug, Clone, Copy)]
pub struct Printer {
    pub quiet: bool,
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        if !$out.quiet {
            println!($($arg)*);
        }
    };
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

pub fn solve(args: &SolveArgs, out: Printer) -> CmdResult {
    let problem = Problem::from_label(&args.example, args.s)?;
    RegularizedProblem::new(problem, args.eps)?;
    let ctx = SolveContext::new(problem, args.n_cells)?;
    if let Some(path) = &args.dump_mesh {
        let file = BufWriter::new(fs::File::create(path)?);
        ctx.mesh.write_dump(&ctx.tags, file)?;
    }
    let result = ctx.solve(args.eps, &args.solver.options())?;

    say!(
        out,
        "{} eps={:e} n_cells={} h={:.6e} solver={}",
        problem.label(),
        args.eps,
        args.n_cells,
        ctx.mesh.h,
        args.solver.solver
    );
    say!(out, "l2_domain      {:.6e}", result.norms.l2_domain);
    say!(out, "l2_gamma_plus  {}", fmt_opt(result.norms.l2_gamma_plus));
    say!(out, "h1_semi        {:.6e}", result.norms.h1_semi);
    say!(out, "l2_gamma0      {}", fmt_opt(result.norms.l2_gamma0));
    say!(out, "residual       {:.3e}", result.residual);
    say!(out, "iterations     {}", result.iterations);
    say!(out, "peclet         {:.4}", result.peclet);
    if result.peclet_warning() {
        eprintln!(
            "warning: mesh Peclet number {:.3} exceeds 1; the Galerkin solution may oscillate",
            result.peclet
        );
    }

    if let Some(path) = &args.dump_field {
        let field = DiscreteField::new(&ctx.mesh, result.values);
        let mut w = BufWriter::new(fs::File::create(path)?);
        writeln!(w, "x,y,u_h,u")?;
        for (p, v) in ctx.mesh.vertices.iter().zip(&field.values) {
            writeln!(w, "{},{},{},{}", p[0], p[1], v, problem.u(*p))?;
        }
        w.flush()?;
    }
    Ok(0)
}

/// Files written into an output directory, removed again unless `commit` is called.
struct Staged {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl Staged {
    fn new(dir: &Path) -> std::io::Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
            committed: false,
        })
    }

    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), Failure>,
    ) -> Result<(), Failure> {
        let path = self.dir.join(name);
        self.files.push(path.clone());
        let mut w = BufWriter::new(fs::File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.files)
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

fn write_manifest(staged: &mut Staged, run: Run) -> Result<(), Failure> {
    let mut outputs = staged.files.clone();
    outputs.push(staged.dir.join("manifest.json"));
    let manifest = RunManifest::new(run, outputs);
    staged.write("manifest.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest).map_err(|e| Failure::usage(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn sweep(args: &SweepArgs, out: Printer) -> CmdResult {
    let s = Problem::from_label(&args.example, args.s).map_or(args.s, |p| p.s());
    let config = args.grid.config(&args.example, s);
    run_sweep_command(&config, args.grid.svg, &args.grid.out_dir, out)
}

fn run_sweep_command(config: &SweepConfig, svg: bool, out_dir: &Path, out: Printer) -> CmdResult {
    config.validate()?;
    let records = run_sweep(config)?;
    let fits = fit_summary(&records, config)?;
    for r in records.iter().filter(|r| r.peclet_warning()) {
        eprintln!("warning: k={} mesh Peclet number {:.3} exceeds 1", r.k, r.peclet);
    }

    let mut staged = Staged::new(out_dir)?;
    staged.write("records.csv", |w| Ok(write_records_csv(&records, w)?))?;
    staged.write("fit.csv", |w| Ok(write_fit_csv(&fits, w)?))?;
    if svg {
        write_rate_charts(&mut staged, &records, config)?;
    }
    write_manifest(
        &mut staged,
        Run::Sweep {
            config: config.clone(),
            svg,
        },
    )?;
    let written = staged.commit();

    print_fits(config, &fits, out);
    for path in written {
        say!(out, "wrote {}", path.display());
    }
    Ok(0)
}

fn write_rate_charts(staged: &mut Staged, records: &[ErrorRecord], config: &SweepConfig) -> Result<(), Failure> {
    for norm in Norm::ALL {
        if records.iter().all(|r| r.get(norm).is_none()) {
            continue;
        }
        let fit = fit_rate(records, norm, config.fit_lo, config.fit_hi)?;
        let svg = rate_chart(records, &fit, config.fit_lo, config.fit_hi).to_svg();
        staged.write(&format!("rate_{}.svg", norm.name()), |w| {
            Ok(w.write_all(svg.as_bytes())?)
        })?;
    }
    Ok(())
}

fn print_fits(config: &SweepConfig, fits: &[FitRow], out: Printer) {
    say!(
        out,
        "{} s={} n_cells={} k=[{}, {}] fit=[{}, {}]",
        config.example,
        config.s.map_or_else(|| "-".into(), |s| s.to_string()),
        config.n_cells,
        config.k_min,
        config.k_max,
        config.fit_lo,
        config.fit_hi
    );
    say!(out, "{:<14} {:>8} {:>8} {:>8}", "norm", "fitted", "expected", "r2");
    for f in fits {
        let expected = f.expected_rate.map_or_else(|| "-".to_string(), |e| format!("{e:.4}"));
        say!(
            out,
            "{:<14} {:>8.4} {:>8} {:>8.4}",
            f.norm,
            f.rate,
            expected,
            f.r_squared
        );
    }
}

pub fn alpha(args: &AlphaArgs, out: Printer) -> CmdResult {
    let template = args.grid.config("example4", None);
    run_alpha_command(&args.s_list, &template, args.grid.svg, &args.grid.out_dir, out)
}

fn run_alpha_command(s_list: &[f64], template: &SweepConfig, svg: bool, out_dir: &Path, out: Printer) -> CmdResult {
    if s_list.is_empty() {
        return Err(Failure::usage("--s-list needs at least one value"));
    }
    for &s in s_list {
        SweepConfig {
            s: Some(s),
            ..template.clone()
        }
        .validate()?;
    }
    let rows = alpha_study(s_list, template)?;

    let mut staged = Staged::new(out_dir)?;
    staged.write("alpha.csv", |w| Ok(write_alpha_csv(&rows, w)?))?;
    if svg {
        let chart = alpha_chart(&rows).to_svg();
        staged.write("alpha.svg", |w| Ok(w.write_all(chart.as_bytes())?))?;
    }
    write_manifest(
        &mut staged,
        Run::AlphaStudy {
            s_list: s_list.to_vec(),
            template: template.clone(),
            svg,
        },
    )?;
    let written = staged.commit();

    print_alpha(&rows, out);
    for path in written {
        say!(out, "wrote {}", path.display());
    }
    if rows.iter().any(AlphaRow::succeeded) {
        Ok(0)
    } else {
        eprintln!("every alpha-study row failed");
        Ok(EXIT_SOLVER)
    }
}

fn print_alpha(rows: &[AlphaRow], out: Printer) {
    say!(
        out,
        "{:>8} {:>8} {:>8} {:>8}  status",
        "s",
        "alpha",
        "fitted",
        "expected"
    );
    for r in rows {
        let rate = r.rate.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        say!(
            out,
            "{:>8.4} {:>8.4} {:>8} {:>8.4}  {}",
            r.s,
            r.alpha,
            rate,
            r.expected_rate,
            r.status
        );
    }
}

pub fn rerun(args: &RerunArgs, out: Printer) -> CmdResult {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid manifest: {e}")))?;
    match &manifest.run {
        Run::Sweep { config, svg } => run_sweep_command(config, *svg, &args.out_dir, out),
        Run::AlphaStudy { s_list, template, svg } => run_alpha_command(s_list, template, *svg, &args.out_dir, out),
    }
}
