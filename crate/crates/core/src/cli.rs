//! Command-line front end: `analyze`, `scan`, `hopf`, `simulate`, `verify`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::dynamics::{self, SimulationOptions, PERSISTENCE_FLOOR};
use crate::equilibria;
use crate::hopf;
use crate::integrate::Tolerances;
use crate::stability;
use crate::verify::{self, Status};

#[derive(Debug, Parser)]
#[command(name = "chemostat", version, about = "Nutrient-prey-predator chemostat analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Leading fraction of a trajectory ignored by cycle detection.
    #[arg(long)]
    pub transient_fraction: Option<f64>,
    /// Section crossings needed before a cycle can be reported.
    #[arg(long)]
    pub min_crossings: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thresholds, equilibria and their stability at a scalar mu.
    Analyze(Args),
    /// Eigenvalue data of the coexistence state over a mu range (scan.csv).
    Scan(Args),
    /// Locate and certify the Hopf point (hopf.json).
    Hopf(Args),
    /// Integrate a trajectory and classify it (trajectory.csv, cycle.json).
    Simulate(Args),
    /// Run the self-check suite (verify.json, appendix_ratios.csv).
    Verify(Args),
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub overrides: Overrides,
}

fn apply(cfg: &mut RunConfig, o: &Overrides) {
    let s = &mut cfg.simulate;
    if let Some(v) = o.rel_tol {
        s.rel_tol = v;
    }
    if let Some(v) = o.abs_tol {
        s.abs_tol = v;
    }
    if let Some(v) = o.t_end {
        s.t_end = v;
    }
    if let Some(v) = o.transient_fraction {
        s.transient_fraction = v;
    }
    if let Some(v) = o.min_crossings {
        s.min_crossings = v;
    }
    if let Some(v) = o.seed {
        cfg.verify.seed = v;
    }
}

fn load(args: &Args, validate: bool) -> Result<RunConfig> {
    let path = &args.common.config;
    let mut cfg = RunConfig::from_path_unvalidated(path).with_context(|| format!("reading {}", path.display()))?;
    apply(&mut cfg, &args.overrides);
    if validate {
        cfg.validate().with_context(|| format!("invalid config {}", path.display()))?;
    }
    Ok(cfg)
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn analyze(args: &Args) -> Result<bool> {
    let cfg = load(args, true)?;
    let p = cfg.scalar_parameters()?;
    let a = stability::analyze(&p)?;
    println!(
        "mu = {}  lambda_P = {:.6}  lambda_Z = {:.6}  mu_c1 = {:.6}",
        a.mu, a.lambda_p, a.lambda_z, a.mu_c1
    );
    for e in &a.equilibria {
        let eigs: Vec<String> = e
            .eigenvalues
            .iter()
            .map(|[re, im]| if *im == 0.0 { format!("{re:.6}") } else { format!("{re:.6}{im:+.6}i") })
            .collect();
        println!(
            "{}  ({:.6}, {:.6}, {:.6})  {:?}  [{}]",
            e.name,
            e.state.n,
            e.state.p,
            e.state.z,
            e.stability,
            eigs.join(", ")
        );
    }
    write_json(&args.common.out, "analyze.json", &a)?;
    Ok(true)
}

fn scan(args: &Args) -> Result<bool> {
    let cfg = load(args, true)?;
    let p = cfg.base_parameters()?;
    let c1 = equilibria::mu_c1(&p)?;
    let grid = cfg.parameters.mu.grid();
    let kept: Vec<f64> = grid.iter().copied().filter(|&mu| mu > c1).collect();
    if kept.len() < grid.len() {
        eprintln!(
            "warning: dropped {} grid point(s) at or below mu_c1 = {c1}, where no coexistence state exists",
            grid.len() - kept.len()
        );
    }
    if kept.is_empty() {
        bail!("no grid point lies above mu_c1 = {c1}");
    }
    let curve = hopf::real_part_curve_on(&p, &kept)?;
    let mut w = create(&args.common.out, "scan.csv")?;
    writeln!(w, "mu,N,Z,re_pair,im_pair,alpha,discriminant,classification")?;
    for c in &curve.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:?}",
            c.mu, c.n, c.z, c.re_pair, c.im_pair, c.alpha, c.discriminant, c.stability
        )?;
    }
    w.flush()?;
    let changes = curve.sign_changes();
    println!("{} grid points, {} sign change(s) of the pair's real part", curve.points.len(), changes.len());
    for (lo, hi) in changes {
        println!("  crossing in [{lo}, {hi}]");
    }
    Ok(true)
}

fn hopf_cmd(args: &Args) -> Result<bool> {
    let cfg = load(args, true)?;
    let p = cfg.base_parameters()?;
    let bracket = match cfg.hopf.bracket {
        Some(b) => b,
        None => hopf::default_bracket(&p).context("searching for a default bracket")?,
    };
    let cert = hopf::find_hopf(&p, bracket)?;
    println!(
        "mu_c2 = {:.10}  slope = {:.6}  omega = {:.6}  alpha = {:.6}",
        cert.mu_c2, cert.re_slope, cert.imag_at_crossing, cert.alpha_at_crossing
    );
    write_json(&args.common.out, "hopf.json", &cert)?;
    Ok(true)
}

#[derive(Serialize)]
struct SimulationSummary {
    mu: f64,
    init: crate::State,
    final_state: crate::State,
    cycle: dynamics::CycleReport,
    persistence: dynamics::PersistenceReport,
    integrator: crate::integrate::IntegratorStats,
}

fn simulate(args: &Args) -> Result<bool> {
    let cfg = load(args, true)?;
    let p = cfg.scalar_parameters()?;
    let s = &cfg.simulate;
    let init = cfg.initial_state(&p).context("building the initial state")?;
    let opts = SimulationOptions {
        t_end: s.t_end,
        tol: Tolerances {
            rel: s.rel_tol,
            abs: s.abs_tol,
        },
        sample_dt: s.sample_dt,
    };
    let traj = dynamics::integrate(&p, init, &opts).context("integrating")?;
    let cycle = dynamics::detect_cycle(&traj, &s.cycle_config())?;
    let persistence = dynamics::persistence_check(&traj, PERSISTENCE_FLOOR);
    let mut w = create(&args.common.out, "trajectory.csv")?;
    traj.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "{:?}: amplitude {:.3e}, period {}, {} steps ({} rejected)",
        cycle.classification,
        cycle.amplitude,
        cycle.period.map_or("-".into(), |t| format!("{t:.4}")),
        traj.stats.steps,
        traj.stats.rejected_steps
    );
    let summary = SimulationSummary {
        mu: p.mu(),
        init,
        final_state: traj.final_state(),
        cycle,
        persistence,
        integrator: traj.stats,
    };
    write_json(&args.common.out, "cycle.json", &summary)?;
    Ok(true)
}

fn verify_cmd(args: &Args) -> Result<bool> {
    let cfg = load(args, false)?;
    let report = verify::run_suite(&cfg);
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        println!("{tag}  {:<26} {}", c.name, c.detail);
    }
    write_json(&args.common.out, "verify.json", &report)?;
    if let Some(a) = &report.appendix {
        let mut w = create(&args.common.out, "appendix_ratios.csv")?;
        writeln!(w, "radius,max_ratio,max_difference,argmax_D1,argmax_D2,argmax_mu")?;
        for r in &a.rows {
            let (d1, d2, mu) = r.argmax;
            writeln!(w, "{},{},{},{d1},{d2},{mu}", r.radius, r.max_ratio, r.max_difference)?;
        }
        w.flush()?;
    }
    Ok(report.all_passed())
}

/// Run with explicit arguments (the first is the program name). Returns
/// success only if the command finished and, for `verify`, every check passed.
pub fn run<I, T>(args: I) -> Result<bool>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    dispatch(&Cli::try_parse_from(args)?)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Scan(a) => scan(a),
        Command::Hopf(a) => hopf_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
