//! Command-line driver for the meromorphic interpolation pipeline.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use merointerp::local_map::{certify_chart, LocalChart, MeshSpec};
use merointerp::pipeline::{
    analyze_poles, emit, exit_code, load_saved, prepare_dir, reconstruction_stage, run, write_json,
    ExperimentConfig,
};
use merointerp::stochastic::Mode;
use merointerp::Error;

#[derive(Parser, Debug)]
#[command(name = "merointerp", version, about = "Meromorphic interpolation of random Fourier series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and write the report.
    Run(RunArgs),
    /// Certify the local-map chart for the configured mode and radii.
    VerifyLocalmap(RunArgs),
    /// Recompute pole statistics from a saved run.
    Density(SavedArgs),
    /// Re-solve the reconstruction from a saved run.
    Reconstruct(SavedArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML or JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed of the ChaCha8 stream for the Gaussian draw.
    #[arg(long)]
    seed: Option<u64>,
    /// `real` or `complex` coefficients.
    #[arg(long)]
    mode: Option<Mode>,
    /// Weight exponent in `ω(x) = (1+|x|)^−β`, must exceed 1/2.
    #[arg(long)]
    beta: Option<f64>,
    /// Interpolation half-width `N`.
    #[arg(long)]
    n: Option<usize>,
    /// Initial block spacing `T`.
    #[arg(long)]
    t_spacing: Option<i64>,
    /// Fixed-point step tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Fixed-point iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Plant a selectable block at every block index divisible by this stride.
    #[arg(long)]
    plant_every: Option<i64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the CSV tables.
    #[arg(long)]
    tables: bool,
    /// Validate the configuration and certify the chart without solving.
    #[arg(long)]
    verify_only: bool,
    /// Fail instead of creating a missing output directory.
    #[arg(long)]
    no_create: bool,
    /// Skip the reconstruction stage.
    #[arg(long)]
    no_reconstruct: bool,
    /// Skip the 2N growth comparison.
    #[arg(long)]
    no_growth_compare: bool,
}

#[derive(Args, Debug)]
struct SavedArgs {
    /// Path to an `interpolant.json` written by `run`.
    saved: PathBuf,
    /// Output file for the JSON result; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p).map_err(as_config_error)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => { $(if let Some(v) = self.$field.clone() { cfg.$field = v; })* };
        }
        apply!(seed, mode, beta, n, t_spacing, tol, max_iter);
        if self.plant_every.is_some() {
            cfg.plant_every = self.plant_every;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.tables |= self.tables;
        cfg.reconstruct &= !self.no_reconstruct;
        cfg.growth_compare &= !self.no_growth_compare;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn as_config_error(e: Error) -> Error {
    match e {
        Error::Json(j) => Error::Config(j.to_string()),
        other => other,
    }
}

fn certify(cfg: &ExperimentConfig) -> Result<bool, Error> {
    let chart: LocalChart = cfg.chart()?;
    let map = chart.map().clone();
    let mesh = MeshSpec::for_dim(map.dim());
    let cert = certify_chart(map, chart.gamma1, chart.gamma2, mesh)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(cert.passed)
}

fn write_or_print<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                prepare_dir(dir, true)?;
            }
            write_json(p, value)
        }
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            if args.verify_only {
                return Ok(if certify(&cfg)? { 0 } else { 3 });
            }
            let out = run(&cfg)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let files = emit(&dir, &out.report, &out.saved, cfg.tables, !args.no_create)?;
            for f in &files {
                eprintln!("wrote {}", f.display());
            }
            for g in &out.report.gates {
                eprintln!("{:<26} {} value={:e} threshold={:e}", g.name, if g.passed { "pass" } else { "FAIL" }, g.value, g.threshold);
            }
            let failures = out.report.hard_failures();
            if failures.is_empty() {
                Ok(0)
            } else {
                eprintln!("hard invariant failures: {}", failures.join(", "));
                Ok(3)
            }
        }
        Command::VerifyLocalmap(args) => {
            let cfg = args.config()?;
            Ok(if certify(&cfg)? { 0 } else { 3 })
        }
        Command::Density(args) => {
            let saved = load_saved(&args.saved).map_err(as_config_error)?;
            let r = saved.restore()?;
            let poles = analyze_poles(&r.sum, &r.partition, saved.config.n as i64)?;
            write_or_print(&poles, args.out.as_deref())?;
            Ok(if poles.deficit_matches { 0 } else { 3 })
        }
        Command::Reconstruct(args) => {
            let saved = load_saved(&args.saved).map_err(as_config_error)?;
            let r = saved.restore()?;
            let rec = reconstruction_stage(&r.sum, &r.partition, &r.draw, &r.weight, &saved.config)?;
            write_or_print(&rec, args.out.as_deref())?;
            Ok(if rec.monotone && rec.avdonin.passing_h.is_some() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
