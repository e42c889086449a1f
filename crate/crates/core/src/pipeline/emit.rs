//! Writing reports, saved runs and plot-ready CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::report::{ExperimentReport, SavedRun};
use crate::analysis::{counting_profile, PoleSet};
use crate::error::{Error, Result};

pub const REPORT_FILE: &str = "report.json";
pub const INTERPOLANT_FILE: &str = "interpolant.json";
pub const COUNTING_TABLE: &str = "counting.csv";
pub const ITERATION_TABLE: &str = "iterations.csv";
pub const RECONSTRUCTION_TABLE: &str = "reconstruction.csv";
pub const TYPE_TABLE: &str = "type_profile.csv";

/// Creates `dir` when allowed, otherwise requires it to exist.
pub fn prepare_dir(dir: &Path, create: bool) -> Result<()> {
    if dir.is_dir() {
        return Ok(());
    }
    if create {
        fs::create_dir_all(dir)?;
        Ok(())
    } else {
        Err(Error::Config(format!("output directory {} does not exist", dir.display())))
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the four tables and returns their paths.
pub fn write_tables(dir: &Path, report: &ExperimentReport, saved: &SavedRun) -> Result<Vec<PathBuf>> {
    let restored = saved.restore()?;
    let q = PoleSet::new(restored.sum.all_poles())?;
    let eps = report.poles.eps_hat;
    let n = report.config.n as i64;
    let counting = dir.join(COUNTING_TABLE);
    write_csv(
        &counting,
        &["t", "n_q", "deviation"],
        counting_profile(&q, n).into_iter().map(|(t, c)| {
            let dev = (c as f64 - (1.0 - eps) * t as f64).abs() / (1.0 + (t.abs() as f64).powf(2.0 / 3.0));
            vec![t.to_string(), c.to_string(), dev.to_string()]
        }),
    )?;
    let iterations = dir.join(ITERATION_TABLE);
    let it = &report.iteration;
    write_csv(
        &iterations,
        &["j", "step", "bound"],
        it.steps.iter().zip(&it.step_bounds).enumerate().map(|(j, (s, b))| vec![(j + 1).to_string(), s.to_string(), b.to_string()]),
    )?;
    let recon = dir.join(RECONSTRUCTION_TABLE);
    let curve = report.reconstruction.as_ref().map(|r| r.error_curve.clone()).unwrap_or_default();
    write_csv(
        &recon,
        &["radius", "size", "relative_error"],
        curve.iter().map(|p| vec![p.radius.to_string(), p.size.to_string(), p.relative_error.to_string()]),
    )?;
    let types = dir.join(TYPE_TABLE);
    let c = &report.cartwright;
    write_csv(
        &types,
        &["y", "log_v_over_y", "log_u_over_y"],
        c.type_v.profile.iter().enumerate().map(|(i, (y, lv))| {
            let lu = c.type_u.as_ref().map(|t| t.profile[i].1.to_string()).unwrap_or_default();
            vec![y.to_string(), lv.to_string(), lu]
        }),
    )?;
    Ok(vec![counting, iterations, recon, types])
}

/// Writes the report, the saved run and, when requested, the tables.
pub fn emit(dir: &Path, report: &ExperimentReport, saved: &SavedRun, tables: bool, create: bool) -> Result<Vec<PathBuf>> {
    prepare_dir(dir, create)?;
    let mut written = vec![dir.join(REPORT_FILE), dir.join(INTERPOLANT_FILE)];
    write_json(&written[0], report)?;
    write_json(&written[1], saved)?;
    if tables {
        written.extend(write_tables(dir, report, saved)?);
    }
    Ok(written)
}

/// Reads a saved run.
pub fn load_saved(path: &Path) -> Result<SavedRun> {
    let saved: SavedRun = serde_json::from_str(&fs::read_to_string(path)?)?;
    if saved.schema_version != super::report::SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported saved-run schema {}", saved.schema_version)));
    }
    Ok(saved)
}
