use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use quasidetect::trials::{DetectionEvent, FitResult, SpatialHistogram};
use serde::Serialize;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

/// `{}` on f64 is the shortest string that parses back to the same value.
fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_events(path: &Path, events: &[DetectionEvent]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trial", "molecule", "x", "y", "z", "omega_n", "omega_in", "tau_det"])?;
    for e in events {
        w.write_record([
            e.trial.to_string(),
            e.molecule.to_string(),
            num(e.position[0]),
            num(e.position[1]),
            num(e.position[2]),
            num(e.omega_n),
            num(e.omega_in),
            num(e.tau_det),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram(path: &Path, h: &SpatialHistogram) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["bin_lo", "bin_hi", "count", "psi_sq_bin_mean", "psi_abs_bin_mean"])?;
    for b in 0..h.bins() {
        w.write_record([
            num(h.edges[b]),
            num(h.edges[b + 1]),
            h.counts[b].to_string(),
            num(h.psi_sq_mean[b]),
            num(h.psi_abs_mean[b]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub r_squared: f64,
}

impl From<&FitResult> for FitSummary {
    fn from(f: &FitResult) -> Self {
        Self {
            slope: f.slope,
            r_squared: f.r_squared,
        }
    }
}
