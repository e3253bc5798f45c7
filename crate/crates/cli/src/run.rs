//! `simulate` and `experiment` subcommands.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, Result};
use quasidetect::trials::{
    amplitude_fit, born_fit, experiment_dissipation_free, experiment_rarified, experiment_spectral_bias,
    experiment_transverse_scale, repeatability_experiment, run_ensemble, MediumMode, SpectralBias, TransverseSweep,
    TrialEngine,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{Resolved, RunConfig};
use crate::output::{ensure_dir, write_events, write_histogram, write_json, write_rows, FitSummary};

#[derive(Debug, Serialize)]
struct SimulateSummary<'a> {
    command: &'static str,
    config: &'a RunConfig,
    trials: u64,
    detections: u64,
    unbinned: u64,
    zero_candidate_trials: u64,
    mean_multiplicity: f64,
    born_fit: Option<FitSummary>,
    amplitude_fit: Option<FitSummary>,
    fit_error: Option<String>,
}

pub fn simulate(r: &Resolved, threads: Option<usize>) -> Result<()> {
    let out = &r.config.output_dir;
    ensure_dir(out)?;
    let ens = run_ensemble(&TrialEngine::new(r.trial.clone())?, threads)?;
    let (born, amp, fit_error) = if r.trial.wavepacket.dimension() == 1 {
        match (born_fit(&ens.histogram), amplitude_fit(&ens.histogram)) {
            (Ok(b), Ok(a)) => (Some(FitSummary::from(&b)), Some(FitSummary::from(&a)), None),
            (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
        }
    } else {
        (
            None,
            None,
            Some("fits are computed for one-dimensional runs only".into()),
        )
    };
    write_events(&out.join("events.csv"), &ens.events)?;
    write_histogram(&out.join("histogram.csv"), &ens.histogram)?;
    let summary = SimulateSummary {
        command: "simulate",
        config: &r.config,
        trials: ens.trials,
        detections: ens.events.len() as u64,
        unbinned: ens.histogram.unbinned,
        zero_candidate_trials: ens.zero_candidate_trials,
        mean_multiplicity: ens.mean_multiplicity(),
        born_fit: born,
        amplitude_fit: amp,
        fit_error,
    };
    write_json(&out.join("summary.json"), &summary)?;
    match &summary.born_fit {
        Some(f) => println!(
            "{} trials, {} detections, slope {:.6e}, R^2 {:.4}",
            summary.trials, summary.detections, f.slope, f.r_squared
        ),
        None => println!("{} trials, {} detections", summary.trials, summary.detections),
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    DissipationFree,
    SpectralBias,
    Rarified,
    TransverseScale,
    Repeatability,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::DissipationFree,
        Experiment::SpectralBias,
        Experiment::Rarified,
        Experiment::TransverseScale,
        Experiment::Repeatability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DissipationFree => "dissipation_free",
            Experiment::SpectralBias => "spectral_bias",
            Experiment::Rarified => "rarified",
            Experiment::TransverseScale => "transverse_scale",
            Experiment::Repeatability => "repeatability",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
            anyhow!("unknown experiment `{s}`; valid names: {}", names.join(", "))
        })
    }
}

/// Thread count for the second repeatability run when none is given.
const REPEAT_THREADS: usize = 8;

pub fn experiment(which: Experiment, r: &Resolved, threads: Option<usize>) -> Result<()> {
    let out = &r.config.output_dir;
    ensure_dir(out)?;
    let presets = &r.config.experiments;
    let (verdict, details) = match which {
        Experiment::DissipationFree => {
            let rep = experiment_dissipation_free(&r.trial, threads)?;
            write_histogram(&out.join("histogram.csv"), &rep.histogram)?;
            let details = json!({
                "fit_amplitude": FitSummary::from(&rep.fit_amplitude),
                "fit_density": FitSummary::from(&rep.fit_density),
                "detections": rep.histogram.detections,
            });
            (rep.amplitude_preferred, details)
        }
        Experiment::SpectralBias => {
            let p = &presets.spectral_bias;
            let bias = SpectralBias {
                threshold: p.threshold,
                offset: p.offset_bandwidths * r.trial.wavepacket.bandwidth(),
            };
            let rep = experiment_spectral_bias(&r.trial, bias, threads)?;
            write_histogram(&out.join("histogram.csv"), &rep.histogram)?;
            let details = json!({
                "threshold": bias.threshold,
                "offset": bias.offset,
                "detections": rep.detections,
                "biased_region_detections": rep.biased_region_detections,
                "unbiased_region_detections": rep.unbiased_region_detections,
            });
            (rep.biased_region_detections == 0, details)
        }
        Experiment::Rarified => {
            let p = &presets.rarified;
            let mut cfg = r.trial.clone();
            let peak = cfg.wavepacket.amplitude_bound();
            cfg.epsilon = p.peak_window_bandwidths * cfg.wavepacket.bandwidth() / peak;
            let rep = experiment_rarified(&cfg, &p.ratios, p.trials, threads)?;
            write_rows(&out.join("rarified.csv"), &rep.points)?;
            let details = json!({
                "epsilon": cfg.epsilon,
                "bandwidth": rep.bandwidth,
                "monotone": rep.monotone,
                "above_half_past_crossover": rep.above_half_past_crossover,
            });
            (rep.monotone && rep.above_half_past_crossover, details)
        }
        Experiment::TransverseScale => {
            let p = &presets.transverse_scale;
            let mut cfg = r.trial.clone();
            cfg.medium.density = p.density;
            cfg.medium.spread = p.spread;
            cfg.epsilon = p.epsilon;
            let sweep = TransverseSweep {
                extent_widths: p.extent_widths,
                trials: p.trials,
                grid_points: p.grid_points,
            };
            let rep = experiment_transverse_scale(&cfg, &p.widths, sweep, threads)?;
            write_rows(&out.join("transverse_scale.csv"), &rep.points)?;
            let within = rep
                .crossover
                .map(|s| {
                    let ratio = s / rep.predicted_crossover;
                    ratio > 1.0 / 3.0 && ratio < 3.0
                })
                .unwrap_or(false);
            let details = json!({
                "crossover": rep.crossover,
                "predicted_crossover": rep.predicted_crossover,
                "increasing": rep.increasing,
            });
            (rep.increasing && within, details)
        }
        Experiment::Repeatability => {
            let cfg = r.trial.clone();
            if cfg.medium_mode != MediumMode::Frozen {
                return Err(anyhow!("repeatability needs trials.medium_mode = \"frozen\""));
            }
            let rep = repeatability_experiment(&cfg, threads.unwrap_or(REPEAT_THREADS))?;
            let ens = run_ensemble(&TrialEngine::new(cfg)?, threads)?;
            write_events(&out.join("events.csv"), &ens.events)?;
            let details = serde_json::to_value(&rep)?;
            (rep.identical, details)
        }
    };
    let summary = json!({
        "command": "experiment",
        "experiment": which.name(),
        "config": r.config,
        "verdict": verdict,
        "details": details,
    });
    write_json(&out.join("summary.json"), &summary)?;
    println!("{which}: verdict {}", if verdict { "pass" } else { "fail" });
    Ok(())
}
