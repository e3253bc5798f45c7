//! Deviation experiments built on the trial engine.

use std::f64::consts::PI;

use serde::Serialize;

use super::{
    amplitude_fit, born_fit, run_ensemble, with_threads, DetectionEvent, FitResult, MediumMode, SpatialHistogram,
    SpectralBias, TrialConfig, TrialEngine,
};
use crate::error::{invalid, Error, Result};
use crate::medium::{CountLaw, MediumSpec};
use crate::wavepacket::{make_gaussian, SpectralGrid, Wavepacket};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunComparison {
    pub identical: bool,
    pub events_first: usize,
    pub events_second: usize,
    /// Trials whose outcome differs between the two runs.
    pub differing_trials: Vec<u64>,
}

pub fn compare_event_logs(a: &[DetectionEvent], b: &[DetectionEvent]) -> RunComparison {
    use std::collections::BTreeMap;
    let index = |v: &[DetectionEvent]| -> BTreeMap<u64, DetectionEvent> { v.iter().map(|e| (e.trial, *e)).collect() };
    let (ia, ib) = (index(a), index(b));
    let mut differing: Vec<u64> = ia
        .iter()
        .filter(|(t, e)| ib.get(t) != Some(e))
        .map(|(t, _)| *t)
        .chain(ib.keys().filter(|t| !ia.contains_key(t)).copied())
        .collect();
    differing.sort_unstable();
    differing.dedup();
    RunComparison {
        identical: a == b,
        events_first: a.len(),
        events_second: b.len(),
        differing_trials: differing,
    }
}

/// Runs a frozen-medium configuration twice from scratch, once on one
/// thread and once on `threads`, and compares the event sequences.
pub fn repeatability_experiment(cfg: &TrialConfig, threads: usize) -> Result<RunComparison> {
    if cfg.medium_mode != MediumMode::Frozen {
        return Err(Error::Precondition(
            "repeatability requires medium_mode = frozen".into(),
        ));
    }
    let first = run_ensemble(&TrialEngine::new(cfg.clone())?, Some(1))?;
    let second = run_ensemble(&TrialEngine::new(cfg.clone())?, Some(threads))?;
    Ok(compare_event_logs(&first.events, &second.events))
}

#[derive(Debug, Clone, Serialize)]
pub struct DissipationFreeReport {
    pub histogram: SpatialHistogram,
    pub fit_amplitude: FitResult,
    pub fit_density: FitResult,
    /// The `|psi|` fit has the higher R^2.
    pub amplitude_preferred: bool,
}

/// Every selected candidate fires, so the detection rate follows `|psi|`.
pub fn experiment_dissipation_free(cfg: &TrialConfig, threads: Option<usize>) -> Result<DissipationFreeReport> {
    let mut cfg = cfg.clone();
    cfg.window_open = true;
    let ens = run_ensemble(&TrialEngine::new(cfg)?, threads)?;
    let fit_amplitude = amplitude_fit(&ens.histogram)?;
    let fit_density = born_fit(&ens.histogram)?;
    Ok(DissipationFreeReport {
        amplitude_preferred: fit_amplitude.r_squared > fit_density.r_squared,
        histogram: ens.histogram,
        fit_amplitude,
        fit_density,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralBiasReport {
    pub bias: SpectralBias,
    pub histogram: SpatialHistogram,
    pub detections: usize,
    pub biased_region_detections: usize,
    pub unbiased_region_detections: usize,
}

pub fn experiment_spectral_bias(
    cfg: &TrialConfig,
    bias: SpectralBias,
    threads: Option<usize>,
) -> Result<SpectralBiasReport> {
    let mut cfg = cfg.clone();
    cfg.bias = Some(bias);
    let ens = run_ensemble(&TrialEngine::new(cfg)?, threads)?;
    let biased = ens.events.iter().filter(|e| bias.in_region(&e.position)).count();
    Ok(SpectralBiasReport {
        bias,
        histogram: ens.histogram,
        detections: ens.events.len(),
        biased_region_detections: biased,
        unbiased_region_detections: ens.events.len() - biased,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RarifiedPoint {
    pub delta_over_omega: f64,
    pub density: f64,
    pub trials: u64,
    pub no_resonance_fraction: f64,
    pub mean_multiplicity: f64,
    /// `exp(-expected candidates)` for Poisson counts and uniform levels.
    pub predicted_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RarifiedReport {
    pub bandwidth: f64,
    pub points: Vec<RarifiedPoint>,
    pub monotone: bool,
    /// Every point with spacing at or above the bandwidth has fraction > 0.5.
    pub above_half_past_crossover: bool,
}

/// Sweeps the density so that the nominal level spacing takes each value
/// `ratio * bandwidth`, recording the fraction of trials with no resonant
/// molecule. Trials whose medium comes out empty count as no-resonance.
pub fn experiment_rarified(
    cfg: &TrialConfig,
    ratios: &[f64],
    trials: u64,
    threads: Option<usize>,
) -> Result<RarifiedReport> {
    if ratios.is_empty() || trials == 0 {
        return Err(invalid("rarified", "need at least one ratio and one trial"));
    }
    let bandwidth = cfg.wavepacket.bandwidth();
    let mut points = Vec::with_capacity(ratios.len());
    for (k, &ratio) in ratios.iter().enumerate() {
        if !(ratio > 0.0) {
            return Err(invalid("delta_over_omega", "ratios must be > 0"));
        }
        let mut c = cfg.clone();
        c.medium_mode = MediumMode::FreshPerTrial;
        c.medium.count_law = CountLaw::Poisson;
        let count = c.medium.spread / (ratio * bandwidth) + 1.0;
        c.medium.density = count / c.medium.volume();
        c.n_trials = trials;
        c.master_seed = cfg.master_seed.wrapping_add(k as u64);
        let engine = TrialEngine::new(c.clone())?;
        let counts: Vec<usize> = with_threads(threads, || {
            (0..trials)
                .into_par_iter()
                .map(|i| match engine.trial_outcome(i) {
                    Ok(o) => Ok(o.candidates),
                    Err(Error::EmptyMedium) => Ok(0),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let zero = counts.iter().filter(|&&n| n == 0).count();
        points.push(RarifiedPoint {
            delta_over_omega: ratio,
            density: c.medium.density,
            trials,
            no_resonance_fraction: zero as f64 / trials as f64,
            mean_multiplicity: counts.iter().sum::<usize>() as f64 / trials as f64,
            predicted_fraction: (-expected_candidates(&c.wavepacket, &c.medium, c.epsilon)).exp(),
        });
    }
    let mut order: Vec<&RarifiedPoint> = points.iter().collect();
    order.sort_by(|a, b| a.delta_over_omega.total_cmp(&b.delta_over_omega));
    let monotone = order
        .windows(2)
        .all(|w| w[1].no_resonance_fraction >= w[0].no_resonance_fraction);
    let above_half_past_crossover = points
        .iter()
        .filter(|p| p.delta_over_omega >= 1.0)
        .all(|p| p.no_resonance_fraction > 0.5);
    Ok(RarifiedReport {
        bandwidth,
        points,
        monotone,
        above_half_past_crossover,
    })
}

/// `density * integral of min(2 epsilon |psi(x)| / S, 1) dx` over a
/// one-dimensional medium with uniform levels.
pub fn expected_candidates(wp: &Wavepacket, medium: &MediumSpec, epsilon: f64) -> f64 {
    const SAMPLES: usize = 2000;
    let half = 0.5 * medium.extent;
    let dx = medium.extent / SAMPLES as f64;
    let integral: f64 = (0..SAMPLES)
        .map(|i| {
            let x = -half + (i as f64 + 0.5) * dx;
            (2.0 * epsilon * wp.psi_at(x).norm() / medium.spread).min(1.0)
        })
        .sum::<f64>()
        * dx;
    medium.expected_count() / medium.extent * integral
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversePoint {
    /// Standard deviation of `|psi|^2` in position.
    pub width: f64,
    pub molecules: f64,
    pub mean_multiplicity: f64,
    pub predicted_multiplicity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseReport {
    pub points: Vec<TransversePoint>,
    /// Width where the measured mean multiplicity first reaches 1
    /// (log-log interpolation between sweep points).
    pub crossover: Option<f64>,
    pub predicted_crossover: f64,
    pub increasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransverseSweep {
    /// Medium extent in units of the packet width.
    pub extent_widths: f64,
    pub trials: u64,
    /// Grid points for each rebuilt packet.
    pub grid_points: usize,
}

/// Rebuilds the Gaussian packet at each width `s` (keeping the carrier
/// wavevector and dispersion), scales the medium extent with it at fixed
/// density, and measures the mean number of resonant candidates.
///
/// In one dimension the expected multiplicity of a Gaussian packet is
/// `2 epsilon rho sqrt(4 pi) (2 pi)^(-1/4) sqrt(s) / S`, giving the closed-form
/// crossover `s* = (S / (2 epsilon rho sqrt(4 pi) (2 pi)^(-1/4)))^2`.
pub fn experiment_transverse_scale(
    cfg: &TrialConfig,
    widths: &[f64],
    sweep: TransverseSweep,
    threads: Option<usize>,
) -> Result<TransverseReport> {
    if cfg.wavepacket.dimension() != 1 {
        return Err(Error::Precondition("transverse sweep runs in one dimension".into()));
    }
    if widths.is_empty() || sweep.trials == 0 {
        return Err(invalid("transverse_scale", "need at least one width and one trial"));
    }
    let k0 = cfg.wavepacket.mean_k();
    let dispersion = cfg.wavepacket.grid().dispersion();
    let shape = (4.0 * PI).sqrt() * (2.0 * PI).powf(-0.25);
    let rho = cfg.medium.density;
    let spread = cfg.medium.spread;
    let predicted = |s: f64| 2.0 * cfg.epsilon * rho * shape * s.sqrt() / spread;
    let predicted_crossover = (spread / (2.0 * cfg.epsilon * rho * shape)).powi(2);

    let mut points = Vec::with_capacity(widths.len());
    for (k, &s) in widths.iter().enumerate() {
        if !(s > 0.0) {
            return Err(invalid("widths", "must be > 0"));
        }
        let sigma_k = 0.5 / s;
        let grid = SpectralGrid::centered(1, k0, 16.0 * sigma_k, sweep.grid_points, dispersion)?;
        let mut c = cfg.clone();
        c.wavepacket = make_gaussian(k0, sigma_k, grid)?;
        c.medium_mode = MediumMode::FreshPerTrial;
        c.medium.extent = sweep.extent_widths * s;
        c.n_trials = sweep.trials;
        c.master_seed = cfg.master_seed.wrapping_add(k as u64);
        let engine = TrialEngine::new(c.clone())?;
        let counts: Vec<usize> = with_threads(threads, || {
            (0..sweep.trials)
                .into_par_iter()
                .map(|i| match engine.trial_outcome(i) {
                    Ok(o) => Ok(o.candidates),
                    Err(Error::EmptyMedium) => Ok(0),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })?;
        points.push(TransversePoint {
            width: s,
            molecules: c.medium.expected_count(),
            mean_multiplicity: counts.iter().sum::<usize>() as f64 / sweep.trials as f64,
            predicted_multiplicity: predicted(s),
        });
    }
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.width.total_cmp(&b.width));
    let increasing = sorted
        .windows(2)
        .all(|w| w[1].mean_multiplicity > w[0].mean_multiplicity);
    let crossover = sorted.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.mean_multiplicity < 1.0 && b.mean_multiplicity >= 1.0 && a.mean_multiplicity > 0.0).then(|| {
            let (la, lb) = (a.mean_multiplicity.ln(), b.mean_multiplicity.ln());
            let t = -la / (lb - la);
            (a.width.ln() + t * (b.width.ln() - a.width.ln())).exp()
        })
    });
    Ok(TransverseReport {
        points,
        crossover,
        predicted_crossover,
        increasing,
    })
}
