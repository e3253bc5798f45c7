//! Fluctuation-driven dephasing: the excited level random-walks in frequency
//! and detection proceeds only while it stays inside a window of width `G`
//! around its starting point.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::probability::Probability;
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionVariant {
    /// Gaussian with variance `g tau`.
    #[default]
    Normalized,
    /// `(2 pi g tau)^{-1/2} exp(-x^2 / (2 pi g tau))`, variance `pi g tau`,
    /// integrating to `sqrt(pi)`.
    AsWritten,
}

impl DiffusionVariant {
    /// Variance growth rate of the walk, `v` in `Var[x(tau)] = v tau`.
    pub fn variance_rate(&self, g: f64) -> f64 {
        match self {
            DiffusionVariant::Normalized => g,
            DiffusionVariant::AsWritten => PI * g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSemantics {
    /// Inside the window at the final time.
    #[default]
    AtTime,
    /// Inside the window at every step.
    Throughout,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    /// Diffusion strength (frequency^2 / time).
    pub g: f64,
    /// Detection window width `G`.
    pub window: f64,
    pub variant: DiffusionVariant,
    pub semantics: WindowSemantics,
}

impl DiffusionParams {
    pub fn new(g: f64, window: f64) -> Result<Self> {
        let p = Self {
            g,
            window,
            variant: DiffusionVariant::default(),
            semantics: WindowSemantics::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("g", self.g)?;
        if !(self.window >= 0.0 && self.window.is_finite()) {
            return Err(invalid("G", format!("must be finite and >= 0, got {}", self.window)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepLaw {
    #[default]
    Gaussian,
    PlusMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    /// Requested time step; the walk uses `tau / n` with `n` steps.
    pub dt: f64,
    pub step_law: StepLaw,
    /// Upper bound on steps per walk. When `tau / dt` exceeds it the step is
    /// lengthened to `tau / max_steps`.
    pub max_steps: usize,
}

impl WalkParams {
    pub const MIN_STEPS: usize = 100;

    pub fn validate(&self) -> Result<()> {
        require_positive("walk_dt", self.dt)?;
        if self.max_steps < Self::MIN_STEPS {
            return Err(invalid("walk_max_steps", format!("must be >= {}", Self::MIN_STEPS)));
        }
        Ok(())
    }

    /// Step count used for a walk of duration `tau`.
    pub fn steps_for(&self, tau: f64) -> Result<usize> {
        self.validate()?;
        require_positive("tau", tau)?;
        let ratio = tau / self.dt;
        if ratio < Self::MIN_STEPS as f64 {
            return Err(Error::Precondition(format!(
                "tau/dt = {ratio} < {} (diffusion limit not reached)",
                Self::MIN_STEPS
            )));
        }
        Ok((ratio.ceil() as usize).min(self.max_steps))
    }
}

/// Occupancy density of the frequency offset after time `tau`.
pub fn occupancy_pdf(delta_omega: f64, tau: f64, p: &DiffusionParams) -> f64 {
    let s = 2.0 * PI * p.g * tau;
    match p.variant {
        DiffusionVariant::AsWritten => (-delta_omega * delta_omega / s).exp() / s.sqrt(),
        DiffusionVariant::Normalized => {
            let var = p.g * tau;
            (-delta_omega * delta_omega / (2.0 * var)).exp() / s.sqrt()
        }
    }
}

/// `min(G / sqrt(2 pi g tau), 1)`
pub fn window_probability(tau: f64, p: &DiffusionParams) -> Probability {
    Probability::clamp(p.window / (2.0 * PI * p.g * tau).sqrt())
}

/// Window probability at the detection time `tau = gamma/|c|^2` with the
/// window set to `G = gamma`: `min(|c| sqrt(gamma / (2 pi g)), 1)`.
pub fn p_window_at_detection(coupling_mag: f64, gamma: f64, g: f64) -> Probability {
    Probability::clamp(coupling_mag * (gamma / (2.0 * PI * g)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOutcome {
    /// Frequency offset at the final time.
    pub offset: f64,
    /// Offset stayed strictly inside the half-window at every step.
    pub stayed_inside: bool,
    pub steps: usize,
}

impl WalkOutcome {
    pub fn detected(&self, p: &DiffusionParams) -> bool {
        match p.semantics {
            WindowSemantics::AtTime => self.offset.abs() < 0.5 * p.window,
            WindowSemantics::Throughout => self.stayed_inside,
        }
    }
}

/// Walks the offset from zero over duration `tau`.
pub fn walk_outcome<R: Rng + ?Sized>(
    rng: &mut R,
    walk: &WalkParams,
    p: &DiffusionParams,
    tau: f64,
) -> Result<WalkOutcome> {
    let steps = walk.steps_for(tau)?;
    let sigma = (p.variant.variance_rate(p.g) * tau / steps as f64).sqrt();
    let half = 0.5 * p.window;
    let mut x = 0.0f64;
    let mut inside = 0.0 < half;
    for _ in 0..steps {
        let z: f64 = match walk.step_law {
            StepLaw::Gaussian => StandardNormal.sample(rng),
            StepLaw::PlusMinus => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        x += sigma * z;
        inside &= x.abs() < half;
    }
    Ok(WalkOutcome {
        offset: x,
        stayed_inside: inside,
        steps,
    })
}

/// Whether the walk ends (or stays, under `throughout`) inside the window.
pub fn simulate_walk<R: Rng + ?Sized>(rng: &mut R, walk: &WalkParams, p: &DiffusionParams, tau: f64) -> Result<bool> {
    Ok(walk_outcome(rng, walk, p, tau)?.detected(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkEnsemble {
    pub walkers: usize,
    pub detected_at_time: usize,
    pub detected_throughout: usize,
    pub offset_mean: f64,
    pub offset_variance: f64,
}

impl WalkEnsemble {
    pub fn rate(&self, semantics: WindowSemantics) -> f64 {
        let hits = match semantics {
            WindowSemantics::AtTime => self.detected_at_time,
            WindowSemantics::Throughout => self.detected_throughout,
        };
        hits as f64 / self.walkers as f64
    }
}

/// Runs `walkers` independent walks in parallel, walker `i` drawing from
/// stream `(seed, i)`.
pub fn walk_ensemble(
    seed: u64,
    walkers: usize,
    walk: &WalkParams,
    p: &DiffusionParams,
    tau: f64,
) -> Result<WalkEnsemble> {
    walk.steps_for(tau)?;
    let outcomes: Vec<WalkOutcome> = (0..walkers)
        .into_par_iter()
        .map(|i| walk_outcome(&mut substream(seed, i as u64), walk, p, tau))
        .collect::<Result<_>>()?;
    let n = walkers as f64;
    let mean = outcomes.iter().map(|o| o.offset).sum::<f64>() / n;
    let var = outcomes.iter().map(|o| (o.offset - mean).powi(2)).sum::<f64>() / n;
    let half = 0.5 * p.window;
    Ok(WalkEnsemble {
        walkers,
        detected_at_time: outcomes.iter().filter(|o| o.offset.abs() < half).count(),
        detected_throughout: outcomes.iter().filter(|o| o.stayed_inside).count(),
        offset_mean: mean,
        offset_variance: var,
    })
}
