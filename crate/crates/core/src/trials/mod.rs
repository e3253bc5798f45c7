//! Monte Carlo detection engine.
//!
//! One trial draws a carrier frequency from the packet spectrum, collects the
//! molecules whose detuning lies inside their resonance window
//! `epsilon |psi(r_n)|`, selects the closest in frequency, and lets it fire
//! with the window-survival probability at its detection timescale.
//!
//! Each trial draws from its own random stream keyed by
//! `(master_seed, trial_index)`, so ensembles are reproducible regardless of
//! thread count.

mod experiments;
mod histogram;

pub use experiments::*;
pub use histogram::*;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dephasing::{simulate_walk, window_probability, DiffusionParams, WalkParams};
use crate::error::{invalid, require_positive, Error, Result};
use crate::medium::{resonant_candidates, sample_medium, Medium, MediumSpec};
use crate::rng::{substream, MEDIUM_STREAM};
use crate::wavepacket::{Position, Wavepacket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    /// Fire with the closed-form window probability.
    #[default]
    ClosedForm,
    /// Fire if a simulated dephasing walk stays in the window.
    Walk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumMode {
    #[default]
    FreshPerTrial,
    Frozen,
}

/// Shifts the resonant frequency of every molecule whose first coordinate
/// exceeds `threshold` by `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBias {
    pub threshold: f64,
    pub offset: f64,
}

impl SpectralBias {
    pub fn offset_at(&self, r: &Position) -> f64 {
        if r[0] > self.threshold {
            self.offset
        } else {
            0.0
        }
    }

    pub fn in_region(&self, r: &Position) -> bool {
        r[0] > self.threshold
    }

    pub fn apply(&self, medium: &mut Medium) {
        for m in &mut medium.molecules {
            m.omega += self.offset_at(&m.position);
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub wavepacket: Wavepacket,
    pub medium: MediumSpec,
    pub epsilon: f64,
    pub gamma: f64,
    pub diffusion: DiffusionParams,
    pub walk: WalkParams,
    pub decision: DecisionMode,
    pub medium_mode: MediumMode,
    pub n_trials: u64,
    pub master_seed: u64,
    /// Seed for the frozen medium.
    pub medium_seed: u64,
    pub bins: usize,
    /// Treat every selected candidate as detected (no dephasing loss).
    pub window_open: bool,
    pub bias: Option<SpectralBias>,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 1 {
            return Err(invalid("n_trials", "must be >= 1"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be finite and >= 0"));
        }
        require_positive("gamma", self.gamma)?;
        self.medium.validate()?;
        self.diffusion.validate()?;
        if self.decision == DecisionMode::Walk {
            self.walk.validate()?;
        }
        if self.medium.dimension != self.wavepacket.dimension() {
            return Err(invalid(
                "medium.dimension",
                format!(
                    "medium is {}-dimensional but the packet is {}-dimensional",
                    self.medium.dimension,
                    self.wavepacket.dimension()
                ),
            ));
        }
        if self.bins < 1 {
            return Err(invalid("bins", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionEvent {
    pub trial: u64,
    pub molecule: usize,
    pub position: Position,
    pub omega_n: f64,
    pub omega_in: f64,
    pub tau_det: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Number of molecules inside their resonance window.
    pub candidates: usize,
    pub event: Option<DetectionEvent>,
}

pub struct TrialEngine {
    cfg: TrialConfig,
    frozen: Option<Medium>,
    psi_bound: f64,
}

impl TrialEngine {
    pub fn new(cfg: TrialConfig) -> Result<Self> {
        cfg.validate()?;
        let frozen = match cfg.medium_mode {
            MediumMode::FreshPerTrial => None,
            MediumMode::Frozen => {
                let mut rng = substream(cfg.medium_seed, MEDIUM_STREAM);
                let mut medium = sample_medium(&cfg.medium, &mut rng)?;
                if let Some(bias) = &cfg.bias {
                    bias.apply(&mut medium);
                }
                Some(medium)
            }
        };
        let psi_bound = cfg.wavepacket.amplitude_bound();
        Ok(Self { cfg, frozen, psi_bound })
    }

    /// Frozen-mode engine over a caller-supplied medium (used as given).
    pub fn with_medium(mut cfg: TrialConfig, medium: Medium) -> Result<Self> {
        cfg.validate()?;
        if medium.is_empty() {
            return Err(Error::EmptyMedium);
        }
        cfg.medium_mode = MediumMode::Frozen;
        let psi_bound = cfg.wavepacket.amplitude_bound();
        Ok(Self {
            cfg,
            frozen: Some(medium),
            psi_bound,
        })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.cfg
    }

    pub fn frozen_medium(&self) -> Option<&Medium> {
        self.frozen.as_ref()
    }

    /// Medium used by trial `index` (the frozen one, or a fresh draw from
    /// the trial's own stream).
    pub fn medium_for_trial(&self, index: u64) -> Result<Medium> {
        match &self.frozen {
            Some(m) => Ok(m.clone()),
            None => self.sample_fresh(&mut substream(self.cfg.master_seed, index)),
        }
    }

    fn sample_fresh<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Medium> {
        let mut medium = sample_medium(&self.cfg.medium, rng)?;
        if let Some(bias) = &self.cfg.bias {
            bias.apply(&mut medium);
        }
        Ok(medium)
    }

    pub fn run_trial(&self, index: u64) -> Result<Option<DetectionEvent>> {
        Ok(self.trial_outcome(index)?.event)
    }

    pub fn trial_outcome(&self, index: u64) -> Result<TrialOutcome> {
        let cfg = &self.cfg;
        let mut rng = substream(cfg.master_seed, index);
        let fresh;
        let medium = match &self.frozen {
            Some(m) => m,
            None => {
                fresh = self.sample_fresh(&mut rng)?;
                &fresh
            }
        };
        let wp = &cfg.wavepacket;
        let omega_in = wp.spectral_sample(&mut rng);

        let eps = cfg.epsilon;
        let reach = eps * self.psi_bound;
        let window = |r: &Position| eps * wp.position_amplitude(r).norm();
        // the bound rules out most molecules before psi is evaluated
        let candidates = resonant_candidates(medium, omega_in, |m| {
            if (omega_in - m.omega).abs() >= reach {
                0.0
            } else {
                window(&m.position)
            }
        });
        let Some(&chosen) = candidates.first() else {
            return Ok(TrialOutcome {
                candidates: 0,
                event: None,
            });
        };
        let molecule = medium.molecules[chosen];
        let coupling = window(&molecule.position);
        let tau_det = cfg.gamma / (coupling * coupling);

        let detected = if cfg.window_open {
            true
        } else {
            match cfg.decision {
                DecisionMode::ClosedForm => {
                    let p = window_probability(tau_det, &cfg.diffusion).value;
                    rng.random::<f64>() < p
                }
                DecisionMode::Walk => simulate_walk(&mut rng, &cfg.walk, &cfg.diffusion, tau_det)?,
            }
        };
        Ok(TrialOutcome {
            candidates: candidates.len(),
            event: detected.then_some(DetectionEvent {
                trial: index,
                molecule: chosen,
                position: molecule.position,
                omega_n: molecule.omega,
                omega_in,
                tau_det,
            }),
        })
    }

    /// Outcomes for trials `0..n`, in trial order.
    pub fn outcomes(&self, n: u64, threads: Option<usize>) -> Result<Vec<TrialOutcome>> {
        let job = || {
            (0..n)
                .into_par_iter()
                .map(|i| self.trial_outcome(i))
                .collect::<Result<Vec<_>>>()
        };
        with_threads(threads, job)
    }
}

pub(crate) fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => job(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            pool.install(job)
        }
    }
}

/// Convenience wrapper building an engine for a single trial.
pub fn run_trial(cfg: &TrialConfig, index: u64) -> Result<Option<DetectionEvent>> {
    TrialEngine::new(cfg.clone())?.run_trial(index)
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub histogram: SpatialHistogram,
    pub events: Vec<DetectionEvent>,
    pub trials: u64,
    /// Sum of candidate counts over trials.
    pub candidate_total: u64,
    pub zero_candidate_trials: u64,
}

impl Ensemble {
    pub fn mean_multiplicity(&self) -> f64 {
        self.candidate_total as f64 / self.trials as f64
    }
}

/// Runs every trial of the engine's configuration and bins the events by
/// first coordinate. Three-dimensional runs bin over the medium extent.
pub fn run_ensemble(engine: &TrialEngine, threads: Option<usize>) -> Result<Ensemble> {
    let cfg = engine.config();
    let outcomes = engine.outcomes(cfg.n_trials, threads)?;
    let mut histogram = if cfg.wavepacket.dimension() == 1 {
        SpatialHistogram::for_packet(&cfg.wavepacket, cfg.bins, cfg.n_trials)?
    } else {
        let half = 0.5 * cfg.medium.extent;
        SpatialHistogram::with_range(&cfg.wavepacket, -half, half, cfg.bins, cfg.n_trials)?
    };
    let events: Vec<DetectionEvent> = outcomes.iter().filter_map(|o| o.event).collect();
    for e in &events {
        histogram.record(e.position[0]);
    }
    Ok(Ensemble {
        histogram,
        events,
        trials: cfg.n_trials,
        candidate_total: outcomes.iter().map(|o| o.candidates as u64).sum(),
        zero_candidate_trials: outcomes.iter().filter(|o| o.candidates == 0).count() as u64,
    })
}
