//! JSON run configuration. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use quasidetect::dephasing::{DiffusionParams, DiffusionVariant, StepLaw, WalkParams, WindowSemantics};
use quasidetect::medium::{CountLaw, FrequencyLaw, MediumSpec};
use quasidetect::trials::{DecisionMode, MediumMode, TrialConfig};
use quasidetect::twolevel::RegimeMargins;
use quasidetect::wavepacket::{make_gaussian, Dispersion, SpectralGrid, Wavepacket};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub wavepacket: WavepacketConfig,
    pub medium: MediumConfig,
    pub dynamics: DynamicsConfig,
    pub dephasing: DephasingConfig,
    pub trials: TrialsConfig,
    pub experiments: ExperimentsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            output_dir: PathBuf::from("out"),
            wavepacket: WavepacketConfig::default(),
            medium: MediumConfig::default(),
            dynamics: DynamicsConfig::default(),
            dephasing: DephasingConfig::default(),
            trials: TrialsConfig::default(),
            experiments: ExperimentsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavepacketConfig {
    pub dimension: usize,
    /// Carrier wavevector.
    pub k0: f64,
    /// Standard deviation of `|phi|^2` in k.
    pub sigma_k: f64,
    /// Grid points per axis.
    pub grid_points: usize,
    /// Full width of the k grid, centred on `k0`.
    pub grid_span: f64,
    pub dispersion: Dispersion,
}

impl Default for WavepacketConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            k0: 10.0,
            sigma_k: 0.5,
            grid_points: 128,
            grid_span: 8.0,
            dispersion: Dispersion::Linear(1.0),
        }
    }
}

impl WavepacketConfig {
    pub fn build(&self) -> Result<Wavepacket> {
        let grid = SpectralGrid::centered(
            self.dimension,
            self.k0,
            self.grid_span,
            self.grid_points,
            self.dispersion,
        )
        .context("wavepacket grid")?;
        make_gaussian(self.k0, self.sigma_k, grid).context("wavepacket")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumConfig {
    pub density: f64,
    /// Edge of the cubic region, centred on the origin.
    pub extent: f64,
    /// Centre of the frequency distribution; defaults to the packet carrier.
    pub omega_center: Option<f64>,
    pub spread: f64,
    pub frequency_law: FrequencyLaw,
    pub count_law: CountLaw,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            density: 100.0,
            extent: 8.0,
            omega_center: None,
            spread: 10.0,
            frequency_law: FrequencyLaw::Uniform,
            count_law: CountLaw::Poisson,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub margins: RegimeMargins,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.003,
            gamma: 1.0,
            margins: RegimeMargins::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DephasingConfig {
    pub g: f64,
    /// Detection window; defaults to `gamma`.
    #[serde(rename = "G")]
    pub window: Option<f64>,
    pub diffusion_variant: DiffusionVariant,
    pub window_semantics: WindowSemantics,
    pub walk_dt: f64,
    pub walk_step_law: StepLaw,
    pub walk_max_steps: usize,
}

impl Default for DephasingConfig {
    fn default() -> Self {
        Self {
            g: 1e-5,
            window: None,
            diffusion_variant: DiffusionVariant::Normalized,
            window_semantics: WindowSemantics::AtTime,
            walk_dt: 100.0,
            walk_step_law: StepLaw::Gaussian,
            walk_max_steps: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialsConfig {
    pub n_trials: u64,
    pub decision_mode: DecisionMode,
    pub medium_mode: MediumMode,
    pub bins: usize,
    pub medium_seed: u64,
}

impl Default for TrialsConfig {
    fn default() -> Self {
        Self {
            n_trials: 1_000_000,
            decision_mode: DecisionMode::ClosedForm,
            medium_mode: MediumMode::FreshPerTrial,
            bins: 64,
            medium_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentsConfig {
    pub spectral_bias: SpectralBiasPreset,
    pub rarified: RarifiedPreset,
    pub transverse_scale: TransversePreset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralBiasPreset {
    /// Molecules with first coordinate above this are shifted.
    pub threshold: f64,
    /// Shift in units of the packet bandwidth.
    pub offset_bandwidths: f64,
}

impl Default for SpectralBiasPreset {
    fn default() -> Self {
        Self {
            threshold: 0.0,
            offset_bandwidths: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RarifiedPreset {
    /// Nominal level spacing in units of the bandwidth.
    pub ratios: Vec<f64>,
    pub trials: u64,
    /// Sets epsilon so the peak resonance window is this fraction of the
    /// bandwidth.
    pub peak_window_bandwidths: f64,
}

impl Default for RarifiedPreset {
    fn default() -> Self {
        Self {
            ratios: vec![0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0],
            trials: 20_000,
            peak_window_bandwidths: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransversePreset {
    /// Position widths (standard deviation of `|psi|^2`) to sweep.
    pub widths: Vec<f64>,
    pub trials: u64,
    /// Medium extent in units of the width.
    pub extent_widths: f64,
    pub grid_points: usize,
    pub density: f64,
    pub spread: f64,
    pub epsilon: f64,
}

impl Default for TransversePreset {
    fn default() -> Self {
        Self {
            widths: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            trials: 4_000,
            extent_widths: 10.0,
            grid_points: 128,
            density: 10.0,
            spread: 40.0,
            epsilon: 0.4465,
        }
    }
}

/// Command-line overrides applied after loading.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(n) = overrides.trials {
        cfg.trials.n_trials = n;
    }
    if let Some(out) = &overrides.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

/// A configuration with defaults filled in and the engine inputs built.
pub struct Resolved {
    pub config: RunConfig,
    pub trial: TrialConfig,
}

pub fn resolve(mut cfg: RunConfig) -> Result<Resolved> {
    let wavepacket = cfg.wavepacket.build()?;
    let omega_center = *cfg.medium.omega_center.get_or_insert(wavepacket.carrier());
    let window = *cfg.dephasing.window.get_or_insert(cfg.dynamics.gamma);
    cfg.dynamics.margins.validate().context("dynamics.margins")?;
    if cfg.experiments.rarified.ratios.iter().any(|&r| r.is_nan() || r <= 0.0) {
        bail!("experiments.rarified.ratios: every ratio must be > 0");
    }
    if cfg
        .experiments
        .transverse_scale
        .widths
        .iter()
        .any(|&w| w.is_nan() || w <= 0.0)
    {
        bail!("experiments.transverse_scale.widths: every width must be > 0");
    }
    let trial = TrialConfig {
        wavepacket,
        medium: MediumSpec {
            dimension: cfg.wavepacket.dimension,
            density: cfg.medium.density,
            extent: cfg.medium.extent,
            omega_center,
            spread: cfg.medium.spread,
            frequency_law: cfg.medium.frequency_law,
            count_law: cfg.medium.count_law,
        },
        epsilon: cfg.dynamics.epsilon,
        gamma: cfg.dynamics.gamma,
        diffusion: DiffusionParams {
            g: cfg.dephasing.g,
            window,
            variant: cfg.dephasing.diffusion_variant,
            semantics: cfg.dephasing.window_semantics,
        },
        walk: WalkParams {
            dt: cfg.dephasing.walk_dt,
            step_law: cfg.dephasing.walk_step_law,
            max_steps: cfg.dephasing.walk_max_steps,
        },
        decision: cfg.trials.decision_mode,
        medium_mode: cfg.trials.medium_mode,
        n_trials: cfg.trials.n_trials,
        master_seed: cfg.seed,
        medium_seed: cfg.trials.medium_seed,
        bins: cfg.trials.bins,
        window_open: false,
        bias: None,
    };
    trial.validate().context("configuration")?;
    Ok(Resolved { config: cfg, trial })
}
