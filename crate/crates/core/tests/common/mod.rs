#![allow(dead_code)]

use quasidetect::dephasing::{DiffusionParams, DiffusionVariant, StepLaw, WalkParams, WindowSemantics};
use quasidetect::medium::{CountLaw, FrequencyLaw, MediumSpec};
use quasidetect::trials::{DecisionMode, MediumMode, TrialConfig};
use quasidetect::wavepacket::{make_gaussian, Dispersion, SpectralGrid, Wavepacket};

pub fn packet(width: f64) -> Wavepacket {
    let sigma_k = 0.5 / width;
    let grid = SpectralGrid::centered(1, 10.0, 16.0 * sigma_k, 128, Dispersion::Linear(1.0)).unwrap();
    make_gaussian(10.0, sigma_k, grid).unwrap()
}

/// One-dimensional Gaussian packet with unit bandwidth and unit position
/// spread in a sparse uniform medium.
pub fn base_config() -> TrialConfig {
    TrialConfig {
        wavepacket: packet(1.0),
        medium: MediumSpec {
            dimension: 1,
            density: 100.0,
            extent: 8.0,
            omega_center: 10.0,
            spread: 10.0,
            frequency_law: FrequencyLaw::Uniform,
            count_law: CountLaw::Poisson,
        },
        epsilon: 0.003,
        gamma: 1.0,
        diffusion: DiffusionParams {
            g: 1e-5,
            window: 1.0,
            variant: DiffusionVariant::Normalized,
            semantics: WindowSemantics::AtTime,
        },
        walk: WalkParams {
            dt: 100.0,
            step_law: StepLaw::Gaussian,
            max_steps: 4096,
        },
        decision: DecisionMode::ClosedForm,
        medium_mode: MediumMode::FreshPerTrial,
        n_trials: 100_000,
        master_seed: 1,
        medium_seed: 1,
        bins: 64,
        window_open: false,
        bias: None,
    }
}
