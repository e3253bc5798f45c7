mod common;

use num_complex::Complex64;
use quasidetect::trials::{
    experiment_dissipation_free, experiment_rarified, experiment_spectral_bias, experiment_transverse_scale,
    run_ensemble, SpectralBias, TransverseSweep, TrialEngine,
};
use quasidetect::wavepacket::Wavepacket;

use common::base_config;

#[test]
fn dissipation_free_prefers_amplitude() {
    let mut cfg = base_config();
    cfg.n_trials = 200_000;
    let report = experiment_dissipation_free(&cfg, None).unwrap();
    assert!(
        report.amplitude_preferred,
        "{} vs {}",
        report.fit_amplitude.r_squared, report.fit_density.r_squared
    );
    assert!(report.fit_amplitude.r_squared > 0.95);
}

#[test]
fn dissipation_free_zero_packet_is_empty() {
    let mut cfg = base_config();
    cfg.window_open = true;
    let grid = cfg.wavepacket.grid().clone();
    let n = grid.mode_count();
    cfg.wavepacket = Wavepacket::from_raw(grid, vec![Complex64::new(0.0, 0.0); n]).unwrap();
    let engine = TrialEngine::new(cfg).unwrap();
    assert!(engine.outcomes(5_000, None).unwrap().iter().all(|o| o.event.is_none()));
}

#[test]
fn spectral_bias_empties_region() {
    let mut cfg = base_config();
    cfg.n_trials = 100_000;
    let omega = cfg.wavepacket.bandwidth();
    let bias = SpectralBias {
        threshold: 0.0,
        offset: 10.0 * omega,
    };
    let report = experiment_spectral_bias(&cfg, bias, None).unwrap();
    assert_eq!(report.biased_region_detections, 0);
    assert!(report.unbiased_region_detections > 100);
}

#[test]
fn zero_bias_is_baseline() {
    let mut cfg = base_config();
    cfg.n_trials = 20_000;
    let base = run_ensemble(&TrialEngine::new(cfg.clone()).unwrap(), None).unwrap();
    let report = experiment_spectral_bias(
        &cfg,
        SpectralBias {
            threshold: 0.0,
            offset: 0.0,
        },
        None,
    )
    .unwrap();
    assert_eq!(report.histogram, base.histogram);
}

#[test]
fn small_bias_keeps_counts() {
    let mut cfg = base_config();
    cfg.n_trials = 50_000;
    let omega = cfg.wavepacket.bandwidth();
    let report = experiment_spectral_bias(
        &cfg,
        SpectralBias {
            threshold: 0.0,
            offset: 0.1 * omega,
        },
        None,
    )
    .unwrap();
    let ratio = report.biased_region_detections as f64 / report.unbiased_region_detections as f64;
    assert!(ratio > 0.7 && ratio < 1.3, "{ratio}");
}

pub fn rarified_config() -> quasidetect::trials::TrialConfig {
    let mut cfg = base_config();
    // peak window half the bandwidth
    cfg.epsilon = 0.5 * cfg.wavepacket.bandwidth() / cfg.wavepacket.psi_at(0.0).norm();
    cfg
}

#[test]
fn rarified_sweep() {
    let cfg = rarified_config();
    let ratios = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0];
    let report = experiment_rarified(&cfg, &ratios, 20_000, None).unwrap();
    assert!(report.monotone);
    assert!(report.above_half_past_crossover);
    let first = &report.points[0];
    assert!(first.no_resonance_fraction < 0.01, "{}", first.no_resonance_fraction);
    let last = report.points.last().unwrap();
    assert!(last.no_resonance_fraction > 0.9, "{}", last.no_resonance_fraction);
    for p in &report.points {
        let se = (p.predicted_fraction * (1.0 - p.predicted_fraction) / p.trials as f64).sqrt();
        assert!(
            (p.no_resonance_fraction - p.predicted_fraction).abs() < 4.0 * se + 1e-3,
            "{p:?}"
        );
    }
}

#[test]
fn transverse_crossover() {
    let mut cfg = base_config();
    cfg.medium.density = 10.0;
    cfg.medium.spread = 40.0;
    cfg.epsilon = 0.4465;
    let widths = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let sweep = TransverseSweep {
        extent_widths: 10.0,
        trials: 4_000,
        grid_points: 128,
    };
    let report = experiment_transverse_scale(&cfg, &widths, sweep, None).unwrap();
    assert!(report.increasing);
    assert!(report.points[0].mean_multiplicity <= 1.0);
    let s = report.crossover.expect("crossover inside sweep");
    let ratio = s / report.predicted_crossover;
    assert!(
        ratio > 1.0 / 3.0 && ratio < 3.0,
        "crossover {s} vs {}",
        report.predicted_crossover
    );
}
