use num_complex::Complex64;
use quasidetect::medium::{sample_medium, CountLaw, FrequencyLaw, Medium, MediumSpec, Molecule};
use quasidetect::rng::substream;
use quasidetect::twolevel::{
    detection_timescale, exact_eigen, exact_eigen_shifted, integrate_full, seesaw_approx, seesaw_shifted,
    EffectivePair, IntegrationBudget, RegimeMargins,
};
use quasidetect::wavepacket::{make_gaussian, Dispersion, SpectralGrid, Wavepacket};
use rayon::prelude::*;

/// Small eigenvalue at resonance, `i gamma sum_n C_n x^{2(n+1)}` with
/// `x = |c|/gamma` and Catalan numbers `C_n`; converges for `x < 1/2`.
fn catalan_small(c: f64, gamma: f64) -> f64 {
    let x2 = (c / gamma).powi(2);
    let (mut catalan, mut term, mut sum) = (1.0f64, x2, 0.0);
    for n in 0..200u32 {
        sum += catalan * term;
        let n = n as f64;
        catalan *= 2.0 * (2.0 * n + 1.0) / (n + 2.0);
        term *= x2;
        if catalan * term < 1e-30 * sum {
            break;
        }
    }
    gamma * sum
}

fn on_resonance(c: f64, gamma: f64) -> EffectivePair {
    EffectivePair::new(0.0, 0.0, Complex64::new(c, 0.0), gamma).unwrap()
}

#[test]
fn exact_small_eigenvalue_matches_series() {
    for i in 0..=30 {
        let x = 10f64.powf(-6.0 + 5.0 * i as f64 / 30.0) * 0.3;
        let (_, small) = exact_eigen_shifted(&on_resonance(x, 1.0));
        let want = catalan_small(x, 1.0);
        assert!(small.re.abs() <= 1e-15 * want.max(1e-300) + 1e-300, "{small}");
        assert!((small.im / want - 1.0).abs() < 1e-12, "x={x} {} vs {want}", small.im);
    }
}

#[test]
fn published_example_eigenvalues() {
    let (big, small) = exact_eigen(&on_resonance(1e-3, 1.0));
    assert!((big.im - (1.0 - 1e-6)).abs() < 1e-9 && big.re.abs() < 1e-15);
    assert!((small.im - 1.000001e-6).abs() < 1e-15);
    let (_, seesaw) = seesaw_shifted(&on_resonance(1e-3, 1.0));
    assert!((seesaw.im - small.im).abs() / small.im < 1e-5);
}

#[test]
fn seesaw_error_within_quadratic_bound() {
    let margins = RegimeMargins::default();
    for i in 0..=60 {
        let ratio = 10f64.powf(-5.0 + 3.0 * i as f64 / 60.0);
        let gamma = 2.5;
        let pair = EffectivePair::new(7.0, 7.0, Complex64::from_polar(ratio * gamma, 0.7), gamma).unwrap();
        let (_, exact) = exact_eigen(&pair);
        let (_, approx) = seesaw_approx(&pair, &margins).unwrap();
        let rel = (approx - exact).norm() / (exact - pair.omega_n).norm();
        // absolute eigenvalues carry omega_n = 7; compare in the shifted frame too
        let (_, exact_s) = exact_eigen_shifted(&pair);
        let (_, approx_s) = seesaw_shifted(&pair);
        let rel_s = (approx_s - exact_s).norm() / exact_s.norm();
        assert!(rel_s <= 10.0 * ratio * ratio, "ratio={ratio} rel={rel_s}");
        assert!(rel <= 10.0 * ratio * ratio + 1e-6, "ratio={ratio} rel={rel}");
    }
}

#[test]
fn timescale_is_inverse_small_eigenvalue() {
    let pair = on_resonance(1e-3, 1.0);
    assert!((detection_timescale(&pair).unwrap() - 1e6).abs() < 1e-6);
    let (_, small) = seesaw_shifted(&pair);
    assert!((detection_timescale(&pair).unwrap() * small.im - 1.0).abs() < 1e-12);
}

fn flat_packet(sigma_k: f64) -> Wavepacket {
    let grid = SpectralGrid::centered(1, 10.0, 12.0 * sigma_k, 64, Dispersion::Linear(1.0)).unwrap();
    make_gaussian(10.0, sigma_k, grid).unwrap()
}

#[test]
fn rabi_oscillation() {
    let wp = flat_packet(0.05);
    let eps = 0.01;
    let r = [0.4, 0.0, 0.0];
    let c = eps * wp.position_amplitude(&r).norm();
    let medium = Medium::new(vec![Molecule {
        position: r,
        omega: wp.carrier(),
    }]);
    for t in [0.3 / c, 1.0 / c, 2.2 / c, 5.0 / c] {
        let d = integrate_full(&wp, &medium, eps, 0.0, t, IntegrationBudget::default()).unwrap();
        let want = (c * t).sin().powi(2);
        assert!(
            (d.excited[0] - want).abs() < 1e-6,
            "t={t} got={} want={want}",
            d.excited[0]
        );
        assert!((d.in_population - (1.0 - want)).abs() < 1e-6);
    }
}

#[test]
fn closest_molecule_is_brightest() {
    let wp = flat_packet(0.01);
    let peak = wp.psi_at(0.0).norm();
    let c_target = 1e-4;
    let eps = c_target / peak;
    let gamma = 1e-3;
    let spec = MediumSpec {
        dimension: 1,
        density: 50.0,
        extent: 2.0,
        omega_center: wp.carrier(),
        spread: 1.0,
        frequency_law: FrequencyLaw::Uniform,
        count_law: CountLaw::Fixed(100),
    };
    let t = 3.0 / c_target;
    let wins: usize = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let medium = sample_medium(&spec, &mut substream(seed, 0)).unwrap();
            let closest = medium
                .molecules
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1.omega - wp.carrier())
                        .abs()
                        .total_cmp(&(b.1.omega - wp.carrier()).abs())
                })
                .unwrap()
                .0;
            let d = integrate_full(&wp, &medium, eps, gamma, t, IntegrationBudget::default()).unwrap();
            usize::from(d.brightest() == Some(closest))
        })
        .sum();
    assert!(wins >= 95, "{wins}/100");
}
