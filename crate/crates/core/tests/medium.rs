use quasidetect::medium::{
    mean_level_spacing, resonant_candidates, sample_medium, CountLaw, FrequencyLaw, Medium, MediumSpec,
};
use quasidetect::rng::substream;
use rand::Rng;

fn spec(density: f64, extent: f64, spread: f64, count: CountLaw) -> MediumSpec {
    MediumSpec {
        dimension: 1,
        density,
        extent,
        omega_center: 0.0,
        spread,
        frequency_law: FrequencyLaw::Uniform,
        count_law: count,
    }
}

#[test]
fn poisson_count_within_four_sigma() {
    let s = spec(1e4, 1.0, 1.0, CountLaw::Poisson);
    for seed in 0..5 {
        let m = sample_medium(&s, &mut substream(seed, 0)).unwrap();
        assert!((m.len() as f64 - 1e4).abs() <= 400.0, "{}", m.len());
    }
}

#[test]
fn fixed_count_any_seed() {
    for seed in 0..20 {
        let m = sample_medium(&spec(1.0, 1.0, 1.0, CountLaw::Fixed(5)), &mut substream(seed, 7)).unwrap();
        assert_eq!(m.len(), 5);
    }
}

#[test]
fn uniform_frequencies_within_spread() {
    let mut s = spec(1.0, 1.0, 2.0, CountLaw::Fixed(100_000));
    s.omega_center = 3.0;
    let m = sample_medium(&s, &mut substream(1, 1)).unwrap();
    assert!(m.molecules.iter().all(|x| x.omega >= 2.0 && x.omega <= 4.0));
}

#[test]
fn candidate_count_is_binomial() {
    let (n, spread, w) = (10_000usize, 1.0, 0.01);
    let s = spec(1.0, 1.0, spread, CountLaw::Fixed(n));
    let p = (2.0 * w / spread).min(1.0);
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    let mut rng = substream(4, 4);
    for seed in 0..10 {
        let m = sample_medium(&s, &mut substream(seed, 2)).unwrap();
        // keep omega_in far enough from the edges that the window is not truncated
        let omega_in = rng.random_range(-0.4..0.4);
        let got = resonant_candidates(&m, omega_in, |_| w).len() as f64;
        assert!((got - n as f64 * p).abs() <= 4.0 * sd, "{got}");
    }
}

#[test]
fn level_spacing_order_statistics() {
    let s = spec(1.0, 1.0, 1.0, CountLaw::Fixed(100_000));
    let m = sample_medium(&s, &mut substream(2, 2)).unwrap();
    let d = mean_level_spacing(&m).unwrap();
    assert!((d / 1e-5 - 1.0).abs() < 0.02, "{d}");
}

#[test]
fn empty_medium_is_an_error() {
    let s = spec(1e-9, 1.0, 1.0, CountLaw::Poisson);
    assert!(sample_medium(&s, &mut substream(0, 0)).is_err());
    assert!(Medium::new(vec![]).is_empty());
}
