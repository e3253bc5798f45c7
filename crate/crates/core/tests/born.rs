use quasidetect::born::{efficiency_factorization, p_detection, p_detection_by_parts, p_resonance, BornParams};
use quasidetect::rng::substream;
use rand::Rng;

#[test]
fn detection_equals_product_of_parts() {
    let mut rng = substream(77, 0);
    for _ in 0..1000 {
        let eps = 10f64.powf(rng.random_range(-4.0..1.0));
        let psi = 10f64.powf(rng.random_range(-4.0..1.0));
        let gamma = 10f64.powf(rng.random_range(-3.0..2.0));
        let g = 10f64.powf(rng.random_range(-6.0..1.0));
        let bw = 10f64.powf(rng.random_range(-2.0..2.0));
        let whole = p_detection(eps, psi, gamma, g, bw).unclamped;
        let parts = p_detection_by_parts(eps, psi, gamma, g, bw);
        assert!((whole - parts).abs() <= 1e-12 * whole.abs(), "{whole} vs {parts}");
    }
}

#[test]
fn factorization_reproduces_detection() {
    let mut rng = substream(78, 0);
    for _ in 0..1000 {
        let params = BornParams {
            epsilon: rng.random_range(0.01..2.0),
            gamma: rng.random_range(0.1..10.0),
            g: rng.random_range(1e-4..1.0),
            omega_bw: rng.random_range(0.1..5.0),
            omega_in: rng.random_range(1.0..100.0),
        };
        let psi = rng.random_range(1e-3..1.0);
        let f = efficiency_factorization(&params, psi).unwrap();
        let want = p_detection(params.epsilon, psi, params.gamma, params.g, params.omega_bw).unclamped;
        assert!((f.product() - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn resonance_matches_uniform_overlap_sampling() {
    // omega_in and omega_n independent and uniform over a band of width Omega;
    // a hit is |omega_in - omega_n| < w. Away from the band edges the rate is 2w/Omega.
    let (omega, w) = (1.0, 1e-3);
    let n = 1_000_000;
    let mut rng = substream(12, 0);
    let mut hits = 0u64;
    for _ in 0..n {
        let a: f64 = rng.random_range(0.0..omega);
        let b: f64 = rng.random_range(0.0..omega);
        hits += u64::from((a - b).abs() < w);
    }
    // exact overlap including edge loss: 2w/Omega - (w/Omega)^2
    let exact = 2.0 * w / omega - (w / omega).powi(2);
    let p = p_resonance(1.0, w, omega).value;
    assert!((p - exact).abs() < 1e-5);
    let se = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!((hits as f64 / n as f64 - p).abs() < 4.0 * se);
}
