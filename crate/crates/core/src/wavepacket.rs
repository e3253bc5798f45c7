//! Incoming projectile wavepacket on a discrete momentum grid.
//!
//! Amplitudes `phi_j` live on a uniform wavevector grid with spacing `dk` and
//! are normalized so that `sum |phi_j|^2 dk^d = 1`. The position-space
//! amplitude is the conjugate Fourier sum
//!
//! ```text
//! psi(r) = (2 pi)^{-d/2} dk^d  sum_j exp(-i k_j . r) phi_j
//! ```
//!
//! which is unitary on the dual grid `dr = 2 pi / (n dk)` and periodic with
//! the box extent `L = 2 pi / dk`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};

/// A point in space. One-dimensional runs use only the first component.
pub type Position = [f64; 3];

/// Maps a wavevector magnitude to an angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// `omega = c |k|`
    Linear(f64),
    /// `omega = |k|^2 / (2 m)` with hbar = 1
    Quadratic(f64),
}

impl Dispersion {
    pub fn omega(&self, k_mag: f64) -> f64 {
        match *self {
            Dispersion::Linear(c) => c * k_mag,
            Dispersion::Quadratic(m) => k_mag * k_mag / (2.0 * m),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Dispersion::Linear(c) => require_positive("dispersion.linear", c),
            Dispersion::Quadratic(m) => require_positive("dispersion.quadratic", m),
        }
    }
}

/// Uniform wavevector grid. In three dimensions the first axis uses
/// `k_samples` directly and the two transverse axes use the same samples
/// shifted to be centred on zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    dimension: usize,
    k_samples: Vec<f64>,
    dk: f64,
    dispersion: Dispersion,
}

impl SpectralGrid {
    pub fn new(dimension: usize, k_samples: Vec<f64>, dispersion: Dispersion) -> Result<Self> {
        if dimension != 1 && dimension != 3 {
            return Err(invalid("dimension", format!("must be 1 or 3, got {dimension}")));
        }
        if k_samples.len() < 2 {
            return Err(invalid("grid_points", "need at least 2 samples"));
        }
        dispersion.validate()?;
        let dk = (k_samples[k_samples.len() - 1] - k_samples[0]) / (k_samples.len() - 1) as f64;
        if !(dk > 0.0 && dk.is_finite()) {
            return Err(invalid("k_samples", "must be strictly increasing"));
        }
        for (i, w) in k_samples.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - dk).abs() > 1e-9 * dk.max(w[1].abs()) {
                return Err(invalid(
                    "k_samples",
                    format!("non-uniform spacing at index {i}: {step} vs {dk}"),
                ));
            }
        }
        Ok(Self {
            dimension,
            k_samples,
            dk,
            dispersion,
        })
    }

    /// `points` samples spanning `[center - span/2, center + span/2]`.
    pub fn centered(dimension: usize, center: f64, span: f64, points: usize, dispersion: Dispersion) -> Result<Self> {
        require_positive("grid_span", span)?;
        if points < 2 {
            return Err(invalid("grid_points", "need at least 2 samples"));
        }
        let lo = center - 0.5 * span;
        let dk = span / (points - 1) as f64;
        let samples = (0..points).map(|j| lo + dk * j as f64).collect();
        Self::new(dimension, samples, dispersion)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn k_samples(&self) -> &[f64] {
        &self.k_samples
    }

    pub fn spacing(&self) -> f64 {
        self.dk
    }

    pub fn dispersion(&self) -> Dispersion {
        self.dispersion
    }

    /// Quantization box length per axis, `2 pi / dk`.
    pub fn box_extent(&self) -> f64 {
        2.0 * PI / self.dk
    }

    /// Volume element `dk^d`.
    pub fn cell(&self) -> f64 {
        self.dk.powi(self.dimension as i32)
    }

    pub fn points_per_axis(&self) -> usize {
        self.k_samples.len()
    }

    pub fn mode_count(&self) -> usize {
        self.k_samples.len().pow(self.dimension as u32)
    }

    fn transverse_offset(&self) -> f64 {
        0.5 * (self.k_samples[0] + self.k_samples[self.k_samples.len() - 1])
    }

    /// Wavevector of flat mode index `j` (row-major over axes).
    pub fn wavevector(&self, j: usize) -> [f64; 3] {
        let n = self.k_samples.len();
        match self.dimension {
            1 => [self.k_samples[j], 0.0, 0.0],
            _ => {
                let shift = self.transverse_offset();
                let (a, rest) = (j / (n * n), j % (n * n));
                let (b, c) = (rest / n, rest % n);
                [self.k_samples[a], self.k_samples[b] - shift, self.k_samples[c] - shift]
            }
        }
    }

    pub fn omega_of(&self, j: usize) -> f64 {
        let k = self.wavevector(j);
        self.dispersion.omega((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt())
    }
}

/// Momentum-space wavepacket with cached spectral moments.
#[derive(Debug, Clone)]
pub struct Wavepacket {
    grid: SpectralGrid,
    amplitudes: Vec<Complex64>,
    wavevectors: Vec<[f64; 3]>,
    omegas: Vec<f64>,
    cdf: Vec<f64>,
    norm: f64,
    carrier: f64,
    bandwidth: f64,
    mean_k: f64,
}

impl Wavepacket {
    /// Builds a packet from amplitudes and rescales them to unit norm.
    pub fn from_amplitudes(grid: SpectralGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        let raw = Self::from_raw(grid, amplitudes)?;
        if raw.norm <= 0.0 {
            return Err(invalid("amplitudes", "all amplitudes are zero"));
        }
        let scale = 1.0 / raw.norm.sqrt();
        let amps = raw.amplitudes.iter().map(|a| a * scale).collect();
        Self::from_raw(raw.grid, amps)
    }

    /// Builds a packet without normalizing. Used for superpositions and for
    /// the zero-amplitude packet; a zero packet samples frequencies uniformly.
    pub fn from_raw(grid: SpectralGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.mode_count() {
            return Err(invalid(
                "amplitudes",
                format!("expected {} values, got {}", grid.mode_count(), amplitudes.len()),
            ));
        }
        let cell = grid.cell();
        let wavevectors: Vec<_> = (0..amplitudes.len()).map(|j| grid.wavevector(j)).collect();
        let omegas: Vec<_> = (0..amplitudes.len()).map(|j| grid.omega_of(j)).collect();
        let weights: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr() * cell).collect();
        let norm: f64 = weights.iter().sum();

        let (carrier, bandwidth, mean_k, cdf) = if norm > 0.0 {
            let carrier = weights.iter().zip(&omegas).map(|(w, o)| w * o).sum::<f64>() / norm;
            let var = weights
                .iter()
                .zip(&omegas)
                .map(|(w, o)| w * (o - carrier).powi(2))
                .sum::<f64>()
                / norm;
            let mean_k = weights.iter().zip(&wavevectors).map(|(w, k)| w * k[0]).sum::<f64>() / norm;
            let mut acc = 0.0;
            let cdf = weights
                .iter()
                .map(|w| {
                    acc += w / norm;
                    acc
                })
                .collect();
            (carrier, 2.0 * var.sqrt(), mean_k, cdf)
        } else {
            let n = amplitudes.len() as f64;
            let cdf = (1..=amplitudes.len()).map(|j| j as f64 / n).collect();
            (0.0, 0.0, 0.0, cdf)
        };

        Ok(Self {
            grid,
            amplitudes,
            wavevectors,
            omegas,
            cdf,
            norm,
            carrier,
            bandwidth,
            mean_k,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Per-mode angular frequencies, aligned with [`Self::amplitudes`].
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// `sum |phi|^2 dk^d`
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Spectral mean of omega under |phi|^2.
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Twice the spectral standard deviation of omega under |phi|^2.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Spectral mean of the first wavevector component.
    pub fn mean_k(&self) -> f64 {
        self.mean_k
    }

    /// Range of positions (per axis) over which `psi` is unaliased.
    pub fn eval_box(&self) -> (f64, f64) {
        let half = 0.5 * self.grid.box_extent();
        (-half, half)
    }

    fn prefactor(&self) -> f64 {
        (2.0 * PI).powf(-0.5 * self.grid.dimension as f64) * self.grid.cell()
    }

    /// Position-space amplitude `psi(r)`. Callers keep `r` inside
    /// [`Self::eval_box`]; outside it the sum repeats periodically.
    pub fn position_amplitude(&self, r: &Position) -> Complex64 {
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .zip(&self.wavevectors)
            .map(|(phi, k)| {
                let phase = -(k[0] * r[0] + k[1] * r[1] + k[2] * r[2]);
                let (s, c) = phase.sin_cos();
                phi * Complex64::new(c, s)
            })
            .sum();
        sum * self.prefactor()
    }

    /// Convenience for one-dimensional packets.
    pub fn psi_at(&self, x: f64) -> Complex64 {
        self.position_amplitude(&[x, 0.0, 0.0])
    }

    /// Upper bound on `|psi(r)|` over all `r` (triangle inequality).
    pub fn amplitude_bound(&self) -> f64 {
        self.prefactor() * self.amplitudes.iter().map(|a| a.norm()).sum::<f64>()
    }

    /// Draws one mode with probability `|phi_j|^2 dk^d` and returns its
    /// frequency.
    pub fn spectral_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.omegas[self.sample_mode(rng)]
    }

    /// Index of a mode drawn with probability `|phi_j|^2 dk^d`.
    pub fn sample_mode<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }

    /// Positions of the dual grid along one axis, `dr = 2 pi / (n dk)`,
    /// centred on zero. Returns `(positions, dr)`.
    pub fn dual_axis(&self) -> (Vec<f64>, f64) {
        let n = self.grid.points_per_axis();
        let dr = 2.0 * PI / (n as f64 * self.grid.dk);
        let half = (n / 2) as f64;
        ((0..n).map(|m| (m as f64 - half) * dr).collect(), dr)
    }

    /// Central interval of the first axis holding `mass` of `|psi|^2`,
    /// resolved on `samples` points across the evaluation box. One-dimensional
    /// packets only.
    pub fn support_interval(&self, mass: f64, samples: usize) -> Result<(f64, f64)> {
        if self.dimension() != 1 {
            return Err(Error::Precondition(
                "support interval is defined for one-dimensional packets".into(),
            ));
        }
        if !(mass > 0.0 && mass < 1.0) {
            return Err(invalid("mass", format!("must lie in (0, 1), got {mass}")));
        }
        let samples = samples.max(16);
        let (lo, hi) = self.eval_box();
        let dx = (hi - lo) / samples as f64;
        let dens: Vec<f64> = (0..samples)
            .map(|i| self.psi_at(lo + (i as f64 + 0.5) * dx).norm_sqr())
            .collect();
        let total: f64 = dens.iter().sum();
        if total <= 0.0 {
            return Err(Error::Precondition("packet has zero density".into()));
        }
        let tail = 0.5 * (1.0 - mass) * total;
        let quantile = |target: f64, iter: &mut dyn Iterator<Item = (usize, &f64)>| {
            let mut acc = 0.0;
            for (i, d) in iter {
                if acc + d >= target {
                    return (i, (target - acc) / d);
                }
                acc += d;
            }
            (samples - 1, 1.0)
        };
        let (i_lo, f_lo) = quantile(tail, &mut dens.iter().enumerate());
        let (i_hi, f_hi) = quantile(tail, &mut dens.iter().enumerate().rev());
        let a = lo + (i_lo as f64 + f_lo) * dx;
        let b = lo + (i_hi as f64 + 1.0 - f_hi) * dx;
        Ok((a, b))
    }
}

/// Gaussian packet centred on `k0` along the first axis with spectral
/// standard deviation `sigma_k` of `|phi|^2` (isotropic in three dimensions).
pub fn make_gaussian(k0: f64, sigma_k: f64, grid: SpectralGrid) -> Result<Wavepacket> {
    require_positive("sigma_k", sigma_k)?;
    if !k0.is_finite() {
        return Err(invalid("k0", "must be finite"));
    }
    let ks = grid.k_samples();
    let (k_min, k_max) = (ks[0], ks[ks.len() - 1]);
    let slack = 1e-12 * (k0.abs() + 6.0 * sigma_k);
    let (need_min, need_max) = (k0 - 6.0 * sigma_k, k0 + 6.0 * sigma_k);
    if k_min > need_min + slack || k_max < need_max - slack {
        return Err(Error::GridTooNarrow {
            k_min,
            k_max,
            need_min,
            need_max,
        });
    }
    if grid.dimension() == 3 && 0.5 * (k_max - k_min) < 6.0 * sigma_k - slack {
        let half = 0.5 * (k_max - k_min);
        return Err(Error::GridTooNarrow {
            k_min: -half,
            k_max: half,
            need_min: -6.0 * sigma_k,
            need_max: 6.0 * sigma_k,
        });
    }
    let center = [k0, 0.0, 0.0];
    let amps = (0..grid.mode_count())
        .map(|j| {
            let k = grid.wavevector(j);
            let d2: f64 = (0..grid.dimension()).map(|a| (k[a] - center[a]).powi(2)).sum();
            Complex64::new((-d2 / (4.0 * sigma_k * sigma_k)).exp(), 0.0)
        })
        .collect();
    Wavepacket::from_amplitudes(grid, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(center: f64, span: f64, n: usize) -> SpectralGrid {
        SpectralGrid::centered(1, center, span, n, Dispersion::Linear(1.0)).unwrap()
    }

    #[test]
    fn gaussian_is_normalized_and_centred() {
        let wp = make_gaussian(10.0, 0.5, grid(10.0, 8.0, 129)).unwrap();
        assert!((wp.norm() - 1.0).abs() < 1e-9);
        assert!((wp.mean_k() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_bandwidth_matches_twice_sigma() {
        // spectral variance of omega = c^2 sigma_k^2 for a well-resolved Gaussian
        let wp = make_gaussian(10.0, 0.5, grid(10.0, 8.0, 129)).unwrap();
        assert!((wp.bandwidth() - 1.0).abs() < 0.02, "{}", wp.bandwidth());
        assert!((wp.carrier() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let err = make_gaussian(10.0, 0.5, grid(10.0, 5.0, 64)).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let err = SpectralGrid::new(1, vec![0.0, 1.0, 3.0], Dispersion::Linear(1.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "k_samples", .. }));
        assert!(SpectralGrid::new(1, vec![1.0], Dispersion::Linear(1.0)).is_err());
        assert!(SpectralGrid::new(2, vec![0.0, 1.0], Dispersion::Linear(1.0)).is_err());
    }

    #[test]
    fn single_mode_is_a_plane_wave() {
        let g = grid(0.0, 4.0, 9);
        let mut amps = vec![Complex64::new(0.0, 0.0); 9];
        amps[6] = Complex64::new(0.3, -0.2);
        let wp = Wavepacket::from_amplitudes(g, amps).unwrap();
        let m0 = wp.psi_at(0.0).norm();
        for x in [-3.0, -0.7, 0.4, 2.5] {
            assert!((wp.psi_at(x).norm() - m0).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_spectrum_always_samples_same_frequency() {
        let g = grid(5.0, 2.0, 5);
        let mut amps = vec![Complex64::new(0.0, 0.0); 5];
        amps[1] = Complex64::new(1.0, 0.0);
        let wp = Wavepacket::from_amplitudes(g, amps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let expect = wp.omegas()[1];
        assert!((0..1000).all(|_| wp.spectral_sample(&mut rng) == expect));
    }

    #[test]
    fn quadratic_dispersion() {
        let d = Dispersion::Quadratic(2.0);
        assert_eq!(d.omega(4.0), 4.0);
    }

    #[test]
    fn three_dimensional_packet_normalizes() {
        let g = SpectralGrid::centered(3, 4.0, 6.0, 9, Dispersion::Linear(1.0)).unwrap();
        let wp = make_gaussian(4.0, 0.4, g).unwrap();
        assert!((wp.norm() - 1.0).abs() < 1e-9);
        assert_eq!(wp.amplitudes().len(), 729);
        let psi0 = wp.position_amplitude(&[0.0, 0.0, 0.0]).norm();
        assert!(psi0 <= wp.amplitude_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn support_interval_is_symmetric_for_centred_packet() {
        let wp = make_gaussian(10.0, 0.5, grid(10.0, 8.0, 128)).unwrap();
        let (a, b) = wp.support_interval(0.99, 8192).unwrap();
        // |psi|^2 is Gaussian with sd 1/(2 sigma_k) = 1, 99% at +-2.5758
        assert!((a + 2.5758).abs() < 0.02, "{a}");
        assert!((b - 2.5758).abs() < 0.02, "{b}");
    }
}
