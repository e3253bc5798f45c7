//! Resonant two-level reduction of the projectile/medium Hamiltonian.
//!
//! The effective matrix for the projectile state `|in>` and one molecule `|n>`
//! is
//!
//! ```text
//! [ omega_in   conj(c)          ]
//! [ c          omega_n + i gamma ]
//! ```
//!
//! with `c = epsilon psi(r_n)`. The width enters as `+i gamma`, so the
//! eigenvalues carry a positive imaginary part; `|Im lambda|` is read as a
//! rate. The time integrator applies the same width as amplitude decay
//! (`omega_n - i gamma` under `exp(-i H t)`), whose eigenvalues are the
//! complex conjugates of the ones returned here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::medium::Medium;
use crate::wavepacket::{Position, Wavepacket};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePair {
    pub omega_in: f64,
    pub omega_n: f64,
    /// `epsilon * psi(r_n)`
    pub coupling: Complex64,
    /// Decay width in frequency units.
    pub gamma: f64,
}

impl EffectivePair {
    pub fn new(omega_in: f64, omega_n: f64, coupling: Complex64, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(invalid("gamma", format!("must be >= 0, got {gamma}")));
        }
        Ok(Self {
            omega_in,
            omega_n,
            coupling,
            gamma,
        })
    }

    /// The 2x2 matrix in row-major order.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.omega_in, 0.0), self.coupling.conj()],
            [self.coupling, Complex64::new(self.omega_n, self.gamma)],
        ]
    }

    pub fn coupling_mag(&self) -> f64 {
        self.coupling.norm()
    }

    pub fn detuning(&self) -> f64 {
        (self.omega_in - self.omega_n).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMargins {
    pub resonance: f64,
    pub width: f64,
}

impl Default for RegimeMargins {
    fn default() -> Self {
        Self {
            resonance: 10.0,
            width: 10.0,
        }
    }
}

impl RegimeMargins {
    pub fn new(resonance: f64, width: f64) -> Result<Self> {
        let m = Self { resonance, width };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resonance >= 1.0) {
            return Err(invalid("margins.resonance", "must be >= 1"));
        }
        if !(self.width >= 1.0) {
            return Err(invalid("margins.width", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub detuning: f64,
    pub coupling_mag: f64,
    pub gamma: f64,
    pub margins: RegimeMargins,
    /// `detuning * m1 <= |c|`
    pub resonance_ok: bool,
    /// `|c| * m2 <= gamma`
    pub width_ok: bool,
}

impl RegimeReport {
    pub fn passed(&self) -> bool {
        self.resonance_ok && self.width_ok
    }

    pub fn describe_failure(&self) -> Option<String> {
        let mut parts = Vec::new();
        if !self.resonance_ok {
            parts.push(format!(
                "resonance inequality |omega_in - omega_n| * {} <= |c| failed ({:e} * {} > {:e})",
                self.margins.resonance, self.detuning, self.margins.resonance, self.coupling_mag
            ));
        }
        if !self.width_ok {
            parts.push(format!(
                "width inequality |c| * {} <= gamma failed ({:e} * {} > {:e})",
                self.margins.width, self.coupling_mag, self.margins.width, self.gamma
            ));
        }
        (!parts.is_empty()).then(|| parts.join("; "))
    }
}

/// `<in| H |n>` for a molecule at `r`: `epsilon * conj(psi(r))`.
pub fn coupling_element(wp: &Wavepacket, epsilon: f64, r: &Position) -> Complex64 {
    epsilon * wp.position_amplitude(r).conj()
}

pub fn regime_check(pair: &EffectivePair, margins: &RegimeMargins) -> RegimeReport {
    let detuning = pair.detuning();
    let c = pair.coupling_mag();
    RegimeReport {
        detuning,
        coupling_mag: c,
        gamma: pair.gamma,
        margins: *margins,
        resonance_ok: detuning * margins.resonance <= c,
        width_ok: c * margins.width <= pair.gamma,
    }
}

/// Eigenvalues relative to `omega_n`, as `(lambda_1, lambda_2)` where
/// `lambda_2` belongs to the eigenvector with the larger `|in>` component.
pub fn exact_eigen_shifted(pair: &EffectivePair) -> (Complex64, Complex64) {
    let a = Complex64::new(pair.omega_in - pair.omega_n, 0.0);
    let d = Complex64::new(0.0, pair.gamma);
    let c2 = pair.coupling.norm_sqr();
    if c2 == 0.0 {
        return (d, a);
    }
    let half_trace = 0.5 * (a + d);
    let det = a * d - c2;
    let root = (0.25 * (a - d) * (a - d) + c2).sqrt();
    // pick the root without cancellation, recover the other from the determinant
    let (p, m) = (half_trace + root, half_trace - root);
    let big = if p.norm() >= m.norm() { p } else { m };
    let small = if big.norm() == 0.0 { big } else { det / big };
    // eigenvector for lambda is (lambda - d, c); its |in> weight decides labeling
    let in_weight = |l: Complex64| {
        let x = (l - d).norm_sqr();
        x / (x + c2)
    };
    if in_weight(small) >= in_weight(big) {
        (big, small)
    } else {
        (small, big)
    }
}

/// Exact eigenvalues of the effective matrix, labeled as in
/// [`exact_eigen_shifted`].
pub fn exact_eigen(pair: &EffectivePair) -> (Complex64, Complex64) {
    let (l1, l2) = exact_eigen_shifted(pair);
    (l1 + pair.omega_n, l2 + pair.omega_n)
}

/// Asymptotic seesaw pair `(omega_n + i gamma, omega_n + i |c|^2 / gamma)`.
pub fn seesaw_approx(pair: &EffectivePair, margins: &RegimeMargins) -> Result<(Complex64, Complex64)> {
    let report = regime_check(pair, margins);
    if let Some(msg) = report.describe_failure() {
        return Err(Error::RegimeViolation(msg));
    }
    let (large, small) = seesaw_shifted(pair);
    Ok((large + pair.omega_n, small + pair.omega_n))
}

/// Seesaw pair relative to `omega_n`, without the regime check.
pub fn seesaw_shifted(pair: &EffectivePair) -> (Complex64, Complex64) {
    (
        Complex64::new(0.0, pair.gamma),
        Complex64::new(0.0, pair.coupling.norm_sqr() / pair.gamma),
    )
}

/// `gamma / |c|^2`, the inverse of the small seesaw eigenvalue.
pub fn detection_timescale(pair: &EffectivePair) -> Result<f64> {
    let c2 = pair.coupling.norm_sqr();
    if c2 == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(pair.gamma / c2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationBudget {
    /// Starting step count; 0 picks one from the spectral radius.
    pub initial_steps: usize,
    pub max_steps: usize,
    /// Largest allowed population change when the step is halved.
    pub tolerance: f64,
}

impl Default for IntegrationBudget {
    fn default() -> Self {
        Self {
            initial_steps: 0,
            max_steps: 1 << 22,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullDynamics {
    /// Population of `|in>` at `t_final`.
    pub in_population: f64,
    /// Population of each molecule, in medium order.
    pub excited: Vec<f64>,
    /// Total norm after each step of the accepted run (first entry is t = 0).
    pub norm_trace: Vec<f64>,
    pub steps: usize,
}

impl FullDynamics {
    /// Index of the molecule with the largest excited population.
    pub fn brightest(&self) -> Option<usize> {
        self.excited
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

/// Propagates the restricted (N+1)-level system from `|in>` with the packet
/// carrier as `omega_in`. Runs fixed-step RK4, doubling the step count until
/// the final populations move by less than the budget tolerance.
pub fn integrate_full(
    wp: &Wavepacket,
    medium: &Medium,
    epsilon: f64,
    gamma: f64,
    t_final: f64,
    budget: IntegrationBudget,
) -> Result<FullDynamics> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", "must be >= 0"));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(invalid("t_final", "must be finite and >= 0"));
    }
    let omega_in = wp.carrier();
    let couplings: Vec<Complex64> = medium
        .molecules
        .iter()
        .map(|m| epsilon * wp.position_amplitude(&m.position))
        .collect();
    // rotating frame about omega_in; global phase does not affect populations
    let diag: Vec<Complex64> = medium
        .molecules
        .iter()
        .map(|m| Complex64::new(m.omega - omega_in, -gamma))
        .collect();
    let system = FullSystem { couplings, diag };

    let mut steps = if budget.initial_steps > 0 {
        budget.initial_steps
    } else {
        ((t_final * system.spectral_radius() / 0.5).ceil() as usize).max(16)
    };
    let mut coarse = system.propagate(t_final, steps, false);
    loop {
        if steps * 2 > budget.max_steps {
            let fine = system.propagate(t_final, steps, false);
            return Err(Error::NonConvergence {
                max_steps: budget.max_steps,
                tolerance: budget.tolerance,
                last_change: max_change(&coarse.0, &fine.0),
            });
        }
        steps *= 2;
        let fine = system.propagate(t_final, steps, true);
        let change = max_change(&coarse.0, &fine.0);
        if change < budget.tolerance {
            let (pops, norm_trace) = fine;
            return Ok(FullDynamics {
                in_population: pops[0],
                excited: pops[1..].to_vec(),
                norm_trace,
                steps,
            });
        }
        coarse = fine;
    }
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct FullSystem {
    couplings: Vec<Complex64>,
    diag: Vec<Complex64>,
}

impl FullSystem {
    fn spectral_radius(&self) -> f64 {
        let d = self.diag.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let c: f64 = self.couplings.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        d + c
    }

    /// dy/dt = -i H y
    fn derivative(&self, y: &[Complex64], out: &mut [Complex64]) {
        let minus_i = Complex64::new(0.0, -1.0);
        let y0 = y[0];
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, (c, d)) in self.couplings.iter().zip(&self.diag).enumerate() {
            let yn = y[n + 1];
            acc += c.conj() * yn;
            out[n + 1] = minus_i * (c * y0 + d * yn);
        }
        out[0] = minus_i * acc;
    }

    fn propagate(&self, t_final: f64, steps: usize, trace: bool) -> (Vec<f64>, Vec<f64>) {
        let dim = self.couplings.len() + 1;
        let dt = t_final / steps as f64;
        let zero = Complex64::new(0.0, 0.0);
        let mut y = vec![zero; dim];
        y[0] = Complex64::new(1.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
            vec![zero; dim],
            vec![zero; dim],
            vec![zero; dim],
            vec![zero; dim],
            vec![zero; dim],
        );
        let norm = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let mut norms = Vec::with_capacity(if trace { steps + 1 } else { 0 });
        if trace {
            norms.push(norm(&y));
        }
        for _ in 0..steps {
            self.derivative(&y, &mut k1);
            for i in 0..dim {
                tmp[i] = y[i] + 0.5 * dt * k1[i];
            }
            self.derivative(&tmp, &mut k2);
            for i in 0..dim {
                tmp[i] = y[i] + 0.5 * dt * k2[i];
            }
            self.derivative(&tmp, &mut k3);
            for i in 0..dim {
                tmp[i] = y[i] + dt * k3[i];
            }
            self.derivative(&tmp, &mut k4);
            for i in 0..dim {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if trace {
                norms.push(norm(&y));
            }
        }
        (y.iter().map(|a| a.norm_sqr()).collect(), norms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Molecule;
    use crate::wavepacket::{make_gaussian, Dispersion, SpectralGrid};

    fn pair(omega_in: f64, omega_n: f64, c: Complex64, gamma: f64) -> EffectivePair {
        EffectivePair::new(omega_in, omega_n, c, gamma).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn decoupled_eigenvalues_are_diagonal() {
        let p = pair(1.5, 2.0, Complex64::new(0.0, 0.0), 0.3);
        let (l1, l2) = exact_eigen(&p);
        assert_eq!(l1, Complex64::new(2.0, 0.3));
        assert_eq!(l2, Complex64::new(1.5, 0.0));
    }

    #[test]
    fn hermitian_rabi_splitting() {
        let p = pair(0.0, 0.0, Complex64::new(0.25, 0.0), 0.0);
        let (l1, l2) = exact_eigen(&p);
        let mut re = [l1.re, l2.re];
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 0.25).abs() < 1e-15 && (re[1] - 0.25).abs() < 1e-15);
        assert!(l1.im.abs() < 1e-15 && l2.im.abs() < 1e-15);
    }

    #[test]
    fn trace_and_determinant_identities() {
        let p = pair(3.0, 2.9, Complex64::new(0.04, -0.03), 0.7);
        let (l1, l2) = exact_eigen(&p);
        let m = p.matrix();
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(rel(l1 + l2, tr) < 1e-12);
        assert!(rel(l1 * l2, det) < 1e-12);
    }

    #[test]
    fn eigenvalues_ignore_coupling_phase() {
        let a = pair(1.0, 1.1, Complex64::from_polar(0.05, 0.0), 0.5);
        let b = pair(1.0, 1.1, Complex64::from_polar(0.05, 2.1), 0.5);
        let (a1, a2) = exact_eigen(&a);
        let (b1, b2) = exact_eigen(&b);
        assert!((a1 - b1).norm() < 1e-15 && (a2 - b2).norm() < 1e-15);
    }

    #[test]
    fn seesaw_small_eigenvalue_example() {
        let p = pair(0.0, 0.0, Complex64::new(1e-3, 0.0), 1.0);
        let (_, small) = seesaw_approx(&p, &RegimeMargins::default()).unwrap();
        assert!((small - Complex64::new(0.0, 1e-6)).norm() < 1e-20);
        // gamma x10 -> small eigenvalue / 10
        let q = pair(0.0, 0.0, Complex64::new(1e-3, 0.0), 10.0);
        let (_, small10) = seesaw_approx(&q, &RegimeMargins::default()).unwrap();
        assert!(rel(small10 * 10.0, small) < 1e-15);
    }

    #[test]
    fn seesaw_reports_failed_inequality() {
        let p = pair(0.0, 0.0, Complex64::new(1.0, 0.0), 1.0);
        match seesaw_approx(&p, &RegimeMargins::default()) {
            Err(Error::RegimeViolation(msg)) => assert!(msg.contains("width")),
            other => panic!("{other:?}"),
        }
        let q = pair(0.5, 0.0, Complex64::new(1e-3, 0.0), 1.0);
        match seesaw_approx(&q, &RegimeMargins::default()) {
            Err(Error::RegimeViolation(msg)) => {
                assert!(msg.contains("resonance") && !msg.contains("width"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn regime_check_examples() {
        let m = RegimeMargins::new(10.0, 10.0).unwrap();
        assert!(regime_check(&pair(0.0, 0.0, Complex64::new(1e-3, 0.0), 1.0), &m).passed());
        let r = regime_check(
            &pair(0.0, 0.0, Complex64::new(1.0, 0.0), 1.0),
            &RegimeMargins::new(1.0, 1.5).unwrap(),
        );
        assert!(r.resonance_ok && !r.width_ok);
        // boundary: detuning * m1 == |c| passes
        let b = RegimeMargins::new(4.0, 1.0).unwrap();
        assert!(regime_check(&pair(0.125, 0.0, Complex64::new(0.5, 0.0), 1.0), &b).resonance_ok);
        assert!(RegimeMargins::new(0.5, 2.0).is_err());
    }

    #[test]
    fn detection_timescale_examples() {
        let p = pair(0.0, 0.0, Complex64::new(1e-3, 0.0), 1.0);
        let tau = detection_timescale(&p).unwrap();
        assert!((tau - 1e6).abs() < 1e-6);
        let q = pair(0.0, 0.0, Complex64::new(2e-3, 0.0), 1.0);
        assert!((detection_timescale(&q).unwrap() - tau / 4.0).abs() < 1e-6);
        let (_, small) = seesaw_shifted(&p);
        assert!((tau * small.norm() - 1.0).abs() < 1e-15);
        let z = pair(0.0, 0.0, Complex64::new(0.0, 0.0), 1.0);
        assert_eq!(detection_timescale(&z).unwrap_err(), Error::ZeroCoupling);
    }

    fn flat_packet() -> Wavepacket {
        let g = SpectralGrid::centered(1, 10.0, 0.4, 64, Dispersion::Linear(1.0)).unwrap();
        make_gaussian(10.0, 0.01, g).unwrap()
    }

    #[test]
    fn zero_coupling_freezes_populations() {
        let wp = flat_packet();
        let medium = Medium::new(vec![
            Molecule {
                position: [0.0; 3],
                omega: 10.0,
            },
            Molecule {
                position: [1.0, 0.0, 0.0],
                omega: 10.2,
            },
        ]);
        let out = integrate_full(&wp, &medium, 0.0, 0.1, 50.0, IntegrationBudget::default()).unwrap();
        assert!((out.in_population - 1.0).abs() < 1e-12);
        assert!(out.excited.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn norm_conserved_without_width_and_decreasing_with_width() {
        let wp = flat_packet();
        let medium = Medium::new(vec![
            Molecule {
                position: [0.0; 3],
                omega: 10.0,
            },
            Molecule {
                position: [0.5, 0.0, 0.0],
                omega: 10.05,
            },
            Molecule {
                position: [-0.5, 0.0, 0.0],
                omega: 9.9,
            },
        ]);
        let eps = 0.05;
        let free = integrate_full(&wp, &medium, eps, 0.0, 100.0, IntegrationBudget::default()).unwrap();
        assert!(free.norm_trace.iter().all(|n| (n - 1.0).abs() < 1e-8));
        let damped = integrate_full(&wp, &medium, eps, 0.05, 100.0, IntegrationBudget::default()).unwrap();
        assert!(damped.norm_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(*damped.norm_trace.last().unwrap() < 0.99);
    }

    #[test]
    fn step_budget_exhaustion_is_reported() {
        let wp = flat_packet();
        let medium = Medium::new(vec![Molecule {
            position: [0.0; 3],
            omega: 10.0,
        }]);
        let budget = IntegrationBudget {
            initial_steps: 4,
            max_steps: 8,
            tolerance: 1e-12,
        };
        let err = integrate_full(&wp, &medium, 0.05, 0.0, 200.0, budget).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { max_steps: 8, .. }));
    }
}
