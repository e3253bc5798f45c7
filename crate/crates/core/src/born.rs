//! Closed-form resonance and detection probabilities and the factorization of
//! the detection probability into `|psi|^2`, an interaction volume and an
//! efficiency.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dephasing::p_window_at_detection;
use crate::error::{require_positive, Result};
use crate::probability::Probability;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BornParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub g: f64,
    /// Packet bandwidth.
    pub omega_bw: f64,
    /// Carrier frequency.
    pub omega_in: f64,
}

impl BornParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("epsilon", self.epsilon)?;
        require_positive("gamma", self.gamma)?;
        require_positive("g", self.g)?;
        require_positive("bandwidth", self.omega_bw)?;
        require_positive("omega_in", self.omega_in)
    }
}

/// `min(2 epsilon |psi| / Omega, 1)`
pub fn p_resonance(epsilon: f64, psi_mag: f64, omega_bw: f64) -> Probability {
    Probability::clamp(2.0 * epsilon * psi_mag / omega_bw)
}

/// `min(epsilon^2 |psi|^2 sqrt(2 gamma / (pi g Omega^2)), 1)`
pub fn p_detection(epsilon: f64, psi_mag: f64, gamma: f64, g: f64, omega_bw: f64) -> Probability {
    let c2 = (epsilon * psi_mag).powi(2);
    Probability::clamp(c2 * (2.0 * gamma / (PI * g * omega_bw * omega_bw)).sqrt())
}

/// Product of the resonance and window probabilities before clamping; equal
/// to [`p_detection`]'s unclamped value.
pub fn p_detection_by_parts(epsilon: f64, psi_mag: f64, gamma: f64, g: f64, omega_bw: f64) -> f64 {
    p_resonance(epsilon, psi_mag, omega_bw).unclamped * p_window_at_detection(epsilon * psi_mag, gamma, g).unclamped
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factorization {
    pub psi_sq: f64,
    /// `epsilon^2 / omega_in^2`
    pub interaction_volume: f64,
    /// `omega_in^2 sqrt(2 gamma / (pi g Omega^2))`
    pub efficiency: f64,
}

impl Factorization {
    pub fn product(&self) -> f64 {
        self.psi_sq * self.interaction_volume * self.efficiency
    }
}

pub fn efficiency_factorization(params: &BornParams, psi_mag: f64) -> Result<Factorization> {
    params.validate()?;
    let BornParams {
        epsilon,
        gamma,
        g,
        omega_bw,
        omega_in,
    } = *params;
    Ok(Factorization {
        psi_sq: psi_mag * psi_mag,
        interaction_volume: (epsilon / omega_in).powi(2),
        efficiency: omega_in * omega_in * (2.0 * gamma / (PI * g * omega_bw * omega_bw)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_examples() {
        assert_eq!(p_resonance(1.0, 0.0, 1.0).value, 0.0);
        let omega = 3.0;
        assert!((p_resonance(1.0, omega / 4.0, omega).value - 0.5).abs() < 1e-15);
        let clamped = p_resonance(1.0, 2.0, 1.0);
        assert_eq!(clamped.value, 1.0);
        assert_eq!(clamped.unclamped, 4.0);
    }

    #[test]
    fn detection_examples() {
        assert_eq!(p_detection(1.0, 0.0, 1.0, 1.0, 1.0).value, 0.0);
        let p = p_detection(1.0, 1e-2, 1.0, 1.0, 1.0);
        assert!((p.value - 1e-4 * (2.0 / PI).sqrt()).abs() < 1e-18);
        assert!((p.value - 7.979e-5).abs() < 1e-8);
    }

    #[test]
    fn detection_scales_with_psi_squared() {
        let base = p_detection(0.3, 0.01, 2.0, 0.5, 1.5).unclamped;
        for lambda in [0.5, 2.0, 7.0] {
            let scaled = p_detection(0.3, 0.01 * lambda, 2.0, 0.5, 1.5).unclamped;
            assert!((scaled / base - lambda * lambda).abs() < 1e-12);
        }
        let r1 = p_resonance(0.3, 0.01, 1.5).unclamped;
        let r3 = p_resonance(0.3, 0.03, 1.5).unclamped;
        assert!((r3 / r1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn detection_monotonicity() {
        let p = |gamma: f64, g: f64, bw: f64| p_detection(0.1, 0.1, gamma, g, bw).unclamped;
        assert!(p(2.0, 1.0, 1.0) > p(1.0, 1.0, 1.0));
        assert!(p(1.0, 2.0, 1.0) < p(1.0, 1.0, 1.0));
        assert!(p(1.0, 1.0, 2.0) < p(1.0, 1.0, 1.0));
    }

    #[test]
    fn factorization_scaling() {
        let params = BornParams {
            epsilon: 0.2,
            gamma: 1.0,
            g: 0.3,
            omega_bw: 0.8,
            omega_in: 5.0,
        };
        let f1 = efficiency_factorization(&params, 0.4).unwrap();
        let f2 = efficiency_factorization(&BornParams { epsilon: 0.4, ..params }, 0.4).unwrap();
        assert!((f2.interaction_volume / f1.interaction_volume - 4.0).abs() < 1e-12);
        assert_eq!(f1.efficiency, f2.efficiency);
        assert!(efficiency_factorization(&BornParams { g: 0.0, ..params }, 0.4).is_err());
    }
}
