//! Detector medium: point-like molecules with quasi-continuum resonant
//! frequencies.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::wavepacket::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyLaw {
    /// Uniform over `[center - S/2, center + S/2]`.
    #[default]
    Uniform,
    /// Normal with the same variance as the uniform law, `S^2 / 12`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountLaw {
    /// Poisson with mean `density * volume`.
    #[default]
    Poisson,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    /// Spatial dimension of molecule positions (1 or 3).
    pub dimension: usize,
    /// Molecules per unit length^d.
    pub density: f64,
    /// Side length of the region; positions lie in `[-extent/2, extent/2]^d`.
    pub extent: f64,
    pub omega_center: f64,
    /// Spectral spread S.
    pub spread: f64,
    pub frequency_law: FrequencyLaw,
    pub count_law: CountLaw,
}

impl MediumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 3 {
            return Err(invalid("dimension", format!("must be 1 or 3, got {}", self.dimension)));
        }
        require_positive("density", self.density)?;
        require_positive("extent", self.extent)?;
        require_positive("spread", self.spread)?;
        if !self.omega_center.is_finite() {
            return Err(invalid("omega_center", "must be finite"));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.extent.powi(self.dimension as i32)
    }

    /// Expected molecule count.
    pub fn expected_count(&self) -> f64 {
        match self.count_law {
            CountLaw::Poisson => self.density * self.volume(),
            CountLaw::Fixed(n) => n as f64,
        }
    }

    /// Expected level spacing `S / max(N - 1, 1)` at the expected count.
    pub fn nominal_spacing(&self) -> f64 {
        self.spread / (self.expected_count() - 1.0).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub position: Position,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Medium {
    pub molecules: Vec<Molecule>,
}

impl Medium {
    pub fn new(molecules: Vec<Molecule>) -> Self {
        Self { molecules }
    }

    pub fn len(&self) -> usize {
        self.molecules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.molecules.is_empty()
    }

    /// Mean of sorted-adjacent frequency differences.
    pub fn mean_level_spacing(&self) -> Result<f64> {
        mean_level_spacing(self)
    }
}

pub fn sample_medium<R: Rng + ?Sized>(spec: &MediumSpec, rng: &mut R) -> Result<Medium> {
    spec.validate()?;
    let count = match spec.count_law {
        CountLaw::Fixed(n) => n,
        CountLaw::Poisson => {
            let lambda = spec.density * spec.volume();
            let dist = Poisson::new(lambda).map_err(|e| invalid("density", format!("poisson mean {lambda}: {e}")))?;
            dist.sample(rng) as usize
        }
    };
    if count == 0 {
        return Err(Error::EmptyMedium);
    }
    let half = 0.5 * spec.extent;
    let normal =
        Normal::new(spec.omega_center, spec.spread / 12f64.sqrt()).map_err(|e| invalid("spread", e.to_string()))?;
    let molecules = (0..count)
        .map(|_| {
            let mut position = [0.0; 3];
            for p in position.iter_mut().take(spec.dimension) {
                *p = rng.random_range(-half..half);
            }
            let omega = match spec.frequency_law {
                FrequencyLaw::Uniform => spec.omega_center + spec.spread * (rng.random::<f64>() - 0.5),
                FrequencyLaw::Gaussian => normal.sample(rng),
            };
            Molecule { position, omega }
        })
        .collect();
    Ok(Medium { molecules })
}

/// Indices `n` with `|omega_in - omega_n| < window_of(molecule_n)`, sorted by
/// detuning then index.
pub fn resonant_candidates<F>(medium: &Medium, omega_in: f64, mut window_of: F) -> Vec<usize>
where
    F: FnMut(&Molecule) -> f64,
{
    let mut hits: Vec<(f64, usize)> = medium
        .molecules
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let detuning = (omega_in - m.omega).abs();
            (detuning < window_of(m)).then_some((detuning, i))
        })
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    hits.into_iter().map(|(_, i)| i).collect()
}

pub fn mean_level_spacing(medium: &Medium) -> Result<f64> {
    let n = medium.len();
    if n < 2 {
        return Err(Error::TooFewMolecules(n));
    }
    let mut omegas: Vec<f64> = medium.molecules.iter().map(|m| m.omega).collect();
    omegas.sort_by(f64::total_cmp);
    // mean of adjacent differences telescopes to (max - min)/(n - 1)
    Ok((omegas[n - 1] - omegas[0]) / (n - 1) as f64)
}
