use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::wavepacket::Wavepacket;

/// Sub-samples per bin for the bin-averaged packet density.
const BIN_SUBSAMPLES: usize = 16;

/// Detection counts over uniform position bins, with the bin-averaged packet
/// density alongside each bin. Events outside the binned range are counted
/// in `unbinned`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub psi_sq_mean: Vec<f64>,
    pub psi_abs_mean: Vec<f64>,
    pub trials: u64,
    /// Sum of `counts`.
    pub detections: u64,
    pub unbinned: u64,
}

impl SpatialHistogram {
    /// `bins` uniform bins over the packet's central 99% support.
    pub fn for_packet(wp: &Wavepacket, bins: usize, trials: u64) -> Result<Self> {
        let (lo, hi) = wp.support_interval(0.99, 8192)?;
        Self::with_range(wp, lo, hi, bins, trials)
    }

    /// Uniform bins over `[lo, hi)` on the first axis. Bin densities are
    /// sampled along that axis (the line `y = z = 0` in three dimensions).
    pub fn with_range(wp: &Wavepacket, lo: f64, hi: f64, bins: usize, trials: u64) -> Result<Self> {
        if bins < 1 {
            return Err(invalid("bins", "must be >= 1"));
        }
        if !(hi > lo) {
            return Err(invalid("range", format!("empty range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut psi_sq_mean = Vec::with_capacity(bins);
        let mut psi_abs_mean = Vec::with_capacity(bins);
        for &left in &edges[..bins] {
            let (mut sq, mut abs) = (0.0, 0.0);
            for s in 0..BIN_SUBSAMPLES {
                let x = left + width * (s as f64 + 0.5) / BIN_SUBSAMPLES as f64;
                let psi = wp.psi_at(x).norm();
                sq += psi * psi;
                abs += psi;
            }
            psi_sq_mean.push(sq / BIN_SUBSAMPLES as f64);
            psi_abs_mean.push(abs / BIN_SUBSAMPLES as f64);
        }
        Ok(Self {
            edges,
            counts: vec![0; bins],
            psi_sq_mean,
            psi_abs_mean,
            trials,
            detections: 0,
            unbinned: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let lo = self.edges[0];
        let hi = self.edges[self.edges.len() - 1];
        if !(x >= lo && x < hi) {
            return None;
        }
        let b = ((x - lo) / (hi - lo) * self.bins() as f64) as usize;
        Some(b.min(self.bins() - 1))
    }

    pub fn record(&mut self, x: f64) {
        match self.bin_of(x) {
            Some(b) => {
                self.counts[b] += 1;
                self.detections += 1;
            }
            None => self.unbinned += 1,
        }
    }

    /// Detections per trial in each bin.
    pub fn rates(&self) -> Vec<f64> {
        let t = self.trials.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn nonempty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    /// Centred coefficient of determination.
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Least squares `y = slope * x` through the origin.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid("fit", "x and y must be non-empty and equal length"));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return Err(invalid("fit", "regressor is identically zero"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = sxy / sxx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - slope * a).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        r_squared,
        residuals,
    })
}

const MIN_FIT_BINS: usize = 10;

/// Fit of per-bin detection rate against an arbitrary per-bin regressor.
pub fn fit_histogram(hist: &SpatialHistogram, regressor: &[f64]) -> Result<FitResult> {
    let got = hist.nonempty_bins();
    if got < MIN_FIT_BINS {
        return Err(Error::TooFewBins {
            needed: MIN_FIT_BINS,
            got,
        });
    }
    fit_through_origin(regressor, &hist.rates())
}

/// Fit of per-bin detection rate against bin-averaged `|psi|^2`.
pub fn born_fit(hist: &SpatialHistogram) -> Result<FitResult> {
    fit_histogram(hist, &hist.psi_sq_mean)
}

/// Fit of per-bin detection rate against bin-averaged `|psi|`.
pub fn amplitude_fit(hist: &SpatialHistogram) -> Result<FitResult> {
    fit_histogram(hist, &hist.psi_abs_mean)
}
