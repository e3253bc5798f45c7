//! `validate` subcommand: configuration checks and regime diagnostics.

use anyhow::Result;
use quasidetect::born::p_detection;

use crate::config::Resolved;

const PEAK_SAMPLES: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub psi_peak: f64,
    pub coupling_peak: f64,
    pub level_spacing: f64,
    pub width_ok: bool,
    pub sparse: bool,
    pub lines: Vec<String>,
}

/// Largest `|psi|` along the first axis inside the medium.
fn psi_peak(r: &Resolved) -> f64 {
    let wp = &r.trial.wavepacket;
    let (lo, hi) = wp.eval_box();
    let half = 0.5 * r.trial.medium.extent;
    let (a, b) = (lo.max(-half), hi.min(half));
    (0..PEAK_SAMPLES)
        .map(|i| wp.psi_at(a + (b - a) * i as f64 / (PEAK_SAMPLES - 1) as f64).norm())
        .fold(0.0, f64::max)
}

pub fn diagnose(r: &Resolved) -> Diagnostics {
    let t = &r.trial;
    let margins = r.config.dynamics.margins;
    let psi = psi_peak(r);
    let c = t.epsilon * psi;
    let spacing = t.medium.nominal_spacing();
    let width_ok = c * margins.width <= t.gamma;
    let sparse = 2.0 * c < spacing;
    let bw = t.wavepacket.bandwidth();
    let mut lines = vec![
        format!("packet: carrier {:.6}, bandwidth {:.6}", t.wavepacket.carrier(), bw),
        format!("peak |psi| {psi:.6e}, peak coupling eps|psi| {c:.6e}"),
        format!(
            "resonance: detuning must satisfy |omega_in - omega_n| <= {:.6e} at the peak",
            c / margins.resonance
        ),
        format!(
            "expected molecules {:.3}, nominal level spacing {spacing:.6e}",
            t.medium.expected_count()
        ),
    ];
    if width_ok {
        lines.push(format!(
            "width: eps|psi| * {} <= gamma = {} holds",
            margins.width, t.gamma
        ));
    } else {
        lines.push(format!(
            "warning: width inequality fails at the packet peak: eps|psi| * {} = {:.6e} > gamma = {}",
            margins.width,
            c * margins.width,
            t.gamma
        ));
    }
    lines.push(if sparse {
        format!("regime: sparse (2 eps|psi| = {:.6e} < spacing)", 2.0 * c)
    } else {
        format!("regime: crowded (2 eps|psi| = {:.6e} >= spacing)", 2.0 * c)
    });
    if bw > 0.0 {
        let p = p_detection(t.epsilon, psi, t.gamma, t.diffusion.g, bw);
        lines.push(format!("closed-form detection probability at the peak {:.6e}", p.value));
    }
    Diagnostics {
        psi_peak: psi,
        coupling_peak: c,
        level_spacing: spacing,
        width_ok,
        sparse,
        lines,
    }
}

pub fn run(r: &Resolved) -> Result<()> {
    println!("configuration valid");
    for line in diagnose(r).lines {
        println!("{line}");
    }
    Ok(())
}
