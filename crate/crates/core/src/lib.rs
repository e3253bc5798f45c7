//! Quasi-continuum model of single-quantum detection.
//!
//! A projectile wavepacket meets a medium of molecules whose resonant
//! frequencies form a dense random ladder. The molecule that matches the
//! packet in frequency is excited through a two-level resonance, and detection
//! competes with a random walk of that level out of its window. The resulting
//! per-molecule detection probability scales as `|psi|^2`.
//!
//! Modules:
//! - [`wavepacket`]: momentum-space packet, position amplitude, spectral sampling
//! - [`medium`]: molecule sampling and resonance queries
//! - [`twolevel`]: effective 2x2 dynamics and the full (N+1)-level integrator
//! - [`dephasing`]: diffusion law and window-survival probabilities
//! - [`born`]: closed-form resonance and detection probabilities
//! - [`trials`]: Monte Carlo engine, histogram fits and deviation experiments
//! - [`appendix`]: SI-unit neutron detection estimates

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appendix;
pub mod born;
pub mod dephasing;
pub mod error;
pub mod medium;
pub mod probability;
pub mod rng;
pub mod trials;
pub mod twolevel;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use probability::Probability;
