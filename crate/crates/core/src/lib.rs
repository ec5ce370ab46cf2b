//! Adaptive physics-guided diffusion over per-residue rigid frames.
//!
//! The crate is organised bottom-up:
//!
//! - [`se3`]: rotations, frames, structure state, noise schedule, IGSO3
//!   noising, the SO(3) score and unguided reverse steps.
//! - [`experts`]: the four physics experts (clash, hotspot recognition,
//!   contact density, interface geometry), each a loss plus an analytic
//!   per-residue gradient.
//! - [`router`]: severity scores and thresholded, severity-proportional
//!   expert weights.
//! - [`temporal`]: Beta-profile temporal modulation and the SNR signal.
//! - [`sampler`]: combined guidance, the guided reverse step and skip-step
//!   sampling against a pluggable denoiser.
//! - [`bayes_opt`]: Matérn-5/2 Gaussian process, expected improvement and
//!   the online tuner for the shared Beta shape `(alpha, beta)`.
//! - [`metrics`]: network-free structure metrics and hotspot ranking.
//! - [`campaign`]: configuration, structure I/O and the outer design loop.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bayes_opt;
pub mod campaign;
pub mod error;
pub mod experts;
pub mod metrics;
pub mod router;
pub mod sampler;
pub mod se3;
pub mod temporal;

pub use error::{Error, ErrorCode, Result};

/// Cartesian 3-vector in Ångström (positions) or Å⁻¹-scaled gradients.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Dense 3×3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
