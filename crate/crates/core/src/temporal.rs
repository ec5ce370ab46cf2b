//! Beta-shaped temporal modulation of guidance strength.
//!
//! Profiles are indexed by generation step `t = 1..=T` with
//! `t_norm = (t − 1)/(T − 1)`, so `t_norm = 0` is the first (noisiest)
//! denoising step. The factor is the Beta density divided by its value at the
//! mode, times `lambda_peak`. For shapes without an interior mode the density
//! maximum over a clipped interior grid is used instead.

use serde::{Deserialize, Serialize};

use crate::experts::ExpertId;
use crate::se3::NoiseSchedule;
use crate::{Error, Result};

pub const NORMALIZER_GRID_POINTS: usize = 4096;
pub const GRID_EDGE: f64 = 1e-4;

/// Base strength per expert.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseStrengths {
    pub vdw: f64,
    pub recognition: f64,
    pub energy: f64,
    pub interface: f64,
}

impl Default for BaseStrengths {
    fn default() -> Self {
        BaseStrengths { vdw: 0.5, recognition: 2.0, energy: 1.0, interface: 1.0 }
    }
}

impl BaseStrengths {
    pub fn zero() -> Self {
        BaseStrengths { vdw: 0.0, recognition: 0.0, energy: 0.0, interface: 0.0 }
    }

    pub fn get(&self, id: ExpertId) -> f64 {
        self.as_array()[id.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.vdw, self.recognition, self.energy, self.interface]
    }

    pub fn is_zero(&self) -> bool {
        self.as_array().iter().all(|v| *v == 0.0)
    }
}

/// Shared Beta shape plus strength factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda_peak: f64,
    pub lambda_base: BaseStrengths,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        GuidanceParams { alpha: 2.0, beta: 2.0, lambda_peak: 5.0, lambda_base: BaseStrengths::default() }
    }
}

impl GuidanceParams {
    pub fn with_shape(self, alpha: f64, beta: f64) -> Self {
        GuidanceParams { alpha, beta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) || !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::domain(format!("Beta shape must be positive, got ({}, {})", self.alpha, self.beta)));
        }
        if !(self.lambda_peak > 0.0) {
            return Err(Error::config("lambda_peak must be positive"));
        }
        if self.lambda_base.as_array().iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::config("base strengths must be nonnegative"));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<TemporalProfile> {
        TemporalProfile::new(self.alpha, self.beta, self.lambda_peak)
    }
}

/// `(α − 1)/(α + β − 2)` when both shapes exceed 1.
pub fn beta_mode(alpha: f64, beta: f64) -> Option<f64> {
    (alpha > 1.0 && beta > 1.0).then(|| (alpha - 1.0) / (alpha + beta - 2.0))
}

/// A Beta profile with its normalizer resolved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalProfile {
    alpha: f64,
    beta: f64,
    lambda_peak: f64,
    /// `Some(mode)` for interior modes; otherwise inputs are clipped to the grid range.
    mode: Option<f64>,
    /// Unnormalized log-density at the reference point.
    log_ref: f64,
}

impl TemporalProfile {
    pub fn new(alpha: f64, beta: f64, lambda_peak: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::domain(format!("Beta shape must be positive, got ({alpha}, {beta})")));
        }
        if !(lambda_peak >= 0.0) {
            return Err(Error::domain("lambda_peak must be nonnegative"));
        }
        let log_kernel = |t: f64| (alpha - 1.0) * t.ln() + (beta - 1.0) * (1.0 - t).ln();
        let mode = beta_mode(alpha, beta);
        let log_ref = match mode {
            Some(m) => log_kernel(m),
            None => {
                let n = NORMALIZER_GRID_POINTS;
                let span = 1.0 - 2.0 * GRID_EDGE;
                (0..n)
                    .map(|k| log_kernel(GRID_EDGE + span * k as f64 / (n - 1) as f64))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        };
        Ok(TemporalProfile { alpha, beta, lambda_peak, mode, log_ref })
    }

    pub fn mode(&self) -> Option<f64> {
        self.mode
    }

    /// Factor at a normalized time in `[0, 1]`.
    pub fn at(&self, t_norm: f64) -> f64 {
        let t = match self.mode {
            Some(_) => t_norm.clamp(0.0, 1.0),
            None => t_norm.clamp(GRID_EDGE, 1.0 - GRID_EDGE),
        };
        if self.mode == Some(t) {
            return self.lambda_peak;
        }
        let log_k = (self.alpha - 1.0) * t.ln() + (self.beta - 1.0) * (1.0 - t).ln();
        // rounding near the peak can nudge the ratio past 1
        (log_k - self.log_ref).exp().min(1.0) * self.lambda_peak
    }

    /// Factor at generation step `t` of `total`.
    pub fn factor(&self, t: usize, total: usize) -> Result<f64> {
        Ok(self.at(normalized_time(t, total)?))
    }
}

/// `(t − 1)/(T − 1)` for `1 ≤ t ≤ T`.
pub fn normalized_time(t: usize, total: usize) -> Result<f64> {
    if total < 2 {
        return Err(Error::domain(format!("temporal profiles need T >= 2, got {total}")));
    }
    if t < 1 || t > total {
        return Err(Error::domain(format!("step {t} outside 1..={total}")));
    }
    Ok((t - 1) as f64 / (total - 1) as f64)
}

pub fn temporal_factor(t: usize, total: usize, alpha: f64, beta: f64, lambda_peak: f64) -> Result<f64> {
    TemporalProfile::new(alpha, beta, lambda_peak)?.factor(t, total)
}

/// `λ_base · f_temporal(t) · w`.
pub fn guidance_strength(id: ExpertId, t: usize, total: usize, params: &GuidanceParams, w: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::domain(format!("routing weight must lie in [0, 1], got {w}")));
    }
    let f = params.profile()?.factor(t, total)?;
    Ok(params.lambda_base.get(id) * f * w)
}

/// `ᾱ_t/(1 − ᾱ_t)`; `+∞` when `ᾱ_t = 1`.
pub fn snr(t: usize, schedule: &NoiseSchedule) -> Result<f64> {
    if t > schedule.total_steps() {
        return Err(Error::domain(format!("step {t} beyond schedule length {}", schedule.total_steps())));
    }
    Ok(snr_from_alpha_bar(schedule.alpha_bar(t)))
}

pub fn snr_from_alpha_bar(alpha_bar: f64) -> f64 {
    if alpha_bar >= 1.0 {
        f64::INFINITY
    } else {
        alpha_bar / (1.0 - alpha_bar)
    }
}
