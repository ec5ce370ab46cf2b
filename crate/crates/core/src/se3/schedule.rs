use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Knobs for the default cosine schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub total_steps: usize,
    /// Offset `s` of the cosine schedule.
    pub cosine_offset: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { total_steps: 50, cosine_offset: 0.008, sigma_min: 0.02, sigma_max: 1.5 }
    }
}

/// Per-step signal retention `α_t`, cumulative `ᾱ_t` and rotation noise `σ_t`.
///
/// Vectors are indexed by timestep `0..=T`; index 0 is the clean state with
/// `α_0 = ᾱ_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    total: usize,
    alpha: Vec<f64>,
    alpha_bar: Vec<f64>,
    sigma: Vec<f64>,
}

impl NoiseSchedule {
    /// Cosine `ᾱ` schedule with per-step `1 − α_t` clipped to 0.999, and
    /// `σ_t = σ_min + (σ_max − σ_min)·t/T`.
    pub fn cosine(cfg: &ScheduleConfig) -> Result<Self> {
        let t_total = cfg.total_steps;
        if t_total < 1 {
            return Err(Error::config("schedule needs at least one step"));
        }
        if !(cfg.sigma_min > 0.0 && cfg.sigma_max >= cfg.sigma_min) {
            return Err(Error::config("require 0 < sigma_min <= sigma_max"));
        }
        if !(cfg.cosine_offset >= 0.0) {
            return Err(Error::config("cosine offset must be nonnegative"));
        }
        let s = cfg.cosine_offset;
        let f = |t: usize| {
            let x = (t as f64 / t_total as f64 + s) / (1.0 + s) * std::f64::consts::FRAC_PI_2;
            x.cos().powi(2)
        };
        let mut alpha = vec![1.0; t_total + 1];
        for t in 1..=t_total {
            let beta = (1.0 - f(t) / f(t - 1)).clamp(1e-8, 0.999);
            alpha[t] = 1.0 - beta;
        }
        let sigma = (0..=t_total)
            .map(|t| cfg.sigma_min + (cfg.sigma_max - cfg.sigma_min) * t as f64 / t_total as f64)
            .collect();
        Self::from_alphas(alpha, sigma)
    }

    /// Builds a schedule from explicit `α_0..=α_T` (with `α_0 = 1`) and `σ_0..=σ_T`.
    pub fn from_alphas(alpha: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 || alpha.len() != sigma.len() {
            return Err(Error::config("alpha and sigma must both have T+1 >= 2 entries"));
        }
        if alpha[0] != 1.0 {
            return Err(Error::config("alpha_0 must be 1"));
        }
        if alpha[1..].iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::config("alpha_t must lie in (0, 1) for t >= 1"));
        }
        if sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::config("sigma_t must be strictly positive"));
        }
        let mut alpha_bar = Vec::with_capacity(alpha.len());
        let mut acc = 1.0;
        for a in &alpha {
            acc *= a;
            alpha_bar.push(acc);
        }
        Ok(NoiseSchedule { total: alpha.len() - 1, alpha, alpha_bar, sigma })
    }

    pub fn total_steps(&self) -> usize {
        self.total
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha[t]
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t]
    }

    pub fn sigma(&self, t: usize) -> f64 {
        self.sigma[t]
    }
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        NoiseSchedule::cosine(&ScheduleConfig::default()).expect("default schedule is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_product_and_monotone() {
        let s = NoiseSchedule::default();
        assert_eq!(s.total_steps(), 50);
        let mut prod = 1.0;
        for t in 0..=50 {
            prod *= s.alpha(t);
            assert!((s.alpha_bar(t) - prod).abs() <= 1e-12);
            if t > 0 {
                assert!(s.alpha_bar(t) <= s.alpha_bar(t - 1));
            }
            assert!(s.sigma(t) > 0.0);
        }
        assert!((s.sigma(50) - 1.5).abs() < 1e-15);
        assert!((s.sigma(0) - 0.02).abs() < 1e-15);
        assert!(s.alpha_bar(50) < 1e-3);
    }

    #[test]
    fn rejects_bad_alphas() {
        assert!(NoiseSchedule::from_alphas(vec![1.0, 1.0], vec![0.1, 0.1]).is_err());
        assert!(NoiseSchedule::from_alphas(vec![1.0, 0.5], vec![0.1, 0.0]).is_err());
        assert!(NoiseSchedule::from_alphas(vec![0.9, 0.5], vec![0.1, 0.1]).is_err());
    }
}
