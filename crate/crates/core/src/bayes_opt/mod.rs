//! Online tuning of the shared Beta shape `(alpha, beta)`.
//!
//! A Matérn-5/2 Gaussian process models the composite loss over the
//! parameter box. Noisy repeats are pooled by neighbourhood aggregation
//! before fitting, kernel hyperparameters are re-selected by marginal
//! likelihood every few observations, and the next point maximizes expected
//! improvement.

mod acquisition;
mod aggregate;
mod gp;
mod objective;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use acquisition::{
    expected_improvement, normal_cdf, normal_pdf, propose_next, AcquisitionConfig, ParamBox, Proposal, ProposalKind,
};
pub use aggregate::{aggregate_neighborhood, reevaluation_due};
pub use gp::{
    distance, gp_fit, matern52, select_hyperparameters, GpState, Observation, JITTER_LADDER, LENGTH_SCALE_GRID,
    NOISE_GRID,
};
pub use objective::{rescaled_branin, SyntheticObjective, BRANIN_MINIMIZERS_UNIT};

use crate::{Error, Result};

/// `Σ ω_m · metric_m / ν_m`.
pub fn composite_loss(metrics: &[f64], weights: &[f64], normalizers: &[f64]) -> Result<f64> {
    if metrics.len() != weights.len() || metrics.len() != normalizers.len() {
        return Err(Error::contract(format!(
            "composite loss needs matching lengths, got {}/{}/{}",
            metrics.len(),
            weights.len(),
            normalizers.len()
        )));
    }
    if normalizers.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::domain("normalizers must be positive"));
    }
    let loss: f64 = metrics.iter().zip(weights).zip(normalizers).map(|((m, w), v)| w * m / v).sum();
    if !loss.is_finite() {
        return Err(Error::Numerical("composite loss is not finite".into()));
    }
    Ok(loss)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoConfig {
    pub bounds: ParamBox,
    /// Initial kernel length scale (parameter units).
    pub length_scale: f64,
    /// Initial noise variance on standardized losses.
    pub noise: f64,
    /// Re-select kernel hyperparameters every this many raw observations; 0 disables.
    pub refit_every: usize,
    /// Aggregation radius in units of the initial length scale.
    pub aggregation_radius: f64,
    pub reeval_every: usize,
    pub reeval_fraction: f64,
    pub acquisition: AcquisitionConfig,
}

impl Default for BoConfig {
    fn default() -> Self {
        BoConfig {
            bounds: ParamBox::default(),
            length_scale: 2.0,
            noise: 0.3,
            refit_every: 10,
            aggregation_radius: 0.5,
            reeval_every: 50,
            reeval_fraction: 0.1,
            acquisition: AcquisitionConfig::default(),
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        if !(self.length_scale > 0.0) || !(self.noise >= 0.0) {
            return Err(Error::config("length_scale must be positive and noise nonnegative"));
        }
        if !(self.aggregation_radius > 0.0) {
            return Err(Error::config("aggregation_radius must be positive"));
        }
        if !(0.0..=1.0).contains(&self.reeval_fraction) {
            return Err(Error::config("reeval_fraction must lie in [0, 1]"));
        }
        if !(self.acquisition.xi >= 0.0) {
            return Err(Error::config("acquisition xi must be nonnegative"));
        }
        Ok(())
    }
}

/// History-driven optimizer. Every derived quantity (aggregated data, kernel
/// hyperparameters, posterior) is a function of the observation sequence, so
/// replaying a history reproduces the optimizer exactly.
#[derive(Debug, Clone)]
pub struct BayesOptimizer {
    cfg: BoConfig,
    history: Vec<Observation>,
    hyper: (f64, f64),
}

impl BayesOptimizer {
    pub fn new(cfg: BoConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(BayesOptimizer { cfg, history: Vec::new(), hyper: (cfg.length_scale, cfg.noise) })
    }

    pub fn config(&self) -> &BoConfig {
        &self.cfg
    }

    pub fn history(&self) -> &[Observation] {
        &self.history
    }

    /// Current `(length_scale, noise)`.
    pub fn hyperparameters(&self) -> (f64, f64) {
        self.hyper
    }

    pub fn observe(&mut self, theta: [f64; 2], loss: f64) -> Result<()> {
        if !loss.is_finite() {
            return Err(Error::Numerical(format!("non-finite loss at {theta:?}")));
        }
        self.history.push(Observation::new(theta, loss));
        let n = self.history.len();
        if self.cfg.refit_every > 0 && n.is_multiple_of(self.cfg.refit_every) {
            self.hyper = select_hyperparameters(&self.aggregated()?)?;
        }
        Ok(())
    }

    pub fn aggregated(&self) -> Result<Vec<Observation>> {
        let s = self.cfg.length_scale;
        aggregate_neighborhood(&self.history, self.cfg.aggregation_radius, [s, s])
    }

    /// GP on the aggregated history, or `None` before the first observation.
    pub fn fit(&self) -> Result<Option<GpState>> {
        if self.history.is_empty() {
            return Ok(None);
        }
        gp_fit(&self.aggregated()?, self.hyper.0, self.hyper.1).map(Some)
    }

    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Proposal> {
        let gp = self.fit()?;
        propose_next(gp.as_ref(), &self.cfg.bounds, &self.cfg.acquisition, rng)
    }

    /// Configurations due for re-evaluation at `iteration`.
    pub fn reevaluation(&self, iteration: usize) -> Result<Vec<[f64; 2]>> {
        let configs: Vec<[f64; 2]> = self.history.iter().map(|o| o.theta).collect();
        let gp = self.fit()?;
        Ok(reevaluation_due(
            iteration,
            self.cfg.reeval_every,
            self.cfg.reeval_fraction,
            &configs,
            gp.as_ref(),
            self.cfg.acquisition.xi,
        ))
    }

    /// Observed parameter with the lowest posterior mean.
    pub fn incumbent(&self) -> Result<Option<[f64; 2]>> {
        let Some(gp) = self.fit()? else { return Ok(None) };
        let mut best: Option<([f64; 2], f64)> = None;
        for o in &self.history {
            let m = gp.predict(&o.theta).0;
            if best.is_none_or(|b| m < b.1) {
                best = Some((o.theta, m));
            }
        }
        Ok(best.map(|b| b.0))
    }
}
