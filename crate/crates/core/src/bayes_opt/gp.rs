use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Jitter added to the diagonal on successive Cholesky retries.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// One (possibly aggregated) evaluation of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub theta: [f64; 2],
    pub loss: f64,
    /// Number of raw evaluations behind this point; divides the noise variance.
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

impl Observation {
    pub fn new(theta: [f64; 2], loss: f64) -> Self {
        Observation { theta, loss, count: 1 }
    }
}

pub fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Matérn-5/2 correlation, `k(0) = 1`.
pub fn matern52(r: f64, length_scale: f64) -> f64 {
    let s = 5f64.sqrt() * r / length_scale;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// Fitted GP posterior over a 2-D parameter.
///
/// Losses are standardized before fitting; `noise` is the observation noise
/// variance in standardized units.
#[derive(Debug, Clone)]
pub struct GpState {
    x: Vec<[f64; 2]>,
    y: Vec<f64>,
    length_scale: f64,
    noise: f64,
    jitter: f64,
    y_mean: f64,
    y_scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

pub fn gp_fit(observations: &[Observation], length_scale: f64, noise: f64) -> Result<GpState> {
    if observations.is_empty() {
        return Err(Error::contract("GP fit needs at least one observation"));
    }
    if !(length_scale > 0.0) || !(noise >= 0.0) {
        return Err(Error::domain(format!("invalid kernel: length scale {length_scale}, noise {noise}")));
    }
    if observations.iter().any(|o| !o.loss.is_finite() || o.count == 0) {
        return Err(Error::contract("observations need finite losses and positive counts"));
    }
    let n = observations.len();
    let x: Vec<[f64; 2]> = observations.iter().map(|o| o.theta).collect();
    let y: Vec<f64> = observations.iter().map(|o| o.loss).collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let y_scale = if sd > 1e-12 { sd } else { 1.0 };

    let mut k = DMatrix::from_fn(n, n, |i, j| matern52(distance(&x[i], &x[j]), length_scale));
    for (i, o) in observations.iter().enumerate() {
        k[(i, i)] += noise / o.count as f64;
    }
    let mut fitted = None;
    for jitter in JITTER_LADDER {
        let mut kj = k.clone();
        for i in 0..n {
            kj[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(kj) {
            fitted = Some((c, jitter));
            break;
        }
    }
    let (chol, jitter) = fitted.ok_or_else(|| {
        Error::Numerical(format!("kernel matrix not positive definite even with jitter {}", JITTER_LADDER[5]))
    })?;
    let ys = DVector::from_iterator(n, y.iter().map(|v| (v - y_mean) / y_scale));
    let alpha = chol.solve(&ys);
    Ok(GpState { x, y, length_scale, noise, jitter, y_mean, y_scale, chol, alpha })
}

impl GpState {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Diagonal jitter the fit needed (0 when none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn inputs(&self) -> &[[f64; 2]] {
        &self.x
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    /// Smallest training target.
    pub fn best(&self) -> f64 {
        self.y.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn cross(&self, theta: &[f64; 2]) -> DVector<f64> {
        DVector::from_iterator(self.x.len(), self.x.iter().map(|xi| matern52(distance(xi, theta), self.length_scale)))
    }

    /// Posterior mean and variance of the latent loss.
    pub fn predict(&self, theta: &[f64; 2]) -> (f64, f64) {
        let ks = self.cross(theta);
        let mean = self.y_mean + self.y_scale * ks.dot(&self.alpha);
        let v = self.chol.l_dirty().solve_lower_triangular(&ks).expect("Cholesky factor has a nonzero diagonal");
        let var = (1.0 - v.norm_squared()).max(0.0) * self.y_scale * self.y_scale;
        (mean, var)
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.x.len() as f64;
        let ys = DVector::from_iterator(self.y.len(), self.y.iter().map(|v| (v - self.y_mean) / self.y_scale));
        let log_det: f64 = self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        -0.5 * ys.dot(&self.alpha) - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Length-scale and noise grid searched by [`select_hyperparameters`].
pub const LENGTH_SCALE_GRID: [f64; 7] = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0];
pub const NOISE_GRID: [f64; 6] = [1e-3, 0.01, 0.03, 0.1, 0.3, 1.0];

/// Grid maximizer of the log marginal likelihood; ties keep the earlier grid point.
pub fn select_hyperparameters(observations: &[Observation]) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for &ls in &LENGTH_SCALE_GRID {
        for &noise in &NOISE_GRID {
            let Ok(gp) = gp_fit(observations, ls, noise) else { continue };
            let lml = gp.log_marginal_likelihood();
            if lml.is_finite() && best.is_none_or(|b| lml > b.0) {
                best = Some((lml, ls, noise));
            }
        }
    }
    best.map(|b| (b.1, b.2)).ok_or_else(|| Error::Numerical("no hyperparameter setting gave a valid fit".into()))
}
