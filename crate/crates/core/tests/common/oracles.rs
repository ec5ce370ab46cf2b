//! Independent reference computations shared by the test suites.

use nalgebra::{DMatrix, DVector};
use physguide::bayes_opt::Observation;
use physguide::experts::{smooth_contact_count, ExpertConfig};
use physguide::se3::{Region, Rotation, StructureState};
use physguide::Vec3;

use super::max_abs_diff;

const H: f64 = 1e-5;

/// Central differences of `loss` over the coordinates of generated residues.
pub fn numeric_grad(state: &StructureState, loss: impl Fn(&StructureState) -> f64) -> Vec<Vec3> {
    let mut g = vec![Vec3::zeros(); state.len()];
    let mut s = state.clone();
    for i in 0..state.len() {
        if state.regions[i] == Region::Target {
            continue;
        }
        for k in 0..3 {
            let x = state.frames[i].trans[k];
            s.frames[i].trans[k] = x + H;
            let up = loss(&s);
            s.frames[i].trans[k] = x - H;
            let dn = loss(&s);
            s.frames[i].trans[k] = x;
            g[i][k] = (up - dn) / (2.0 * H);
        }
    }
    g
}

pub fn relative_error(analytic: &[Vec3], numeric: &[Vec3]) -> f64 {
    let scale = analytic.iter().map(|v| v.abs().max()).fold(0.0, f64::max);
    let diff = max_abs_diff(analytic, numeric);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Puts the contact count outside the comfortable range so the expert is active.
pub fn active_contact_cfg(state: &StructureState, base: &ExpertConfig, below: bool) -> ExpertConfig {
    let n = smooth_contact_count(state, base.d_c, base.kappa);
    let mut cfg = *base;
    if below {
        cfg.tau_minus = n + 3.0;
        cfg.tau_plus = n + 10.0;
    } else {
        cfg.tau_minus = (n - 10.0).max(0.0);
        cfg.tau_plus = n - 3.0;
    }
    cfg
}

/// Directional derivatives of `tr(R₀ᵀR)/σ²` along `R·exp(h·e_k)` by central differences.
pub fn numeric_manifold_gradient(rt: &Rotation, r0: &Rotation, sigma: f64, h: f64) -> Vec3 {
    let log_density = |r: &Rotation| (r0.matrix().transpose() * r.matrix()).trace() / (sigma * sigma);
    let mut g = Vec3::zeros();
    for k in 0..3 {
        let e = Vec3::ith(k, h);
        let up = log_density(&(*rt * Rotation::exp(&e)));
        let dn = log_density(&(*rt * Rotation::exp(&-e)));
        g[k] = (up - dn) / (2.0 * h);
    }
    g
}

/// Matérn-5/2 written from its definition, `(1 + √5r/ℓ + 5r²/3ℓ²)·exp(−√5r/ℓ)`.
pub fn kernel(a: &[f64; 2], b: &[f64; 2], ls: f64) -> f64 {
    let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let s = 5f64.sqrt() * r / ls;
    (1.0 + s + 5.0 * r * r / (3.0 * ls * ls)) * (-s).exp()
}

pub struct Dense {
    pub mean: f64,
    pub scale: f64,
    pub inv: DMatrix<f64>,
    pub alpha: DVector<f64>,
    pub x: Vec<[f64; 2]>,
    pub ls: f64,
    pub lml: f64,
}

/// GP posterior by explicit matrix inverse on standardized targets.
pub fn dense_gp(obs: &[Observation], ls: f64, noise: f64) -> Dense {
    let n = obs.len();
    let y: Vec<f64> = obs.iter().map(|o| o.loss).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let scale = if sd > 1e-12 { sd } else { 1.0 };
    let k = DMatrix::from_fn(n, n, |i, j| {
        kernel(&obs[i].theta, &obs[j].theta, ls) + if i == j { noise / obs[i].count as f64 } else { 0.0 }
    });
    let ys = DVector::from_iterator(n, y.iter().map(|v| (v - mean) / scale));
    let inv = k.clone().try_inverse().unwrap();
    let alpha = &inv * &ys;
    let lml = -0.5 * ys.dot(&alpha) - 0.5 * k.determinant().ln() - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    Dense { mean, scale, inv, alpha, x: obs.iter().map(|o| o.theta).collect(), ls, lml }
}

impl Dense {
    pub fn predict(&self, th: &[f64; 2]) -> (f64, f64) {
        let ks = DVector::from_iterator(self.x.len(), self.x.iter().map(|x| kernel(x, th, self.ls)));
        let mu = self.mean + self.scale * ks.dot(&self.alpha);
        let var = (1.0 - (ks.transpose() * &self.inv * &ks)[(0, 0)]) * self.scale * self.scale;
        (mu, var)
    }
}
