use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::gp::GpState;
use crate::{Error, Result};

/// Axis-aligned search box for `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Default for ParamBox {
    fn default() -> Self {
        ParamBox { lo: [0.5, 0.5], hi: [10.0, 10.0] }
    }
}

impl ParamBox {
    pub fn validate(&self) -> Result<()> {
        for k in 0..2 {
            if !(self.lo[k] < self.hi[k]) || !self.lo[k].is_finite() || !self.hi[k].is_finite() {
                return Err(Error::config("parameter box needs finite lo < hi in both coordinates"));
            }
        }
        Ok(())
    }

    pub fn contains(&self, theta: &[f64; 2]) -> bool {
        (0..2).all(|k| theta[k] >= self.lo[k] && theta[k] <= self.hi[k])
    }

    pub fn clamp(&self, theta: [f64; 2]) -> [f64; 2] {
        [theta[0].clamp(self.lo[0], self.hi[0]), theta[1].clamp(self.lo[1], self.hi[1])]
    }

    pub fn width(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    /// `n × n` lattice including both edges, row-major in the first coordinate.
    pub fn grid(&self, n: usize) -> Vec<[f64; 2]> {
        let at = |k: usize, i: usize| {
            if n == 1 {
                0.5 * (self.lo[k] + self.hi[k])
            } else {
                self.lo[k] + self.width(k) * i as f64 / (n - 1) as f64
            }
        };
        (0..n).flat_map(|i| (0..n).map(move |j| [at(0, i), at(1, j)])).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        [rng.gen_range(self.lo[0]..=self.hi[0]), rng.gen_range(self.lo[1]..=self.hi[1])]
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected reduction below `f_best − xi` for a Gaussian with mean `mu` and sd `sigma`.
pub fn expected_improvement(mu: f64, sigma: f64, f_best: f64, xi: f64) -> f64 {
    let gain = f_best - xi - mu;
    if !(sigma > 0.0) {
        return gain.max(0.0);
    }
    let z = gain / sigma;
    (gain * normal_cdf(z) + sigma * normal_pdf(z)).max(0.0)
}

impl GpState {
    pub fn expected_improvement(&self, theta: &[f64; 2], f_best: f64, xi: f64) -> f64 {
        let (mu, var) = self.predict(theta);
        expected_improvement(mu, var.sqrt(), f_best, xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    Initial,
    Acquisition,
    /// EI vanished everywhere; a uniform draw was used.
    RandomFallback,
    Reevaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub theta: [f64; 2],
    pub ei: f64,
    pub kind: ProposalKind,
}

/// Search effort for EI maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionConfig {
    pub xi: f64,
    pub grid: usize,
    pub starts: usize,
    pub initial: [f64; 2],
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig { xi: 0.01, grid: 32, starts: 8, initial: [2.0, 2.0] }
    }
}

const EI_FLOOR: f64 = 1e-300;
const MAX_REFINE_ITERS: usize = 200;

/// Compass search from `start`, halving the step after a failed sweep.
fn refine(
    gp: &GpState,
    bounds: &ParamBox,
    start: [f64; 2],
    ei0: f64,
    f_best: f64,
    xi: f64,
    h0: [f64; 2],
) -> ([f64; 2], f64) {
    let (mut x, mut best) = (start, ei0);
    let mut h = h0;
    for _ in 0..MAX_REFINE_ITERS {
        let mut moved = false;
        for k in 0..2 {
            for sign in [1.0, -1.0] {
                let mut cand = x;
                cand[k] += sign * h[k];
                let cand = bounds.clamp(cand);
                if cand == x {
                    continue;
                }
                let v = gp.expected_improvement(&cand, f_best, xi);
                if v > best {
                    best = v;
                    x = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            h = [h[0] * 0.5, h[1] * 0.5];
            if h[0] < 1e-7 * bounds.width(0) && h[1] < 1e-7 * bounds.width(1) {
                break;
            }
        }
    }
    (x, best)
}

/// Next parameter to evaluate: the configured initial point with no model,
/// else the EI maximizer (grid scan plus compass refinement of the best grid
/// cells), else a uniform draw when EI is zero everywhere.
pub fn propose_next<R: Rng + ?Sized>(
    gp: Option<&GpState>,
    bounds: &ParamBox,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<Proposal> {
    let Some(gp) = gp else {
        return Ok(Proposal { theta: bounds.clamp(cfg.initial), ei: 0.0, kind: ProposalKind::Initial });
    };
    if cfg.grid < 2 {
        return Err(Error::config("acquisition grid needs at least 2 points per axis"));
    }
    let f_best = gp.best();
    let mut scored: Vec<([f64; 2], f64)> =
        bounds.grid(cfg.grid).into_iter().map(|p| (p, gp.expected_improvement(&p, f_best, cfg.xi))).collect();
    // stable: equal EI keeps grid order
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    if !(scored[0].1 > EI_FLOOR) {
        return Ok(Proposal { theta: bounds.sample(rng), ei: 0.0, kind: ProposalKind::RandomFallback });
    }
    let h0 = [bounds.width(0) / (cfg.grid - 1) as f64, bounds.width(1) / (cfg.grid - 1) as f64];
    let mut best = scored[0];
    for &(p, v) in scored.iter().take(cfg.starts.max(1)) {
        let (x, ei) = refine(gp, bounds, p, v, f_best, cfg.xi, h0);
        if ei > best.1 {
            best = (x, ei);
        }
    }
    Ok(Proposal { theta: best.0, ei: best.1, kind: ProposalKind::Acquisition })
}
