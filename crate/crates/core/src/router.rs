//! Severity scores and severity-proportional expert weights.

use serde::{Deserialize, Serialize};

use crate::experts::{self, ExpertConfig, ExpertId};
use crate::se3::StructureState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RouterConfig {
    /// Experts with severity at or below this are inactive.
    pub theta_min: f64,
    /// Centre of the contact-count range; `None` uses the midpoint of `[tau_minus, tau_plus]`.
    pub n_target: Option<f64>,
    /// Per-expert multipliers applied before clamping, ordered as [`ExpertId::ALL`].
    pub scale: [f64; 4],
    /// Recompute severities every `stride` evaluated steps.
    pub stride: usize,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig { theta_min: 0.1, n_target: None, scale: [1.0; 4], stride: 1 }
    }
}

impl RouterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta_min) {
            return Err(Error::config("theta_min must lie in [0, 1)"));
        }
        if self.scale.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::config("severity scale factors must be nonnegative"));
        }
        if self.stride == 0 {
            return Err(Error::config("severity stride must be at least 1"));
        }
        if let Some(n) = self.n_target {
            if !(n > 0.0) {
                return Err(Error::config("n_target must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityReport {
    pub s: [f64; 4],
    pub w: [f64; 4],
    pub activated: Vec<ExpertId>,
}

impl SeverityReport {
    pub fn weight(&self, id: ExpertId) -> f64 {
        self.w[id.index()]
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Raw severities in `[0, 1]` for each expert, ordered as [`ExpertId::ALL`].
pub fn compute_severities(state: &StructureState, cfg: &RouterConfig, expert_cfg: &ExpertConfig) -> Result<[f64; 4]> {
    let x = state.positions();

    let d_min =
        experts::clash_pairs(state).into_iter().map(|(i, j)| (x[i] - x[j]).norm()).fold(f64::INFINITY, f64::min);
    let vdw = if d_min.is_finite() { clamp01((expert_cfg.r_clash - d_min).max(0.0) / expert_cfg.r_clash) } else { 0.0 };

    let recognition = if state.hotspots.is_empty() {
        0.0
    } else {
        let cover2 = expert_cfg.coverage_dist * expert_cfg.coverage_dist;
        let nearest = experts::nearest_cdr(state)?;
        let uncovered = nearest.iter().filter(|(_, _, d2)| *d2 > cover2).count();
        uncovered as f64 / state.hotspots.len() as f64
    };

    let n_c = experts::hard_contact_count(state, expert_cfg.d_c) as f64;
    let contact = if n_c < expert_cfg.tau_minus || n_c > expert_cfg.tau_plus {
        let n_target = cfg.n_target.unwrap_or(0.5 * (expert_cfg.tau_minus + expert_cfg.tau_plus));
        if n_target > 0.0 {
            clamp01((n_c - n_target).abs() / n_target)
        } else {
            1.0
        }
    } else {
        0.0
    };

    let interface = {
        let terms = experts::interface_terms(state, expert_cfg);
        if terms.interface.is_empty() {
            0.0
        } else {
            0.5 * clamp01(terms.cv / 0.5) + 0.5 * hard_cavity_fraction(state, &terms.interface, expert_cfg)
        }
    };

    let raw = [vdw, recognition, contact, interface];
    let mut s = [0.0; 4];
    for k in 0..4 {
        s[k] = clamp01(raw[k] * cfg.scale[k]);
    }
    Ok(s)
}

/// Fraction of `interface` residues with fewer than `n_threshold` residues within `r_neighbor`.
pub fn hard_cavity_fraction(state: &StructureState, interface: &[usize], cfg: &ExpertConfig) -> f64 {
    if interface.is_empty() {
        return 0.0;
    }
    let x = state.positions();
    let sparse = interface
        .iter()
        .filter(|&&i| {
            let count = (0..x.len()).filter(|&j| j != i && (x[i] - x[j]).norm() < cfg.r_neighbor).count();
            (count as f64) < cfg.n_threshold
        })
        .count();
    sparse as f64 / interface.len() as f64
}

/// `w_i = s_i / Σ_{s_j > θ} s_j` for activated experts, 0 otherwise.
pub fn route_weights(s: [f64; 4], theta_min: f64) -> SeverityReport {
    let activated: Vec<ExpertId> = ExpertId::ALL.into_iter().filter(|e| s[e.index()] > theta_min).collect();
    let total: f64 = activated.iter().map(|e| s[e.index()]).sum();
    let mut w = [0.0; 4];
    if total > 0.0 {
        for e in &activated {
            w[e.index()] = s[e.index()] / total;
        }
    }
    SeverityReport { s, w, activated }
}

/// Severities followed by routing.
pub fn route(state: &StructureState, cfg: &RouterConfig, expert_cfg: &ExpertConfig) -> Result<SeverityReport> {
    Ok(route_weights(compute_severities(state, cfg, expert_cfg)?, cfg.theta_min))
}
