//! Physics experts.
//!
//! Each expert maps a [`StructureState`] to a nonnegative loss and the
//! gradient of that loss with respect to residue translations. All four are
//! built from pairwise distances only, so the gradients rotate with the
//! structure and ignore global translations.
//!
//! Target residues are fixed context: they can appear in a loss but never
//! receive gradient.

use serde::{Deserialize, Serialize};

use crate::se3::{Region, StructureState};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpertId {
    Vdw,
    Recognition,
    Energy,
    Interface,
}

impl ExpertId {
    pub const ALL: [ExpertId; 4] = [ExpertId::Vdw, ExpertId::Recognition, ExpertId::Energy, ExpertId::Interface];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ExpertId::Vdw => "vdw",
            ExpertId::Recognition => "recognition",
            ExpertId::Energy => "energy",
            ExpertId::Interface => "interface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertStatus {
    Ok,
    /// The expert had nothing to act on (e.g. no interface residues).
    EmptySupport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertGradient {
    pub expert: ExpertId,
    pub loss: f64,
    pub grad: Vec<Vec3>,
    pub status: ExpertStatus,
}

impl ExpertGradient {
    fn zero(expert: ExpertId, n: usize, status: ExpertStatus) -> Self {
        ExpertGradient { expert, loss: 0.0, grad: vec![Vec3::zeros(); n], status }
    }

    pub fn max_norm(&self) -> f64 {
        self.grad.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpertConfig {
    /// Clash threshold (Å).
    pub r_clash: f64,
    /// Interface pair cutoff (Å).
    pub d_cutoff: f64,
    /// A hotspot is covered when its nearest CDR residue is within this distance (Å).
    pub coverage_dist: f64,
    /// Contact-count target range `[tau_minus, tau_plus]`.
    pub tau_minus: f64,
    pub tau_plus: f64,
    /// Contact distance threshold (Å).
    pub d_c: f64,
    /// Width of the smooth count/indicator ramps (Å).
    pub kappa: f64,
    pub w_u: f64,
    pub w_c: f64,
    pub r_neighbor: f64,
    pub n_threshold: f64,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        ExpertConfig {
            r_clash: 2.8,
            d_cutoff: 8.0,
            coverage_dist: 8.0,
            tau_minus: 8.0,
            tau_plus: 25.0,
            d_c: 8.0,
            kappa: 0.5,
            w_u: 1.0,
            w_c: 1.0,
            r_neighbor: 8.0,
            n_threshold: 4.0,
        }
    }
}

impl ExpertConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_clash > 0.0) {
            return Err(Error::config("r_clash must be positive"));
        }
        if !(self.tau_minus <= self.tau_plus) {
            return Err(Error::config("tau_minus must not exceed tau_plus"));
        }
        if !(self.w_u >= 0.0 && self.w_c >= 0.0) {
            return Err(Error::config("geometry weights must be nonnegative"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::config("kappa must be positive"));
        }
        for (name, v) in [
            ("d_cutoff", self.d_cutoff),
            ("coverage_dist", self.coverage_dist),
            ("d_c", self.d_c),
            ("r_neighbor", self.r_neighbor),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Distance and unit direction `(x_i − x_j)/d`; coincident points use the x axis.
pub(crate) fn separation(xi: &Vec3, xj: &Vec3) -> (f64, Vec3) {
    let diff = xi - xj;
    let d = diff.norm();
    if d > 0.0 {
        (d, diff / d)
    } else {
        (0.0, Vec3::x())
    }
}

/// Unordered pairs scored by the clash expert: both in CDR ∪ target, not both target.
pub(crate) fn clash_pairs(state: &StructureState) -> Vec<(usize, usize)> {
    let idx: Vec<usize> =
        (0..state.len()).filter(|&i| matches!(state.regions[i], Region::Cdr | Region::Target)).collect();
    let mut pairs = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            if state.regions[i] == Region::Target && state.regions[j] == Region::Target {
                continue;
            }
            pairs.push((i, j));
        }
    }
    pairs
}

fn zero_targets(state: &StructureState, grad: &mut [Vec3]) {
    for (g, r) in grad.iter_mut().zip(&state.regions) {
        if *r == Region::Target {
            *g = Vec3::zeros();
        }
    }
}

/// Steric clash hinge `Σ max(0, r_clash − d_ij)²`.
pub fn vdw_loss_grad(state: &StructureState, cfg: &ExpertConfig) -> Result<ExpertGradient> {
    let n = state.len();
    let pairs = clash_pairs(state);
    if pairs.is_empty() {
        return Err(Error::contract("clash expert needs at least two residues in CDR ∪ target"));
    }
    let mut out = ExpertGradient::zero(ExpertId::Vdw, n, ExpertStatus::Ok);
    for (i, j) in pairs {
        let (d, dir) = separation(&state.frames[i].trans, &state.frames[j].trans);
        let gap = cfg.r_clash - d;
        if gap <= 0.0 {
            continue;
        }
        out.loss += gap * gap;
        // ∂/∂x_i (r − d)² = −2(r − d)·(x_i − x_j)/d
        let g = dir * (-2.0 * gap);
        out.grad[i] += g;
        out.grad[j] -= g;
    }
    zero_targets(state, &mut out.grad);
    Ok(out)
}

/// Per-hotspot nearest CDR residue: `(hotspot, cdr, squared distance)`.
/// Ties go to the lowest CDR index.
pub(crate) fn nearest_cdr(state: &StructureState) -> Result<Vec<(usize, usize, f64)>> {
    let cdr = state.indices(Region::Cdr);
    if cdr.is_empty() {
        return Err(Error::contract("recognition expert needs at least one CDR residue"));
    }
    Ok(state
        .hotspots
        .iter()
        .map(|&h| {
            let xh = state.frames[h].trans;
            let mut best = (cdr[0], (state.frames[cdr[0]].trans - xh).norm_squared());
            for &c in &cdr[1..] {
                let d2 = (state.frames[c].trans - xh).norm_squared();
                if d2 < best.1 {
                    best = (c, d2);
                }
            }
            (h, best.0, best.1)
        })
        .collect())
}

/// Hotspot attraction. The loss sums the squared nearest-CDR distance over
/// every hotspot; the gradient only pulls on hotspots farther than
/// `coverage_dist`, so the two agree only on the uncovered subset (see
/// [`hotspot_uncovered_loss`]).
pub fn hotspot_loss_grad(state: &StructureState, cfg: &ExpertConfig) -> Result<ExpertGradient> {
    let n = state.len();
    let nearest = nearest_cdr(state)?;
    if nearest.is_empty() {
        return Ok(ExpertGradient::zero(ExpertId::Recognition, n, ExpertStatus::EmptySupport));
    }
    let cover2 = cfg.coverage_dist * cfg.coverage_dist;
    let mut out = ExpertGradient::zero(ExpertId::Recognition, n, ExpertStatus::Ok);
    for (h, c, d2) in nearest {
        out.loss += d2;
        if d2 > cover2 {
            out.grad[c] += (state.frames[c].trans - state.frames[h].trans) * 2.0;
        }
    }
    zero_targets(state, &mut out.grad);
    Ok(out)
}

/// `Σ_{h uncovered} min_c ‖x_h − x_c‖²`, the loss whose gradient
/// [`hotspot_loss_grad`] returns.
pub fn hotspot_uncovered_loss(state: &StructureState, cfg: &ExpertConfig) -> Result<f64> {
    let cover2 = cfg.coverage_dist * cfg.coverage_dist;
    Ok(nearest_cdr(state)?.into_iter().map(|(_, _, d2)| d2).filter(|d2| *d2 > cover2).sum())
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Logistic-smoothed CDR–target contact count `Σ σ((d_c − d_ij)/κ)`.
pub fn smooth_contact_count(state: &StructureState, d_c: f64, kappa: f64) -> f64 {
    let cdr = state.indices(Region::Cdr);
    let target = state.indices(Region::Target);
    let mut n = 0.0;
    for &i in &cdr {
        for &j in &target {
            let d = (state.frames[i].trans - state.frames[j].trans).norm();
            n += logistic((d_c - d) / kappa);
        }
    }
    n
}

/// Hard CDR–target contact count with `d_ij < d_c`.
pub fn hard_contact_count(state: &StructureState, d_c: f64) -> usize {
    let cdr = state.indices(Region::Cdr);
    let target = state.indices(Region::Target);
    cdr.iter()
        .flat_map(|&i| target.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| (state.frames[i].trans - state.frames[j].trans).norm() < d_c)
        .count()
}

/// Quadratic hinge outside `[tau_minus, tau_plus]`; returns `(loss, dloss/dn)`.
pub fn contact_penalty(count: f64, tau_minus: f64, tau_plus: f64) -> (f64, f64) {
    if count < tau_minus {
        let gap = tau_minus - count;
        (gap * gap, -2.0 * gap)
    } else if count > tau_plus {
        let gap = count - tau_plus;
        (gap * gap, 2.0 * gap)
    } else {
        (0.0, 0.0)
    }
}

/// Contact-density expert on the smooth count.
pub fn contact_loss_grad(state: &StructureState, cfg: &ExpertConfig) -> Result<ExpertGradient> {
    if cfg.tau_minus > cfg.tau_plus {
        return Err(Error::config("tau_minus must not exceed tau_plus"));
    }
    let n = state.len();
    let count = smooth_contact_count(state, cfg.d_c, cfg.kappa);
    let (loss, dl_dn) = contact_penalty(count, cfg.tau_minus, cfg.tau_plus);
    let mut out = ExpertGradient::zero(ExpertId::Energy, n, ExpertStatus::Ok);
    out.loss = loss;
    if dl_dn == 0.0 {
        return Ok(out);
    }
    let cdr = state.indices(Region::Cdr);
    let target = state.indices(Region::Target);
    for &i in &cdr {
        for &j in &target {
            let (d, dir) = separation(&state.frames[i].trans, &state.frames[j].trans);
            let s = logistic((cfg.d_c - d) / cfg.kappa);
            let ds_dd = -s * (1.0 - s) / cfg.kappa;
            let g = dir * (dl_dn * ds_dd);
            out.grad[i] += g;
            out.grad[j] -= g;
        }
    }
    zero_targets(state, &mut out.grad);
    Ok(out)
}

/// C¹ ramp: 1 for `u ≥ 1`, 0 for `u ≤ 0`, `3u² − 2u³` between. Returns `(value, derivative)`.
fn ramp(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0)
    } else {
        (u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u))
    }
}

/// Residues with at least one cross-chain (antibody–target) partner closer than `d_cutoff`.
pub fn interface_residues(state: &StructureState, d_cutoff: f64) -> Vec<usize> {
    let ab = state.antibody_indices();
    let ag = state.indices(Region::Target);
    let mut flag = vec![false; state.len()];
    for &i in &ab {
        for &j in &ag {
            if (state.frames[i].trans - state.frames[j].trans).norm() < d_cutoff {
                flag[i] = true;
                flag[j] = true;
            }
        }
    }
    (0..state.len()).filter(|&i| flag[i]).collect()
}

/// Uniformity and cavity terms of the interface expert, with their gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceTerms {
    pub interface: Vec<usize>,
    pub cv: f64,
    pub cavity: f64,
    pub grad_cv: Vec<Vec3>,
    pub grad_cavity: Vec<Vec3>,
}

/// Coefficient of variation (population σ over mean) of interface pair
/// distances below `d_cutoff`, and the smoothed fraction of interface residues
/// with fewer than `n_threshold` neighbours within `r_neighbor`.
///
/// The neighbour weight ramps from 1 at `r_neighbor − κ` to 0 at
/// `r_neighbor`; the indicator ramps from 1 at `n_threshold − 1` to 0 at
/// `n_threshold`, so integer counts reproduce the hard indicator exactly.
pub fn interface_terms(state: &StructureState, cfg: &ExpertConfig) -> InterfaceTerms {
    let n = state.len();
    let x: Vec<Vec3> = state.positions();
    let interface = interface_residues(state, cfg.d_cutoff);
    let mut grad_cv = vec![Vec3::zeros(); n];
    let mut grad_cavity = vec![Vec3::zeros(); n];

    let mut pairs = Vec::new();
    for (a, &i) in interface.iter().enumerate() {
        for &j in &interface[a + 1..] {
            let (d, dir) = separation(&x[i], &x[j]);
            if d < cfg.d_cutoff {
                pairs.push((i, j, d, dir));
            }
        }
    }
    let mut cv = 0.0;
    if pairs.len() >= 2 {
        let m = pairs.len() as f64;
        let mean = pairs.iter().map(|p| p.2).sum::<f64>() / m;
        let var = pairs.iter().map(|p| (p.2 - mean).powi(2)).sum::<f64>() / m;
        let sd = var.sqrt();
        if mean > 0.0 {
            cv = sd / mean;
        }
        if sd > 1e-12 * mean && mean > 0.0 {
            for &(i, j, d, dir) in &pairs {
                let dcv = ((d - mean) / (sd * mean) - sd / (mean * mean)) / m;
                grad_cv[i] += dir * dcv;
                grad_cv[j] -= dir * dcv;
            }
        }
    }

    let mut cavity = 0.0;
    if !interface.is_empty() {
        let inv = 1.0 / interface.len() as f64;
        for &i in &interface {
            let mut count = 0.0;
            let mut contrib = Vec::new();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (d, dir) = separation(&x[i], &x[j]);
                let (w, dw) = ramp((cfg.r_neighbor - d) / cfg.kappa);
                count += w;
                if dw != 0.0 {
                    // d(weight)/d(x_i) = −dw/κ · dir
                    contrib.push((j, dir * (-dw / cfg.kappa)));
                }
            }
            let (ind, dind) = ramp(cfg.n_threshold - count);
            cavity += ind * inv;
            if dind != 0.0 {
                // d(ind)/d(count) = −dind
                let scale = -dind * inv;
                for (j, g) in contrib {
                    grad_cavity[i] += g * scale;
                    grad_cavity[j] -= g * scale;
                }
            }
        }
    }
    zero_targets(state, &mut grad_cv);
    zero_targets(state, &mut grad_cavity);
    InterfaceTerms { interface, cv, cavity, grad_cv, grad_cavity }
}

/// Interface-geometry expert `w_u·CV + w_c·cavity`.
pub fn interface_loss_grad(state: &StructureState, cfg: &ExpertConfig) -> Result<ExpertGradient> {
    let n = state.len();
    let terms = interface_terms(state, cfg);
    if terms.interface.is_empty() {
        return Ok(ExpertGradient::zero(ExpertId::Interface, n, ExpertStatus::EmptySupport));
    }
    let grad = terms.grad_cv.iter().zip(&terms.grad_cavity).map(|(u, c)| u * cfg.w_u + c * cfg.w_c).collect();
    Ok(ExpertGradient {
        expert: ExpertId::Interface,
        loss: cfg.w_u * terms.cv + cfg.w_c * terms.cavity,
        grad,
        status: ExpertStatus::Ok,
    })
}

pub fn evaluate(expert: ExpertId, state: &StructureState, cfg: &ExpertConfig) -> Result<ExpertGradient> {
    match expert {
        ExpertId::Vdw => vdw_loss_grad(state, cfg),
        ExpertId::Recognition => hotspot_loss_grad(state, cfg),
        ExpertId::Energy => contact_loss_grad(state, cfg),
        ExpertId::Interface => interface_loss_grad(state, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(points: &[[f64; 3]], regions: &[Region], hotspots: &[usize]) -> StructureState {
        let p: Vec<Vec3> = points.iter().map(|a| Vec3::new(a[0], a[1], a[2])).collect();
        StructureState::from_positions(&p, regions.to_vec(), hotspots.to_vec()).unwrap()
    }

    #[test]
    fn vdw_inactive_beyond_threshold() {
        let s = state(
            &[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 5.0, 0.0]],
            &[Region::Cdr, Region::Cdr, Region::Target],
            &[],
        );
        let e = vdw_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert_eq!(e.loss, 0.0);
        assert!(e.grad.iter().all(|g| *g == Vec3::zeros()));
    }

    #[test]
    fn vdw_single_pair_by_hand() {
        let s = state(&[[0.0, 0.0, 0.0], [1.8, 0.0, 0.0]], &[Region::Cdr, Region::Cdr], &[]);
        let e = vdw_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert!((e.loss - 1.0).abs() < 1e-12);
        // ∂L/∂x_0 = −2(1.0)·(x_0 − x_1)/1.8 = +2 along x
        assert!((e.grad[0] - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((e.grad[1] + e.grad[0]).norm() < 1e-12);
    }

    #[test]
    fn vdw_coincident_points_are_finite() {
        let s = state(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]], &[Region::Cdr, Region::Cdr], &[]);
        let e = vdw_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert!((e.loss - 2.8 * 2.8).abs() < 1e-12);
        assert!((e.grad[0] - Vec3::new(-5.6, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn vdw_ignores_target_pairs_and_framework() {
        let s = state(
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [20.0, 0.0, 0.0]],
            &[Region::Target, Region::Target, Region::Framework, Region::Cdr],
            &[],
        );
        let e = vdw_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert_eq!(e.loss, 0.0);
        let lone = state(&[[0.0, 0.0, 0.0]], &[Region::Cdr], &[]);
        assert!(matches!(vdw_loss_grad(&lone, &ExpertConfig::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn hotspot_by_hand() {
        let cfg = ExpertConfig { coverage_dist: 2.0, ..Default::default() };
        let s = state(
            &[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 5.0, 0.0]],
            &[Region::Target, Region::Cdr, Region::Cdr],
            &[0],
        );
        let e = hotspot_loss_grad(&s, &cfg).unwrap();
        assert!((e.loss - 9.0).abs() < 1e-12);
        assert_eq!(e.grad[1], Vec3::new(6.0, 0.0, 0.0));
        assert_eq!(e.grad[2], Vec3::zeros());
        assert_eq!(e.grad[0], Vec3::zeros());
    }

    #[test]
    fn hotspot_covered_has_zero_grad_but_loss() {
        let s = state(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]], &[Region::Target, Region::Cdr], &[0]);
        let e = hotspot_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert!((e.loss - 9.0).abs() < 1e-12);
        assert!(e.grad.iter().all(|g| *g == Vec3::zeros()));
    }

    #[test]
    fn hotspot_tie_picks_lowest_index() {
        let cfg = ExpertConfig { coverage_dist: 1.0, ..Default::default() };
        let s = state(
            &[[0.0, 0.0, 0.0], [0.0, 4.0, 0.0], [4.0, 0.0, 0.0]],
            &[Region::Target, Region::Cdr, Region::Cdr],
            &[0],
        );
        let e = hotspot_loss_grad(&s, &cfg).unwrap();
        assert_ne!(e.grad[1], Vec3::zeros());
        assert_eq!(e.grad[2], Vec3::zeros());
    }

    #[test]
    fn hotspot_requires_cdr() {
        let s = state(&[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]], &[Region::Target, Region::Framework], &[0]);
        assert!(matches!(hotspot_loss_grad(&s, &ExpertConfig::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn contact_penalty_arithmetic() {
        assert_eq!(contact_penalty(3.0, 5.0, 9.0), (4.0, -4.0));
        assert_eq!(contact_penalty(6.0, 5.0, 9.0), (0.0, 0.0));
        assert_eq!(contact_penalty(11.0, 5.0, 9.0), (4.0, 4.0));
    }

    #[test]
    fn contact_in_range_is_flat() {
        let cfg = ExpertConfig { tau_minus: 0.0, tau_plus: 100.0, ..Default::default() };
        let s = state(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]], &[Region::Target, Region::Cdr], &[]);
        let e = contact_loss_grad(&s, &cfg).unwrap();
        assert_eq!(e.loss, 0.0);
        assert!(e.grad.iter().all(|g| *g == Vec3::zeros()));
    }

    #[test]
    fn cv_of_two_distances() {
        // interface pairs at 4 and 6 Å: σ = 1, μ = 5
        let cfg = ExpertConfig { d_cutoff: 6.5, r_neighbor: 1.0, ..Default::default() };
        let s = state(
            &[[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [-6.0, 0.0, 0.0]],
            &[Region::Target, Region::Cdr, Region::Cdr],
            &[],
        );
        let t = interface_terms(&s, &cfg);
        assert_eq!(t.interface, vec![0, 1, 2]);
        assert!((t.cv - 0.2).abs() < 1e-12);
    }

    #[test]
    fn equal_distances_have_zero_cv_and_well_packed_no_cavity() {
        // equilateral triangle: all three pairs equal, each residue has 2 neighbours
        let h = 3f64.sqrt() / 2.0 * 4.0;
        let cfg = ExpertConfig { n_threshold: 2.0, ..Default::default() };
        let s =
            state(&[[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [2.0, h, 0.0]], &[Region::Target, Region::Cdr, Region::Cdr], &[]);
        let t = interface_terms(&s, &cfg);
        assert!(t.cv.abs() < 1e-12);
        assert_eq!(t.cavity, 0.0);
        let e = interface_loss_grad(&s, &cfg).unwrap();
        assert!(e.loss.abs() < 1e-12);
    }

    #[test]
    fn single_interface_pair_has_zero_uniformity() {
        let s = state(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]], &[Region::Target, Region::Cdr], &[]);
        let t = interface_terms(&s, &ExpertConfig::default());
        assert_eq!(t.cv, 0.0);
        assert!(t.grad_cv.iter().all(|g| *g == Vec3::zeros()));
    }

    #[test]
    fn empty_interface_is_flagged() {
        let s = state(&[[0.0, 0.0, 0.0], [50.0, 0.0, 0.0]], &[Region::Target, Region::Cdr], &[]);
        let e = interface_loss_grad(&s, &ExpertConfig::default()).unwrap();
        assert_eq!(e.status, ExpertStatus::EmptySupport);
        assert_eq!(e.loss, 0.0);
    }
}
