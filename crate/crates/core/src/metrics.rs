//! Structure metrics that need no folding network.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::experts::{self, ExpertConfig};
use crate::router::hard_cavity_fraction;
use crate::se3::{Region, Rotation, StructureState};
use crate::{Error, Mat3, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Hotspot coverage distance (Å).
    pub coverage_dist: f64,
    /// CDR–target contact distance for participation and contact counts (Å).
    pub contact_dist: f64,
    /// Interface cutoff (Å).
    pub interface_cutoff: f64,
    /// Preferred cross-chain spacing for the complementarity proxy (Å).
    pub contact_optimum: f64,
    /// Decay length of the complementarity gap penalty (Å).
    pub sc_lambda: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            coverage_dist: 8.0,
            contact_dist: 8.0,
            interface_cutoff: 8.0,
            contact_optimum: 6.0,
            sc_lambda: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// CDR RMSD after framework superposition; `None` without a reference.
    pub rmsd: Option<f64>,
    /// `None` when the structure has no hotspots.
    pub hotspot_coverage: Option<f64>,
    pub cdr_participation: f64,
    pub n_contacts: usize,
    pub sc_proxy: f64,
    pub uniformity_cv: f64,
    pub cavity_fraction: f64,
}

/// Least-squares rigid motion `x ↦ R·x + t` taking `mobile` onto `fixed`.
pub fn kabsch(mobile: &[Vec3], fixed: &[Vec3]) -> Result<(Rotation, Vec3)> {
    if mobile.len() != fixed.len() {
        return Err(Error::contract(format!("superposition sets differ in size: {} vs {}", mobile.len(), fixed.len())));
    }
    if mobile.len() < 3 {
        return Err(Error::Alignment(format!("need at least 3 points, got {}", mobile.len())));
    }
    let n = mobile.len() as f64;
    let cm = mobile.iter().sum::<Vec3>() / n;
    let cf = fixed.iter().sum::<Vec3>() / n;
    let mut h = Mat3::zeros();
    for (m, f) in mobile.iter().zip(fixed) {
        h += (m - cm) * (f - cf).transpose();
    }
    let spread = |pts: &[Vec3], c: &Vec3| {
        let mut cov = Mat3::zeros();
        for p in pts {
            cov += (p - c) * (p - c).transpose();
        }
        let sv = cov.symmetric_eigenvalues();
        let mut v = [sv[0], sv[1], sv[2]];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    for (pts, c) in [(mobile, &cm), (fixed, &cf)] {
        let ev = spread(pts, c);
        if !(ev[1] > 1e-10 * ev[0].max(1e-300)) {
            return Err(Error::Alignment("alignment points are collinear or coincident".into()));
        }
    }
    let svd = SVD::new(h, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD of the cross-covariance failed".into())),
    };
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let fix = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, d));
    let rot = Rotation::project(&(v * fix * u.transpose()));
    let trans = cf - rot.transform(&cm);
    Ok((rot, trans))
}

/// RMSD over `measure_set` after superposing `candidate` on `reference` using `align_set`.
pub fn aligned_rmsd(candidate: &[Vec3], reference: &[Vec3], align_set: &[usize], measure_set: &[usize]) -> Result<f64> {
    if candidate.len() != reference.len() {
        return Err(Error::contract("candidate and reference differ in residue count"));
    }
    if measure_set.is_empty() {
        return Err(Error::contract("measure set is empty"));
    }
    if align_set.iter().chain(measure_set).any(|&i| i >= candidate.len()) {
        return Err(Error::contract("residue index out of range"));
    }
    let mob: Vec<Vec3> = align_set.iter().map(|&i| candidate[i]).collect();
    let fix: Vec<Vec3> = align_set.iter().map(|&i| reference[i]).collect();
    let (rot, trans) = kabsch(&mob, &fix)?;
    let ss: f64 =
        measure_set.iter().map(|&i| (rot.transform(&candidate[i]) + trans - reference[i]).norm_squared()).sum();
    Ok((ss / measure_set.len() as f64).sqrt())
}

/// CDR RMSD with framework superposition; falls back to framework ∪ target
/// when the framework alone has fewer than three residues.
pub fn cdr_rmsd(candidate: &StructureState, reference: &StructureState) -> Result<f64> {
    if candidate.regions != reference.regions {
        return Err(Error::contract("candidate and reference have different region layouts"));
    }
    let mut align = reference.indices(Region::Framework);
    if align.len() < 3 {
        align.extend(reference.indices(Region::Target));
        align.sort_unstable();
    }
    aligned_rmsd(&candidate.positions(), &reference.positions(), &align, &reference.indices(Region::Cdr))
}

/// Fraction of hotspots whose nearest CDR residue is closer than `dist`.
pub fn hotspot_coverage(state: &StructureState, dist: f64) -> Result<f64> {
    if state.hotspots.is_empty() {
        return Err(Error::contract("hotspot coverage needs at least one hotspot"));
    }
    let d2 = dist * dist;
    let covered = experts::nearest_cdr(state)?.iter().filter(|(_, _, x)| *x < d2).count();
    Ok(covered as f64 / state.hotspots.len() as f64)
}

/// Fraction of CDR residues with a target residue closer than `dist`.
pub fn cdr_participation(state: &StructureState, dist: f64) -> f64 {
    let cdr = state.indices(Region::Cdr);
    if cdr.is_empty() {
        return 0.0;
    }
    let target = state.indices(Region::Target);
    let x = state.positions();
    let n = cdr.iter().filter(|&&c| target.iter().any(|&t| (x[c] - x[t]).norm() < dist)).count();
    n as f64 / cdr.len() as f64
}

/// Distance-based stand-in for shape complementarity:
/// `½(f_ab + f_ag)·exp(−gap/λ)`, where `f` is the fraction of each side on
/// the interface and `gap` the mean excess of the nearest cross-chain distance
/// over `contact_optimum`, floored per residue at 0.
pub fn sc_proxy(state: &StructureState, cfg: &MetricsConfig) -> f64 {
    let ab = state.antibody_indices();
    let ag = state.indices(Region::Target);
    let interface = experts::interface_residues(state, cfg.interface_cutoff);
    if interface.is_empty() || ab.is_empty() || ag.is_empty() {
        return 0.0;
    }
    let x = state.positions();
    let (mut n_ab, mut n_ag, mut gap) = (0usize, 0usize, 0.0);
    for &i in &interface {
        let other = if state.regions[i] == Region::Target {
            n_ag += 1;
            &ab
        } else {
            n_ab += 1;
            &ag
        };
        let nearest = other.iter().map(|&j| (x[i] - x[j]).norm()).fold(f64::INFINITY, f64::min);
        gap += (nearest - cfg.contact_optimum).max(0.0);
    }
    gap /= interface.len() as f64;
    let frac = 0.5 * (n_ab as f64 / ab.len() as f64 + n_ag as f64 / ag.len() as f64);
    frac * (-gap / cfg.sc_lambda).exp()
}

pub fn metric_report(
    state: &StructureState,
    reference: Option<&StructureState>,
    cfg: &MetricsConfig,
    expert_cfg: &ExpertConfig,
) -> Result<MetricReport> {
    let rmsd = reference.map(|r| cdr_rmsd(state, r)).transpose()?;
    let hotspot_coverage =
        if state.hotspots.is_empty() { None } else { Some(hotspot_coverage(state, cfg.coverage_dist)?) };
    let geometry = ExpertConfig { d_cutoff: cfg.interface_cutoff, ..*expert_cfg };
    let terms = experts::interface_terms(state, &geometry);
    Ok(MetricReport {
        rmsd,
        hotspot_coverage,
        cdr_participation: cdr_participation(state, cfg.contact_dist),
        n_contacts: experts::hard_contact_count(state, cfg.contact_dist),
        sc_proxy: sc_proxy(state, cfg),
        uniformity_cv: terms.cv,
        cavity_fraction: hard_cavity_fraction(state, &terms.interface, &geometry),
    })
}

/// Clashing pairs (distance below `r_clash`) over the clash expert's pair set.
pub fn clash_count(state: &StructureState, r_clash: f64) -> usize {
    let x = state.positions();
    experts::clash_pairs(state).into_iter().filter(|&(i, j)| (x[i] - x[j]).norm() < r_clash).count()
}

/// Per-residue hotspot evidence, each component in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HotspotScoreInput {
    pub energy: f64,
    pub bsa: f64,
    pub distance: f64,
    pub conservation: f64,
}

pub const HOTSPOT_WEIGHTS: [f64; 4] = [0.4, 0.3, 0.2, 0.1];
pub const DEFAULT_HOTSPOT_COUNT: usize = 5;

pub fn combined_hotspot_score(inputs: &[HotspotScoreInput]) -> Result<Vec<f64>> {
    inputs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let parts = [c.energy, c.bsa, c.distance, c.conservation];
            if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::domain(format!("hotspot components of residue {i} outside [0, 1]")));
            }
            Ok(parts.iter().zip(HOTSPOT_WEIGHTS).map(|(p, w)| p * w).sum())
        })
        .collect()
}

/// Indices of the `k` highest scores, descending; ties go to the lower index.
pub fn top_hotspots(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}
