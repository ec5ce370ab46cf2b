use super::gp::{GpState, Observation};
use crate::{Error, Result};

/// Greedy leader clustering in coordinates divided by `scale`.
///
/// Observations are visited in order; each joins the first cluster whose
/// leader lies within `radius`, otherwise it leads a new cluster. A cluster
/// reports its count-weighted centroid, count-weighted mean loss and total
/// count.
pub fn aggregate_neighborhood(observations: &[Observation], radius: f64, scale: [f64; 2]) -> Result<Vec<Observation>> {
    if !(radius > 0.0) {
        return Err(Error::domain(format!("aggregation radius must be positive, got {radius}")));
    }
    if !(scale[0] > 0.0 && scale[1] > 0.0) {
        return Err(Error::domain("aggregation scale must be positive"));
    }
    let norm =
        |a: &[f64; 2], b: &[f64; 2]| (((a[0] - b[0]) / scale[0]).powi(2) + ((a[1] - b[1]) / scale[1]).powi(2)).sqrt();
    // (leader, Σ c·θ, Σ c·loss, Σ c)
    let mut clusters: Vec<([f64; 2], [f64; 2], f64, usize)> = Vec::new();
    for o in observations {
        let c = o.count as f64;
        match clusters.iter_mut().find(|cl| norm(&cl.0, &o.theta) <= radius) {
            Some(cl) => {
                cl.1[0] += c * o.theta[0];
                cl.1[1] += c * o.theta[1];
                cl.2 += c * o.loss;
                cl.3 += o.count;
            }
            None => clusters.push((o.theta, [c * o.theta[0], c * o.theta[1]], c * o.loss, o.count)),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|(_, s, l, n)| {
            let m = n as f64;
            Observation { theta: [s[0] / m, s[1] / m], loss: l / m, count: n }
        })
        .collect())
}

/// Distinct configurations to re-run at `iteration`: on every positive
/// multiple of `every`, the top `ceil(fraction·n)` of `configs` by EI
/// (descending, ties in input order). Empty otherwise.
pub fn reevaluation_due(
    iteration: usize,
    every: usize,
    fraction: f64,
    configs: &[[f64; 2]],
    gp: Option<&GpState>,
    xi: f64,
) -> Vec<[f64; 2]> {
    if every == 0 || iteration == 0 || !iteration.is_multiple_of(every) {
        return Vec::new();
    }
    let Some(gp) = gp else { return Vec::new() };
    let mut distinct: Vec<[f64; 2]> = Vec::new();
    for c in configs {
        if !distinct.contains(c) {
            distinct.push(*c);
        }
    }
    let take = ((fraction * distinct.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let f_best = gp.best();
    let mut scored: Vec<([f64; 2], f64)> =
        distinct.into_iter().map(|c| (c, gp.expected_improvement(&c, f_best, xi))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    scored.into_iter().take(take).map(|s| s.0).collect()
}
