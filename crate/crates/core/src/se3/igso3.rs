//! Sampling from the isotropic Gaussian on SO(3).
//!
//! The density `exp(tr(R₀ᵀR)/σ²)` depends on `R` only through the rotation
//! angle `ω` of `R₀ᵀR` (`tr = 1 + 2 cos ω`). Under Haar measure the angle has
//! weight `(1 − cos ω)/π`, so the marginal is
//!
//! ```text
//! p(ω) ∝ exp(2 cos ω / σ²) · (1 − cos ω),   ω ∈ [0, π]
//! ```
//!
//! and the axis is uniform on S². The angle is drawn by inverse CDF on a
//! fixed grid whose upper end adapts to `σ` so tiny noise levels are still
//! resolved.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Rotation;
use crate::{Error, Result, Vec3};

pub const ANGLE_GRID_POINTS: usize = 4096;
const AXIS_MAX_TRIES: usize = 64;

/// Inverse-CDF table for the IGSO3 rotation-angle marginal at a fixed `σ`.
#[derive(Debug, Clone)]
pub struct Igso3AngleSampler {
    sigma: f64,
    omega: Vec<f64>,
    cdf: Vec<f64>,
}

impl Igso3AngleSampler {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!("IGSO3 sigma must be positive, got {sigma}")));
        }
        let n = ANGLE_GRID_POINTS;
        let omega_max = (12.0 * sigma).min(std::f64::consts::PI);
        let omega: Vec<f64> = (0..n).map(|k| omega_max * k as f64 / (n - 1) as f64).collect();
        let log_p: Vec<f64> = omega
            .iter()
            .map(|&w| {
                let h = (0.5 * w).sin().powi(2); // (1 − cos ω)/2
                if h == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -4.0 * h / (sigma * sigma) + (2.0 * h).ln()
                }
            })
            .collect();
        let max = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let p: Vec<f64> = log_p.iter().map(|l| (l - max).exp()).collect();
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        for k in 1..n {
            let step = 0.5 * (p[k] + p[k - 1]) * (omega[k] - omega[k - 1]);
            cdf.push(cdf[k - 1] + step);
        }
        let total = cdf[n - 1];
        if !(total > 0.0) {
            return Err(Error::Sampling(format!("degenerate IGSO3 angle table at sigma {sigma}")));
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Igso3AngleSampler { sigma, omega, cdf })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Angle for a uniform variate `u ∈ [0, 1)`.
    pub fn angle_at(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|c| *c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.omega[k - 1] + frac.clamp(0.0, 1.0) * (self.omega[k] - self.omega[k - 1])
    }

    /// Tangent vector `ω·axis` with `ω` from the marginal and a uniform axis.
    pub fn sample_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec3> {
        let omega = self.angle_at(rng.gen::<f64>());
        Ok(uniform_axis(rng)? * omega)
    }

    /// `R₀·exp(ω·axis)`.
    pub fn sample<R: Rng + ?Sized>(&self, rot_0: &Rotation, rng: &mut R) -> Result<Rotation> {
        Ok(*rot_0 * Rotation::exp(&self.sample_tangent(rng)?))
    }
}

fn uniform_axis<R: Rng + ?Sized>(rng: &mut R) -> Result<Vec3> {
    for _ in 0..AXIS_MAX_TRIES {
        let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return Ok(v / n);
        }
    }
    Err(Error::Sampling("could not draw a non-degenerate axis".into()))
}

/// One draw from `IGSO3(R₀, σ)`. Builds the angle table each call; reuse an
/// [`Igso3AngleSampler`] when drawing many rotations at one noise level.
pub fn sample_igso3<R: Rng + ?Sized>(rot_0: &Rotation, sigma: f64, rng: &mut R) -> Result<Rotation> {
    Igso3AngleSampler::new(sigma)?.sample(rot_0, rng)
}
