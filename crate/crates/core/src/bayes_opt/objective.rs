use rand::Rng;
use rand_distr::StandardNormal;

use super::acquisition::ParamBox;

/// Rescaled Branin–Hoo on the unit square (mean ≈ 0, unit-order spread).
/// Global minimum value ≈ −1.047 at three points.
pub fn rescaled_branin(u: [f64; 2]) -> f64 {
    use std::f64::consts::PI;
    let x1 = 15.0 * u[0] - 5.0;
    let x2 = 15.0 * u[1];
    let a = x2 - 5.1 * x1 * x1 / (4.0 * PI * PI) + 5.0 * x1 / PI - 6.0;
    (a * a + (10.0 - 10.0 / (8.0 * PI)) * x1.cos() - 44.81) / 51.95
}

/// The unit-square Branin minimizers.
pub const BRANIN_MINIMIZERS_UNIT: [[f64; 2]; 3] = [
    [(-std::f64::consts::PI + 5.0) / 15.0, 12.275 / 15.0],
    [(std::f64::consts::PI + 5.0) / 15.0, 2.275 / 15.0],
    [(9.424_78 + 5.0) / 15.0, 2.475 / 15.0],
];

/// Rescaled Branin composed with the affine map from `bounds` to the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticObjective {
    pub bounds: ParamBox,
    pub noise_sd: f64,
}

impl SyntheticObjective {
    pub fn new(bounds: ParamBox, noise_sd: f64) -> Self {
        SyntheticObjective { bounds, noise_sd }
    }

    fn unit_coords(&self, theta: &[f64; 2]) -> [f64; 2] {
        [(theta[0] - self.bounds.lo[0]) / self.bounds.width(0), (theta[1] - self.bounds.lo[1]) / self.bounds.width(1)]
    }

    pub fn value(&self, theta: &[f64; 2]) -> f64 {
        rescaled_branin(self.unit_coords(theta))
    }

    pub fn noisy<R: Rng + ?Sized>(&self, theta: &[f64; 2], rng: &mut R) -> f64 {
        let e: f64 = rng.sample(StandardNormal);
        self.value(theta) + self.noise_sd * e
    }

    /// Minimizers mapped into `bounds`.
    pub fn minimizers(&self) -> Vec<[f64; 2]> {
        BRANIN_MINIMIZERS_UNIT
            .iter()
            .map(|u| [self.bounds.lo[0] + u[0] * self.bounds.width(0), self.bounds.lo[1] + u[1] * self.bounds.width(1)])
            .collect()
    }
}
