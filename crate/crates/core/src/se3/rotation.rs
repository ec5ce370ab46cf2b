use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, Vec3};

/// Tolerance on `m·mᵀ = I` and `det m = 1` for a matrix to be accepted as a rotation.
pub const ROTATION_TOL: f64 = 1e-9;

/// Element of SO(3), stored as a 3×3 matrix.
///
/// Every constructor that can introduce drift goes through [`Rotation::project`],
/// so values of this type always satisfy the orthogonality and unit-determinant
/// invariants to within [`ROTATION_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Accepts `m` only if it is already a proper rotation.
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("rotation matrix has non-finite entries"));
        }
        let defect = (m * m.transpose() - Mat3::identity()).abs().max();
        let det = m.determinant();
        if defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::domain(format!("not a rotation: orthogonality defect {defect:.3e}, det {det:.12}")));
        }
        Ok(Rotation(m))
    }

    /// Nearest rotation in Frobenius norm (polar factor with reflection fix).
    pub fn project(m: &Mat3) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("svd u");
        let v_t = svd.v_t.expect("svd v_t");
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            // flip the axis of the smallest singular value
            let (k, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("three singular values");
            u.column_mut(k).neg_mut();
            r = u * v_t;
        }
        Rotation(r)
    }

    /// Exponential map from a rotation vector (axis × angle).
    pub fn exp(v: &Vec3) -> Self {
        Self::project(&exp_matrix(v))
    }

    pub fn about_axis(axis: &Vec3, angle: f64) -> Self {
        Self::exp(&(axis.normalize() * angle))
    }

    /// Logarithm map; returns the rotation vector with angle in `[0, π]`.
    pub fn log(&self) -> Vec3 {
        log_matrix(&self.0)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        self.log().norm()
    }

    /// Geodesic distance `‖log(selfᵀ·other)‖`.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        (self.inverse() * *other).angle()
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn transform(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// `max |m·mᵀ − I|`, a cheap drift diagnostic.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0 * self.0.transpose() - Mat3::identity()).abs().max()
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation::project(&(self.0 * rhs.0))
    }
}

impl TryFrom<[[f64; 3]; 3]> for Rotation {
    type Error = Error;

    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        let m = Mat3::from_fn(|i, j| rows[i][j]);
        Rotation::from_matrix(m)
    }
}

impl From<Rotation> for [[f64; 3]; 3] {
    fn from(r: Rotation) -> Self {
        let m = r.0;
        [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
    }
}

/// Maps a 3-vector to the skew-symmetric matrix `[v]×`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`] applied to the antisymmetric part of `m`.
pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(0.5 * (m[(2, 1)] - m[(1, 2)]), 0.5 * (m[(0, 2)] - m[(2, 0)]), 0.5 * (m[(1, 0)] - m[(0, 1)]))
}

/// `½(A − Aᵀ)`.
pub fn skew(a: &Mat3) -> Mat3 {
    (a - a.transpose()) * 0.5
}

fn exp_matrix(v: &Vec3) -> Mat3 {
    let theta = v.norm();
    let k = hat(v);
    let k2 = k * k;
    if theta < 1e-8 {
        return Mat3::identity() + k + k2 * 0.5;
    }
    let a = theta.sin() / theta;
    let b = (1.0 - theta.cos()) / (theta * theta);
    Mat3::identity() + k * a + k2 * b
}

fn log_matrix(r: &Mat3) -> Vec3 {
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let w = vee(r); // = sin θ · axis
    if theta < 1e-6 {
        return w * (1.0 + theta * theta / 6.0);
    }
    if theta < std::f64::consts::PI - 1e-4 {
        return w * (theta / theta.sin());
    }
    // Near π the antisymmetric part vanishes; recover the axis from R + I = 2·n·nᵀ (approx).
    let sym = (r + Mat3::identity()) * 0.5;
    let (col, _) = (0..3).map(|i| (i, sym[(i, i)])).max_by(|a, b| a.1.total_cmp(&b.1)).expect("three diagonal entries");
    let mut axis = Vec3::new(sym[(0, col)], sym[(1, col)], sym[(2, col)]);
    axis /= axis.norm();
    // pick the sign consistent with the residual antisymmetric part
    if axis.dot(&w) < 0.0 {
        axis = -axis;
    }
    axis * theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exp_log_round_trip() {
        for v in [
            Vec3::new(0.1, -0.2, 0.3),
            Vec3::new(1e-9, 0.0, 0.0),
            Vec3::new(0.0, 2.5, 0.0),
            Vec3::new(0.0, 0.0, PI - 1e-6),
        ] {
            let r = Rotation::exp(&v);
            assert!((r.log() - v).norm() < 1e-8, "{v:?} -> {:?}", r.log());
        }
    }

    #[test]
    fn from_matrix_rejects_reflection() {
        let m = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(matches!(Rotation::from_matrix(m), Err(Error::Domain(_))));
    }

    #[test]
    fn project_fixes_drift_and_reflection() {
        let r = Rotation::exp(&Vec3::new(0.3, 0.4, -0.2));
        let noisy = r.matrix() + Mat3::from_element(1e-4);
        let p = Rotation::project(&noisy);
        assert!(p.orthogonality_defect() < 1e-12);
        assert!((p.matrix().determinant() - 1.0).abs() < 1e-12);
        let refl = -Mat3::identity();
        let p = Rotation::project(&refl);
        assert!((p.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hat_vee_inverse() {
        let v = Vec3::new(1.0, -2.0, 0.5);
        assert_eq!(vee(&hat(&v)), v);
        let u = Vec3::new(0.3, 0.1, -0.7);
        assert!((hat(&v) * u - v.cross(&u)).norm() < 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let r = Rotation::exp(&Vec3::new(0.3, -0.1, 0.9));
        let s = serde_json::to_string(&r).unwrap();
        let back: Rotation = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);
        assert!(serde_json::from_str::<Rotation>("[[1,0,0],[0,1,0],[0,0,-1]]").is_err());
    }
}
