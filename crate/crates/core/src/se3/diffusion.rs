//! Forward noising, the SO(3) score and unguided reverse updates.

use rand::Rng;
use rand_distr::StandardNormal;

use super::rotation::{skew, vee};
use super::{NoiseSchedule, Rotation, StructureState};
use crate::{Error, Mat3, Result, Vec3};

/// Per-residue noise estimate: translation noise `ε` and a body-frame
/// rotation tangent vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoisePrediction {
    pub trans: Vec<Vec3>,
    pub rot: Vec<Vec3>,
}

impl NoisePrediction {
    pub fn zeros(n: usize) -> Self {
        NoisePrediction { trans: vec![Vec3::zeros(); n], rot: vec![Vec3::zeros(); n] }
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.trans.len() != n || self.rot.len() != n {
            return Err(Error::contract(format!(
                "noise prediction has {}/{} entries for {n} residues",
                self.trans.len(),
                self.rot.len()
            )));
        }
        if self.trans.iter().chain(&self.rot).any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::contract("noise prediction contains non-finite values"));
        }
        Ok(())
    }
}

/// `skew(R_tᵀ·R_0)`.
pub fn skew_project(rot_t: &Rotation, rot_0: &Rotation) -> Mat3 {
    skew(&(rot_t.matrix().transpose() * rot_0.matrix()))
}

/// Riemannian gradient of `log IGSO3(R_t; R_0, σ)`:
/// `(1/σ²)·R_t·skew(R_tᵀR_0)`, a tangent vector at `R_t`.
pub fn rotation_score(rot_t: &Rotation, rot_0: &Rotation, sigma_t: f64) -> Result<Mat3> {
    if !(sigma_t > 0.0) {
        return Err(Error::domain(format!("score needs sigma_t > 0, got {sigma_t}")));
    }
    Ok(rot_t.matrix() * skew_project(rot_t, rot_0) / (sigma_t * sigma_t))
}

/// Gaussian translation noise with the centre of mass held fixed.
pub fn forward_translate<R: Rng + ?Sized>(t_0: &[Vec3], sigma_t: f64, rng: &mut R) -> Result<Vec<Vec3>> {
    if t_0.is_empty() {
        return Err(Error::contract("forward_translate needs at least one residue"));
    }
    if !(sigma_t >= 0.0) {
        return Err(Error::domain(format!("sigma_t must be nonnegative, got {sigma_t}")));
    }
    let n = t_0.len() as f64;
    let noise: Vec<Vec3> = t_0.iter().map(|_| gaussian_vec(rng) * sigma_t).collect();
    let noise_mean = noise.iter().sum::<Vec3>() / n;
    let mut out: Vec<Vec3> = t_0.iter().zip(&noise).map(|(x, e)| x + e - noise_mean).collect();
    // exact recentring against rounding in the sums above
    let shift = t_0.iter().sum::<Vec3>() / n - out.iter().sum::<Vec3>() / n;
    for x in &mut out {
        *x += shift;
    }
    Ok(out)
}

/// Variance-preserving noising in the frame centred at `anchor`:
/// `x_t = a + √ᾱ·(x_0 − a) + √(1−ᾱ)·ε`. Returns `(x_t, ε)`.
pub fn forward_noise_vp<R: Rng + ?Sized>(
    x_0: &[Vec3],
    alpha_bar: f64,
    anchor: &Vec3,
    rng: &mut R,
) -> (Vec<Vec3>, Vec<Vec3>) {
    let eps: Vec<Vec3> = x_0.iter().map(|_| gaussian_vec(rng)).collect();
    let (a, b) = (alpha_bar.sqrt(), (1.0 - alpha_bar).sqrt());
    let x_t = x_0.iter().zip(&eps).map(|(x, e)| anchor + (x - anchor) * a + e * b).collect();
    (x_t, eps)
}

/// Clean-structure estimate from a noise prediction at step `t`.
///
/// Translations invert `x_t = a + √ᾱ(x_0 − a) + √(1−ᾱ)ε` around `anchor`;
/// rotations step back along the geodesic, `R̂_0 = R_t·exp(−√((1−ᾱ)/ᾱ)·ε_rot)`.
pub fn predict_x0(
    x_t: &StructureState,
    eps_hat: &NoisePrediction,
    schedule: &NoiseSchedule,
    t: usize,
    anchor: &Vec3,
) -> Result<StructureState> {
    if t == 0 || t > schedule.total_steps() {
        return Err(Error::domain(format!("timestep {t} outside 1..={}", schedule.total_steps())));
    }
    predict_x0_with_alpha_bar(x_t, eps_hat, schedule.alpha_bar(t), anchor)
}

pub fn predict_x0_with_alpha_bar(
    x_t: &StructureState,
    eps_hat: &NoisePrediction,
    alpha_bar: f64,
    anchor: &Vec3,
) -> Result<StructureState> {
    if !(alpha_bar > 0.0 && alpha_bar <= 1.0) {
        return Err(Error::domain(format!("alpha_bar must lie in (0, 1], got {alpha_bar}")));
    }
    eps_hat.check_len(x_t.len())?;
    let a = alpha_bar.sqrt();
    let b = (1.0 - alpha_bar).sqrt();
    let mut out = x_t.clone();
    for ((f, e), w) in out.frames.iter_mut().zip(&eps_hat.trans).zip(&eps_hat.rot) {
        f.trans = anchor + (f.trans - anchor - e * b) / a;
        f.rot = f.rot * Rotation::exp(&(-w * (b / a)));
    }
    out.timestep = 0;
    Ok(out)
}

/// Rotation tangent noise that makes [`predict_x0`] land exactly on `rot_0`.
pub fn rotation_noise_toward(rot_t: &Rotation, rot_0: &Rotation, alpha_bar: f64) -> Vec3 {
    let scale = (alpha_bar / (1.0 - alpha_bar)).sqrt();
    -(rot_t.inverse() * *rot_0).log() * scale
}

/// Langevin-style reverse step on SO(3):
/// `R_t·exp((dt/2σ²)·skew(R_tᵀR̂_0) + √dt·σ·[ξ]×)` with `ξ ~ N(0, I₃)`.
pub fn reverse_rotation_step<R: Rng + ?Sized>(
    rot_t: &Rotation,
    rot_0_hat: &Rotation,
    sigma_t: f64,
    dt: f64,
    rng: &mut R,
) -> Result<Rotation> {
    let xi = gaussian_vec(rng);
    reverse_rotation_step_with_noise(rot_t, rot_0_hat, sigma_t, dt, &xi)
}

/// [`reverse_rotation_step`] with the body-frame noise `ξ` supplied by the caller.
pub fn reverse_rotation_step_with_noise(
    rot_t: &Rotation,
    rot_0_hat: &Rotation,
    sigma_t: f64,
    dt: f64,
    xi: &Vec3,
) -> Result<Rotation> {
    if !(sigma_t > 0.0) {
        return Err(Error::domain(format!("sigma_t must be positive, got {sigma_t}")));
    }
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt must be positive, got {dt}")));
    }
    let drift = vee(&skew_project(rot_t, rot_0_hat)) * (dt / (2.0 * sigma_t * sigma_t));
    let diffusion = xi * (dt.sqrt() * sigma_t);
    Ok(*rot_t * Rotation::exp(&(drift + diffusion)))
}

pub(crate) fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{hat, Region};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn rz(a: f64) -> Rotation {
        Rotation::about_axis(&Vec3::z(), a)
    }

    #[test]
    fn skew_identity_cases() {
        assert_eq!(skew_project(&Rotation::identity(), &Rotation::identity()), Mat3::zeros());
        let r = Rotation::exp(&Vec3::new(0.3, -1.2, 0.4));
        assert!(skew_project(&r, &r).abs().max() < 1e-15);
    }

    #[test]
    fn skew_quarter_turn_by_hand() {
        // R_z(π/2) = [[0,-1,0],[1,0,0],[0,0,1]]; ½(A − Aᵀ) = [[0,-1,0],[1,0,0],[0,0,0]]
        let s = skew_project(&Rotation::identity(), &rz(FRAC_PI_2));
        let expected = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((s - expected).abs().max() < 1e-15);
        assert!((s + s.transpose()).abs().max() < 1e-15);
    }

    #[test]
    fn score_zero_at_mode_and_scales() {
        let r0 = Rotation::exp(&Vec3::new(0.1, 0.2, 0.3));
        assert!(rotation_score(&r0, &r0, 0.7).unwrap().abs().max() < 1e-14);
        let rt = r0 * Rotation::exp(&Vec3::new(0.2, -0.1, 0.05));
        let s1 = rotation_score(&rt, &r0, 0.5).unwrap();
        let s2 = rotation_score(&rt, &r0, 1.0).unwrap();
        assert!((s1 - s2 * 4.0).abs().max() < 1e-13);
        // tangent at R_t
        let body = rt.matrix().transpose() * s1;
        assert!((body + body.transpose()).abs().max() < 1e-13);
        assert!(matches!(rotation_score(&rt, &r0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn small_perturbation_points_back() {
        let r0 = Rotation::exp(&Vec3::new(-0.3, 0.2, 0.9));
        let g = Vec3::new(0.0, 1.0, 0.0);
        let eps = 1e-4;
        let rt = r0 * Rotation::exp(&(g * eps));
        let sigma = 0.8;
        let s = rotation_score(&rt, &r0, sigma).unwrap();
        let expected = rt.matrix() * hat(&g) * (-eps / (sigma * sigma));
        assert!((s - expected).abs().max() < 1e-10);
    }

    #[test]
    fn forward_translate_identity_and_centroid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Vec3> = (0..7).map(|i| Vec3::new(i as f64, (i * i) as f64, -2.0)).collect();
        assert_eq!(forward_translate(&x, 0.0, &mut rng).unwrap(), x);
        let y = forward_translate(&x, 3.0, &mut rng).unwrap();
        let cx = x.iter().sum::<Vec3>() / 7.0;
        let cy = y.iter().sum::<Vec3>() / 7.0;
        assert!((cx - cy).abs().max() < 1e-12);
        assert!(forward_translate(&[], 1.0, &mut rng).is_err());
    }

    fn three_residue() -> StructureState {
        StructureState::from_positions(
            &[Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 2.0), Vec3::new(4.0, -3.0, 0.0)],
            vec![Region::Cdr, Region::Framework, Region::Target],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn predict_x0_trivial_and_linear() {
        let x = three_residue();
        let anchor = x.anchor();
        let zero = NoisePrediction::zeros(3);
        let same = predict_x0_with_alpha_bar(&x, &zero, 1.0, &anchor).unwrap();
        assert_eq!(same.positions(), x.positions());

        let eps = NoisePrediction {
            trans: vec![Vec3::new(0.3, -0.1, 0.2), Vec3::new(1.0, 0.0, -1.0), Vec3::new(0.0, 0.5, 0.5)],
            rot: vec![Vec3::zeros(); 3],
        };
        let mut eps2 = eps.clone();
        eps2.trans.iter_mut().for_each(|e| *e *= 2.0);
        let ab = 0.36;
        let p1 = predict_x0_with_alpha_bar(&x, &eps, ab, &anchor).unwrap();
        let p2 = predict_x0_with_alpha_bar(&x, &eps2, ab, &anchor).unwrap();
        for i in 0..3 {
            let d1 = (x.position(i) - anchor) - (p1.position(i) - anchor) * ab.sqrt();
            let d2 = (x.position(i) - anchor) - (p2.position(i) - anchor) * ab.sqrt();
            assert!((d2 - d1 * 2.0).norm() < 1e-12);
        }
        assert!(matches!(predict_x0_with_alpha_bar(&x, &eps, 0.0, &anchor), Err(Error::Domain(_))));
    }

    #[test]
    fn predict_x0_inverts_forward_noise() {
        let x0 = three_residue();
        let anchor = x0.anchor();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let schedule = NoiseSchedule::default();
        for t in [1, 10, 25, 49] {
            let (xt, eps) = forward_noise_vp(&x0.positions(), schedule.alpha_bar(t), &anchor, &mut rng);
            let mut state = x0.clone();
            state.set_positions(&xt);
            let pred = NoisePrediction { trans: eps, rot: vec![Vec3::zeros(); 3] };
            let back = predict_x0(&state, &pred, &schedule, t, &anchor).unwrap();
            for (a, b) in back.positions().iter().zip(x0.positions()) {
                assert!((a - b).abs().max() < 1e-10, "t={t}");
            }
        }
    }

    #[test]
    fn rotation_noise_toward_recovers_reference() {
        let rt = Rotation::exp(&Vec3::new(1.0, 0.2, -0.4));
        let r0 = Rotation::exp(&Vec3::new(-0.3, 0.5, 0.1));
        let mut s = three_residue();
        s.frames[0].rot = rt;
        let mut pred = NoisePrediction::zeros(3);
        pred.rot[0] = rotation_noise_toward(&rt, &r0, 0.3);
        let p = predict_x0_with_alpha_bar(&s, &pred, 0.3, &s.anchor()).unwrap();
        assert!(p.frames[0].rot.angle_to(&r0) < 1e-10);
    }

    #[test]
    fn reverse_step_fixed_point_and_contraction() {
        let r = Rotation::exp(&Vec3::new(0.4, 0.1, -0.2));
        let same = reverse_rotation_step_with_noise(&r, &r, 0.5, 0.1, &Vec3::zeros()).unwrap();
        assert!(same.angle_to(&r) < 1e-14);
        let target = r * Rotation::exp(&Vec3::new(0.05, -0.02, 0.03));
        let before = r.angle_to(&target);
        let next = reverse_rotation_step_with_noise(&r, &target, 0.5, 0.1, &Vec3::zeros()).unwrap();
        assert!(next.angle_to(&target) < before);
    }

    #[test]
    fn long_chain_stays_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let target = Rotation::exp(&Vec3::new(1.0, -2.0, 0.5));
        let mut r = Rotation::identity();
        for _ in 0..1000 {
            r = reverse_rotation_step(&r, &target, 0.9, 0.05, &mut rng).unwrap();
        }
        assert!(r.orthogonality_defect() < 1e-9);
        assert!((r.matrix().determinant() - 1.0).abs() < 1e-9);
    }
}
