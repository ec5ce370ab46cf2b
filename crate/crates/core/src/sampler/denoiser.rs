use crate::metrics::kabsch;
use crate::se3::{rotation_noise_toward, Frame, NoisePrediction, Region, Rotation, StructureState};
use crate::{Error, Result, Vec3};

/// Inputs handed to a denoiser at one evaluated step.
#[derive(Debug, Clone, Copy)]
pub struct DenoiseQuery<'a> {
    pub state: &'a StructureState,
    pub t: usize,
    pub alpha_bar: f64,
    /// Centre of the translation diffusion.
    pub anchor: Vec3,
}

/// Noise predictor `ε_θ(x_t, t)`.
///
/// Returns one translation noise vector and one body-frame rotation tangent
/// per residue. Implementations are shared across trajectories running on
/// different threads.
pub trait Denoiser: Sync {
    fn predict(&self, query: &DenoiseQuery<'_>) -> Result<NoisePrediction>;
}

/// Closed-form denoiser that knows the clean structure.
///
/// The reference is first superposed onto the current target residues, so
/// the prediction moves with the complex. It then returns the exact noise
/// that maps `x_t` back onto the posed reference.
#[derive(Debug, Clone)]
pub struct AnalyticDenoiser {
    reference: Vec<Frame>,
    regions: Vec<Region>,
}

impl AnalyticDenoiser {
    pub fn new(reference: &StructureState) -> Self {
        AnalyticDenoiser { reference: reference.frames.clone(), regions: reference.regions.clone() }
    }

    /// Reference frames expressed in the pose of `state`'s target residues.
    pub fn posed_reference(&self, state: &StructureState) -> Result<Vec<Frame>> {
        if state.len() != self.reference.len() || state.regions != self.regions {
            return Err(Error::contract("state does not match the denoiser's reference layout"));
        }
        let target = state.indices(Region::Target);
        let ref_pos: Vec<Vec3> = target.iter().map(|&i| self.reference[i].trans).collect();
        let cur_pos: Vec<Vec3> = target.iter().map(|&i| state.frames[i].trans).collect();
        let (q, u) = match kabsch(&ref_pos, &cur_pos) {
            Ok(m) => m,
            Err(Error::Alignment(_)) => {
                // too few or collinear targets: match the anchor only
                let shift = state.anchor() - reference_anchor(&self.reference, &self.regions);
                (Rotation::identity(), shift)
            }
            Err(e) => return Err(e),
        };
        Ok(self.reference.iter().map(|f| f.transformed(&q, &u)).collect())
    }
}

fn reference_anchor(frames: &[Frame], regions: &[Region]) -> Vec3 {
    let idx: Vec<usize> = (0..frames.len()).filter(|&i| regions[i] == Region::Target).collect();
    let idx: Vec<usize> = if idx.is_empty() { (0..frames.len()).collect() } else { idx };
    if idx.is_empty() {
        return Vec3::zeros();
    }
    idx.iter().map(|&i| frames[i].trans).sum::<Vec3>() / idx.len() as f64
}

impl Denoiser for AnalyticDenoiser {
    fn predict(&self, q: &DenoiseQuery<'_>) -> Result<NoisePrediction> {
        if !(q.alpha_bar > 0.0 && q.alpha_bar < 1.0) {
            return Err(Error::domain(format!("analytic denoiser needs alpha_bar in (0, 1), got {}", q.alpha_bar)));
        }
        let posed = self.posed_reference(q.state)?;
        let a = q.alpha_bar.sqrt();
        let b = (1.0 - q.alpha_bar).sqrt();
        let trans = q
            .state
            .frames
            .iter()
            .zip(&posed)
            .map(|(f, r)| ((f.trans - q.anchor) - (r.trans - q.anchor) * a) / b)
            .collect();
        let rot = q
            .state
            .frames
            .iter()
            .zip(&posed)
            .map(|(f, r)| rotation_noise_toward(&f.rot, &r.rot, q.alpha_bar))
            .collect();
        Ok(NoisePrediction { trans, rot })
    }
}
