//! Rigid-frame representation and the unguided diffusion machinery on SE(3).

mod diffusion;
mod igso3;
pub mod rotation;
mod schedule;
mod structure;

pub(crate) use diffusion::gaussian_vec;
pub use diffusion::{
    forward_noise_vp, forward_translate, predict_x0, predict_x0_with_alpha_bar, reverse_rotation_step,
    reverse_rotation_step_with_noise, rotation_noise_toward, rotation_score, skew_project, NoisePrediction,
};
pub use igso3::{sample_igso3, Igso3AngleSampler, ANGLE_GRID_POINTS};
pub use rotation::{hat, skew, vee, Rotation};
pub use schedule::{NoiseSchedule, ScheduleConfig};
pub(crate) use structure::vec3_serde;
pub use structure::{Frame, Region, ResidueId, StructureState};
