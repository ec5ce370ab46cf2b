//! Guided reverse diffusion.
//!
//! One transition `t → t_next` does the following:
//!
//! 1. Routes the experts on `x_t` and assembles the clipped guidance field `g`.
//! 2. Asks the denoiser for `ε̂` and forms `x̂_0`.
//! 3. Moves translations to the posterior mean for the jump, subtracts
//!    `√Δt·g` and adds `√(σ̃²·Δt)·z`.
//! 4. Steps rotations on SO(3) toward `x̂_0`'s rotations.
//!
//! A full schedule is the `Δt = 1` case of the same transition, so skip
//! interval 1 reproduces full sampling exactly. Target residues never move.
//!
//! Temporal profiles are indexed in generation order: diffusion step `t`
//! corresponds to profile step `T − t + 1`, so `t = T` is `t_norm = 0`.

mod denoiser;
mod noise;
mod skip;

use serde::{Deserialize, Serialize};

pub use denoiser::{AnalyticDenoiser, DenoiseQuery, Denoiser};
pub use noise::{Gaussian, NoiseSource, Rotated, Zero};
pub use skip::{adaptive_interval, make_skip_schedule, SkipMode, SkipSchedule};

use crate::experts::{self, ExpertConfig, ExpertGradient, ExpertId};
use crate::router::{self, RouterConfig, SeverityReport};
use crate::se3::{
    predict_x0_with_alpha_bar, reverse_rotation_step_with_noise, Frame, Igso3AngleSampler, NoiseSchedule, Region,
    Rotation, StructureState,
};
use crate::temporal::{GuidanceParams, TemporalProfile};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Per-residue cap on the guidance vector norm.
    pub grad_clip: f64,
    pub skip: SkipMode,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { grad_clip: 2.0, skip: SkipMode::Full }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_clip > 0.0) {
            return Err(Error::config("grad_clip must be positive"));
        }
        if let SkipMode::Uniform { s: 0 } = self.skip {
            return Err(Error::config("uniform skip interval must be at least 1"));
        }
        Ok(())
    }
}

/// All four expert gradients, ordered as [`ExpertId::ALL`].
pub fn expert_gradients(state: &StructureState, cfg: &ExpertConfig) -> Result<Vec<ExpertGradient>> {
    ExpertId::ALL.iter().map(|&e| experts::evaluate(e, state, cfg)).collect()
}

/// `Σ_i w_i·λ_i·∇L_i` before clipping.
pub fn combine(grads: &[ExpertGradient], weights: &[f64; 4], strengths: &[f64; 4]) -> Vec<Vec3> {
    let n = grads.first().map_or(0, |g| g.grad.len());
    let mut out = vec![Vec3::zeros(); n];
    for g in grads {
        let k = g.expert.index();
        let c = weights[k] * strengths[k];
        if c == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(&g.grad) {
            *o += v * c;
        }
    }
    out
}

/// Rescales every vector longer than `max_norm` onto the sphere of that radius.
pub fn clip_per_residue(field: &mut [Vec3], max_norm: f64) {
    for v in field {
        let n = v.norm();
        if n > max_norm {
            *v *= max_norm / n;
        }
    }
}

/// Temporal strengths `λ_base,i·f(t)` at profile step `t` of `total`.
pub fn strengths_at(params: &GuidanceParams, profile: &TemporalProfile, t: usize, total: usize) -> Result<[f64; 4]> {
    let f = profile.factor(t, total)?;
    let base = params.lambda_base.as_array();
    Ok([base[0] * f, base[1] * f, base[2] * f, base[3] * f])
}

/// Clipped combined guidance at profile step `t` of `total`.
pub fn combined_gradient(
    state: &StructureState,
    report: &SeverityReport,
    params: &GuidanceParams,
    t: usize,
    total: usize,
    expert_cfg: &ExpertConfig,
    grad_clip: f64,
) -> Result<Vec<Vec3>> {
    let grads = expert_gradients(state, expert_cfg)?;
    let strengths = strengths_at(params, &params.profile()?, t, total)?;
    let mut g = combine(&grads, &report.w, &strengths);
    clip_per_residue(&mut g, grad_clip);
    Ok(g)
}

/// One evaluated transition, as written to trace files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub t: usize,
    pub t_next: usize,
    pub losses: [f64; 4],
    pub severities: [f64; 4],
    pub weights: [f64; 4],
    pub strengths: [f64; 4],
    /// Largest per-residue guidance norm after clipping.
    pub max_grad_norm: f64,
    pub mean_grad_norm: f64,
}

/// Reverse sampler bound to a denoiser, a schedule and guidance settings.
pub struct Sampler<'a, D: Denoiser + ?Sized> {
    pub denoiser: &'a D,
    pub schedule: &'a NoiseSchedule,
    pub params: GuidanceParams,
    pub experts: ExpertConfig,
    pub router: RouterConfig,
    pub config: SamplerConfig,
}

struct Guidance {
    field: Vec<Vec3>,
    trace: StepTrace,
}

impl<'a, D: Denoiser + ?Sized> Sampler<'a, D> {
    pub fn new(denoiser: &'a D, schedule: &'a NoiseSchedule, params: GuidanceParams) -> Self {
        Sampler {
            denoiser,
            schedule,
            params,
            experts: ExpertConfig::default(),
            router: RouterConfig::default(),
            config: SamplerConfig::default(),
        }
    }

    fn total(&self) -> usize {
        self.schedule.total_steps()
    }

    /// Profile step for diffusion step `t`; `t = 0` shares the last profile step.
    fn profile_step(&self, t: usize) -> usize {
        self.total() + 1 - t.max(1)
    }

    fn guidance_active(&self) -> bool {
        !self.params.lambda_base.is_zero()
    }

    fn guidance(
        &self,
        state: &StructureState,
        t: usize,
        t_next: usize,
        report: &SeverityReport,
        profile: &TemporalProfile,
    ) -> Result<Guidance> {
        let n = state.len();
        let mut trace = StepTrace {
            t,
            t_next,
            losses: [0.0; 4],
            severities: report.s,
            weights: report.w,
            strengths: [0.0; 4],
            max_grad_norm: 0.0,
            mean_grad_norm: 0.0,
        };
        if !self.guidance_active() {
            return Ok(Guidance { field: vec![Vec3::zeros(); n], trace });
        }
        let grads = expert_gradients(state, &self.experts)?;
        for g in &grads {
            trace.losses[g.expert.index()] = g.loss;
        }
        let total = self.total();
        let now = strengths_at(&self.params, profile, self.profile_step(t), total)?;
        let next = strengths_at(&self.params, profile, self.profile_step(t_next), total)?;
        // mean of the linearly interpolated strength over the skipped steps
        let dt = (t - t_next) as f64;
        let c = (dt - 1.0) / (2.0 * dt);
        let mut strengths = [0.0; 4];
        for k in 0..4 {
            strengths[k] = now[k] + c * (next[k] - now[k]);
        }
        trace.strengths = strengths;
        let mut field = combine(&grads, &report.w, &strengths);
        clip_per_residue(&mut field, self.config.grad_clip);
        for (v, r) in field.iter_mut().zip(&state.regions) {
            if *r == Region::Target {
                *v = Vec3::zeros();
            }
        }
        let norms: Vec<f64> = field.iter().map(|v| v.norm()).collect();
        trace.max_grad_norm = norms.iter().cloned().fold(0.0, f64::max);
        trace.mean_grad_norm = if n > 0 { norms.iter().sum::<f64>() / n as f64 } else { 0.0 };
        Ok(Guidance { field, trace })
    }

    fn route(&self, state: &StructureState) -> Result<SeverityReport> {
        if !self.guidance_active() {
            return Ok(router::route_weights([0.0; 4], self.router.theta_min));
        }
        router::route(state, &self.router, &self.experts)
    }

    /// Transition from `state.timestep` to `t_next` using `report` as routing.
    pub fn transition(
        &self,
        state: &StructureState,
        t_next: usize,
        report: &SeverityReport,
        noise: &mut dyn NoiseSource,
    ) -> Result<(StructureState, StepTrace)> {
        let t = state.timestep;
        if t == 0 || t > self.total() {
            return Err(Error::domain(format!("cannot step from t = {t} (T = {})", self.total())));
        }
        if t_next >= t {
            return Err(Error::domain(format!("next step {t_next} must be below {t}")));
        }
        let profile = self.params.profile()?;
        let guidance = self.guidance(state, t, t_next, report, &profile)?;

        let anchor = state.anchor();
        let ab_t = self.schedule.alpha_bar(t);
        let ab_n = self.schedule.alpha_bar(t_next);
        let eps = self.denoiser.predict(&DenoiseQuery { state, t, alpha_bar: ab_t, anchor })?;
        eps.check_len(state.len())?;
        let x0_hat = predict_x0_with_alpha_bar(state, &eps, ab_t, &anchor)?;

        let dt = (t - t_next) as f64;
        let a_eff = ab_t / ab_n;
        let mean_coef = (1.0 - a_eff) / (1.0 - ab_t).sqrt();
        let var = (1.0 - ab_n) * (1.0 - a_eff) / (1.0 - ab_t);
        let noise_scale = (var * dt).sqrt();
        let guide_scale = dt.sqrt();

        let sigma_t = self.schedule.sigma(t);
        let sigma_n = self.schedule.sigma(t_next);
        let dt_rot = sigma_t * sigma_t - sigma_n * sigma_n;

        let z: Vec<Vec3> = (0..state.len()).map(|_| noise.trans()).collect();
        let xi: Vec<Vec3> = (0..state.len()).map(|_| noise.rot()).collect();

        let mut out = state.clone();
        for i in 0..state.len() {
            if !state.regions[i].is_generated() {
                continue;
            }
            let f = &state.frames[i];
            let y = f.trans - anchor;
            let mu = (y - eps.trans[i] * mean_coef) / a_eff.sqrt();
            let trans = anchor + mu - guidance.field[i] * guide_scale + z[i] * noise_scale;
            let rot = if dt_rot > 0.0 {
                reverse_rotation_step_with_noise(&f.rot, &x0_hat.frames[i].rot, sigma_t, dt_rot, &xi[i])?
            } else {
                x0_hat.frames[i].rot
            };
            out.frames[i] = Frame { rot, trans };
        }
        out.timestep = t_next;
        Ok((out, guidance.trace))
    }

    /// One full-schedule step `t → t − 1` with fresh routing.
    pub fn guided_step(
        &self,
        state: &StructureState,
        noise: &mut dyn NoiseSource,
    ) -> Result<(StructureState, StepTrace)> {
        let report = self.route(state)?;
        self.transition(state, state.timestep.saturating_sub(1), &report, noise)
    }

    /// Runs the schedule from `x_t` (whose timestep must equal the schedule's first entry) to 0.
    pub fn sample(
        &self,
        x_t: &StructureState,
        skip: &SkipSchedule,
        noise: &mut dyn NoiseSource,
        mut trace: Option<&mut Vec<StepTrace>>,
    ) -> Result<StructureState> {
        if skip.steps.first() != Some(&x_t.timestep) || skip.steps.last() != Some(&0) {
            return Err(Error::contract(format!(
                "schedule must run from the state's timestep {} down to 0",
                x_t.timestep
            )));
        }
        if self.guidance_active() {
            x_t.validate_for_guidance()?;
        }
        let mut state = x_t.clone();
        let mut report = self.route(&state)?;
        for (k, (_, t_next)) in skip.transitions().enumerate() {
            if k > 0 && k % self.router.stride == 0 {
                report = self.route(&state)?;
            }
            let (next, rec) = self.transition(&state, t_next, &report, noise)?;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(rec);
            }
            state = next;
        }
        Ok(state)
    }

    /// `x_T` drawn around `reference`: variance-preserving translation noise
    /// about the target centroid and IGSO3 rotation noise at `σ_T`, on
    /// generated residues only.
    pub fn initial_state(&self, reference: &StructureState, noise: &mut dyn NoiseSource) -> Result<StructureState> {
        let total = self.total();
        let ab = self.schedule.alpha_bar(total);
        let igso3 = Igso3AngleSampler::new(self.schedule.sigma(total))?;
        let anchor = reference.anchor();
        let mut out = reference.clone();
        for i in 0..reference.len() {
            let z = noise.trans();
            let v = noise.igso3(&igso3)?;
            if !reference.regions[i].is_generated() {
                continue;
            }
            let f = &reference.frames[i];
            out.frames[i] = Frame {
                rot: f.rot * Rotation::exp(&v),
                trans: anchor + (f.trans - anchor) * ab.sqrt() + z * (1.0 - ab).sqrt(),
            };
        }
        out.timestep = total;
        Ok(out)
    }
}
