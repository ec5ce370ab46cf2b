//! C ABI over `physguide`.
//!
//! Every function returns a [`PgStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and read with
//! [`pg_last_error_message`]. Structures and optimizers are opaque handles
//! that must be released with their `_free` function. Strings returned by
//! the library are released with [`pg_string_free`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use physguide::bayes_opt::{self, BayesOptimizer, BoConfig};
use physguide::campaign::{self, StructureInput};
use physguide::experts::{self, ExpertConfig, ExpertId};
use physguide::metrics;
use physguide::router;
use physguide::sampler::{make_skip_schedule, AnalyticDenoiser, Gaussian, Sampler, SkipMode};
use physguide::se3::{NoiseSchedule, StructureState};
use physguide::temporal::{self, GuidanceParams};
use physguide::{Error, ErrorCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Status codes. Values 0 to 9 match the library's error codes.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    Domain = 1,
    Sampling = 2,
    Contract = 3,
    Alignment = 4,
    Parse = 5,
    Config = 6,
    Numerical = 7,
    Io = 8,
    Serialization = 9,
    NullPointer = 10,
    /// An argument is out of range or a buffer is too small.
    InvalidArgument = 11,
    Panic = 12,
}

impl From<ErrorCode> for PgStatus {
    fn from(c: ErrorCode) -> Self {
        match c {
            ErrorCode::Ok => PgStatus::Ok,
            ErrorCode::Domain => PgStatus::Domain,
            ErrorCode::Sampling => PgStatus::Sampling,
            ErrorCode::Contract => PgStatus::Contract,
            ErrorCode::Alignment => PgStatus::Alignment,
            ErrorCode::Parse => PgStatus::Parse,
            ErrorCode::Config => PgStatus::Config,
            ErrorCode::Numerical => PgStatus::Numerical,
            ErrorCode::Io => PgStatus::Io,
            ErrorCode::Serialization => PgStatus::Serialization,
        }
    }
}

/// Opaque residue-frame structure.
pub struct PgStructure {
    inner: StructureState,
}

/// Opaque Bayesian optimizer over `(alpha, beta)`.
pub struct PgOptimizer {
    inner: BayesOptimizer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(PgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.code().into(), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(PgStatus::InvalidArgument, msg.into())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn run(f: impl FnOnce() -> FfiResult<()>) -> PgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PgStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("panic inside physguide");
            PgStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure(PgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure(PgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(PgStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure(PgStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(PgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

fn expert(id: u32) -> FfiResult<ExpertId> {
    ExpertId::ALL.get(id as usize).copied().ok_or_else(|| invalid(format!("expert id {id} out of range 0..4")))
}

fn boxed_structure(s: StructureState, out: &mut *mut PgStructure) {
    *out = Box::into_raw(Box::new(PgStructure { inner: s }));
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The built-in 30-residue toy complex.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_toy(out: *mut *mut PgStructure) -> PgStatus {
    run(|| {
        let out = as_mut(out, "out")?;
        boxed_structure(campaign::toy_complex(), out);
        Ok(())
    })
}

/// Parses the native JSON structure format.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_from_json(json: *const c_char, out: *mut *mut PgStructure) -> PgStatus {
    run(|| {
        let json = text(json, "json")?;
        let out = as_mut(out, "out")?;
        boxed_structure(campaign::structure_from_json(json)?, out);
        Ok(())
    })
}

/// Loads a `.json` structure file. PDB input needs region labels and is
/// only available through the CLI config.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_load(path: *const c_char, out: *mut *mut PgStructure) -> PgStatus {
    run(|| {
        let path = Path::new(text(path, "path")?);
        let out = as_mut(out, "out")?;
        boxed_structure(campaign::load_structure(path, &StructureInput::default())?, out);
        Ok(())
    })
}

/// Serializes to the native JSON format; free the result with [`pg_string_free`].
///
/// # Safety
/// `s` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_to_json(s: *const PgStructure, out: *mut *mut c_char) -> PgStatus {
    run(|| {
        let s = as_ref(s, "structure")?;
        let out = as_mut(out, "out")?;
        let json = campaign::structure_to_json(&s.inner)?;
        *out = CString::new(json).map_err(|_| invalid("JSON contains NUL"))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_free(s: *mut PgStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of residues.
///
/// # Safety
/// `s` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_len(s: *const PgStructure, out: *mut usize) -> PgStatus {
    run(|| {
        *as_mut(out, "out")? = as_ref(s, "structure")?.inner.len();
        Ok(())
    })
}

/// Residue positions as `x0 y0 z0 x1 ...`; `len` must be at least `3·n`.
///
/// # Safety
/// `s` must be a live handle; `xyz` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pg_structure_positions(s: *const PgStructure, xyz: *mut f64, len: usize) -> PgStatus {
    run(|| {
        let s = &as_ref(s, "structure")?.inner;
        let out = slice_mut(xyz, len, "xyz")?;
        if len < 3 * s.len() {
            return Err(invalid(format!("need {} doubles, got {len}", 3 * s.len())));
        }
        for (i, p) in s.positions().iter().enumerate() {
            out[3 * i..3 * i + 3].copy_from_slice(p.as_slice());
        }
        Ok(())
    })
}

/// Loss and per-residue gradient of one expert (0 clash, 1 recognition,
/// 2 contact, 3 interface) under default settings. `grad` may be null when
/// `grad_len` is 0; otherwise it must hold `3·n` doubles.
///
/// # Safety
/// `s` must be a live handle; pointers must be valid for their lengths.
#[no_mangle]
pub unsafe extern "C" fn pg_expert_loss_grad(
    s: *const PgStructure,
    expert_id: u32,
    loss: *mut f64,
    grad: *mut f64,
    grad_len: usize,
) -> PgStatus {
    run(|| {
        let s = &as_ref(s, "structure")?.inner;
        let loss = as_mut(loss, "loss")?;
        let out = slice_mut(grad, grad_len, "grad")?;
        if grad_len != 0 && grad_len < 3 * s.len() {
            return Err(invalid(format!("need {} doubles, got {grad_len}", 3 * s.len())));
        }
        let g = experts::evaluate(expert(expert_id)?, s, &ExpertConfig::default())?;
        *loss = g.loss;
        if grad_len != 0 {
            for (i, v) in g.grad.iter().enumerate() {
                out[3 * i..3 * i + 3].copy_from_slice(v.as_slice());
            }
        }
        Ok(())
    })
}

/// Default-configuration severities of a structure, in expert order.
///
/// # Safety
/// `s` must be a live handle; `severities` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn pg_severities(s: *const PgStructure, severities: *mut f64) -> PgStatus {
    run(|| {
        let s = &as_ref(s, "structure")?.inner;
        let out = slice_mut(severities, 4, "severities")?;
        let v = router::compute_severities(s, &router::RouterConfig::default(), &ExpertConfig::default())?;
        out.copy_from_slice(&v);
        Ok(())
    })
}

/// Severity-proportional weights over experts above `theta_min`.
///
/// # Safety
/// `severities` must hold 4 doubles and `weights` room for 4.
#[no_mangle]
pub unsafe extern "C" fn pg_route_weights(severities: *const f64, theta_min: f64, weights: *mut f64) -> PgStatus {
    run(|| {
        let s = slice(severities, 4, "severities")?;
        let out = slice_mut(weights, 4, "weights")?;
        if !(0.0..1.0).contains(&theta_min) {
            return Err(invalid("theta_min must lie in [0, 1)"));
        }
        if s.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid("severities must lie in [0, 1]"));
        }
        let r = router::route_weights([s[0], s[1], s[2], s[3]], theta_min);
        out.copy_from_slice(&r.w);
        Ok(())
    })
}

/// Beta temporal factor at generation step `t` of `total`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_temporal_factor(
    t: usize,
    total: usize,
    alpha: f64,
    beta: f64,
    lambda_peak: f64,
    out: *mut f64,
) -> PgStatus {
    run(|| {
        *as_mut(out, "out")? = temporal::temporal_factor(t, total, alpha, beta, lambda_peak)?;
        Ok(())
    })
}

/// Evaluated timesteps from `total` down to 0. `mode` is 0 (full),
/// 1 (uniform, interval `interval`) or 2 (adaptive). `steps_len` receives
/// the count; when `cap` is too small nothing is written and the call
/// fails with `InvalidArgument`.
///
/// # Safety
/// `steps` must hold `cap` entries (may be null when `cap` is 0);
/// `steps_len` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_skip_schedule(
    total: usize,
    mode: u32,
    interval: usize,
    steps: *mut usize,
    cap: usize,
    steps_len: *mut usize,
) -> PgStatus {
    run(|| {
        let mode = match mode {
            0 => SkipMode::Full,
            1 => SkipMode::Uniform { s: interval },
            2 => SkipMode::Adaptive,
            m => return Err(invalid(format!("unknown skip mode {m}"))),
        };
        let sched = make_skip_schedule(total, mode)?;
        *as_mut(steps_len, "steps_len")? = sched.steps.len();
        if cap < sched.steps.len() {
            return Err(invalid(format!("need room for {} steps, got {cap}", sched.steps.len())));
        }
        slice_mut(steps, cap, "steps")?[..sched.steps.len()].copy_from_slice(&sched.steps);
        Ok(())
    })
}

/// CDR RMSD after superposing framework residues.
///
/// # Safety
/// Both handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_cdr_rmsd(
    candidate: *const PgStructure,
    reference: *const PgStructure,
    out: *mut f64,
) -> PgStatus {
    run(|| {
        let c = &as_ref(candidate, "candidate")?.inner;
        let r = &as_ref(reference, "reference")?.inner;
        *as_mut(out, "out")? = metrics::cdr_rmsd(c, r)?;
        Ok(())
    })
}

/// Number of clashing residue pairs closer than `r_clash`.
///
/// # Safety
/// `s` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_clash_count(s: *const PgStructure, r_clash: f64, out: *mut usize) -> PgStatus {
    run(|| {
        let s = &as_ref(s, "structure")?.inner;
        if !(r_clash > 0.0) {
            return Err(invalid("r_clash must be positive"));
        }
        *as_mut(out, "out")? = metrics::clash_count(s, r_clash);
        Ok(())
    })
}

/// `Σ weights[i]·metrics[i]/normalizers[i]`.
///
/// # Safety
/// The three arrays must each hold `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pg_composite_loss(
    values: *const f64,
    weights: *const f64,
    normalizers: *const f64,
    n: usize,
    out: *mut f64,
) -> PgStatus {
    run(|| {
        let m = slice(values, n, "values")?;
        let w = slice(weights, n, "weights")?;
        let v = slice(normalizers, n, "normalizers")?;
        *as_mut(out, "out")? = bayes_opt::composite_loss(m, w, v)?;
        Ok(())
    })
}

/// Samples one design around `reference` with the analytic denoiser and
/// default guidance at shape `(alpha, beta)`. `skip_interval` 1 runs every
/// step of the 50-step schedule.
///
/// # Safety
/// `reference` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_sample(
    reference: *const PgStructure,
    alpha: f64,
    beta: f64,
    skip_interval: usize,
    seed: u64,
    out: *mut *mut PgStructure,
) -> PgStatus {
    run(|| {
        let reference = &as_ref(reference, "reference")?.inner;
        let out = as_mut(out, "out")?;
        let params = GuidanceParams::default().with_shape(alpha, beta);
        params.validate()?;
        let schedule = NoiseSchedule::default();
        let denoiser = AnalyticDenoiser::new(reference);
        let sampler = Sampler::new(&denoiser, &schedule, params);
        let skip = make_skip_schedule(schedule.total_steps(), SkipMode::Uniform { s: skip_interval })?;
        let mut noise = Gaussian(ChaCha8Rng::seed_from_u64(seed));
        let x_t = sampler.initial_state(reference, &mut noise)?;
        boxed_structure(sampler.sample(&x_t, &skip, &mut noise, None)?, out);
        Ok(())
    })
}

/// New optimizer. `config_json` may be null for defaults; otherwise it is a
/// JSON object with the optimizer settings.
///
/// # Safety
/// `config_json` must be null or NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_new(config_json: *const c_char, out: *mut *mut PgOptimizer) -> PgStatus {
    run(|| {
        let out = as_mut(out, "out")?;
        let cfg: BoConfig = if config_json.is_null() {
            BoConfig::default()
        } else {
            serde_json::from_str(text(config_json, "config_json")?).map_err(Error::from)?
        };
        *out = Box::into_raw(Box::new(PgOptimizer { inner: BayesOptimizer::new(cfg)? }));
        Ok(())
    })
}

/// # Safety
/// `opt` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_free(opt: *mut PgOptimizer) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// Records the loss observed at `(alpha, beta)`.
///
/// # Safety
/// `opt` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_observe(opt: *mut PgOptimizer, alpha: f64, beta: f64, loss: f64) -> PgStatus {
    run(|| {
        as_mut(opt, "optimizer")?.inner.observe([alpha, beta], loss)?;
        Ok(())
    })
}

/// Next `(alpha, beta)` to evaluate and its expected improvement. The same
/// history and seed give the same proposal.
///
/// # Safety
/// `opt` must be a live handle; `theta` must hold 2 doubles; `ei` may be null.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_propose(
    opt: *const PgOptimizer,
    seed: u64,
    theta: *mut f64,
    ei: *mut f64,
) -> PgStatus {
    run(|| {
        let opt = &as_ref(opt, "optimizer")?.inner;
        let out = slice_mut(theta, 2, "theta")?;
        let p = opt.propose(&mut ChaCha8Rng::seed_from_u64(seed))?;
        out.copy_from_slice(&p.theta);
        if let Some(e) = ei.as_mut() {
            *e = p.ei;
        }
        Ok(())
    })
}

/// Observed point with the lowest posterior mean. Fails with `Contract`
/// before the first observation.
///
/// # Safety
/// `opt` must be a live handle; `theta` must hold 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_incumbent(opt: *const PgOptimizer, theta: *mut f64) -> PgStatus {
    run(|| {
        let opt = &as_ref(opt, "optimizer")?.inner;
        let out = slice_mut(theta, 2, "theta")?;
        let best = opt.incumbent()?.ok_or_else(|| Failure(PgStatus::Contract, "no observations yet".into()))?;
        out.copy_from_slice(&best);
        Ok(())
    })
}

/// Number of observations recorded so far.
///
/// # Safety
/// `opt` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_optimizer_len(opt: *const PgOptimizer, out: *mut usize) -> PgStatus {
    run(|| {
        *as_mut(out, "out")? = as_ref(opt, "optimizer")?.inner.history().len();
        Ok(())
    })
}
