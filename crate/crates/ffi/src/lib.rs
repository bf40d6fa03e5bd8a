//! C interface to the simulator.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns a [`MabmStatus`]; on failure a description is
//! available from [`mabm_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use misinfo_abm::expcli::config_file::{apply_setting, load_config_file};
use misinfo_abm::expcli::{run_batch, BatchPlan};
use misinfo_abm::{Algorithm, Error, SimulationConfig, SimulationModel, StepMetricsRow};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MabmStatus {
    Ok = 0,
    InvalidArgument = 1,
    InvalidConfig = 2,
    Io = 3,
    Parse = 4,
    NullPointer = 5,
    Panic = 6,
    Usage = 7,
}

/// Batch plan: simulation parameters plus algorithms, iterations, seed, output directory.
pub struct MabmConfig {
    plan: BatchPlan,
}

/// One running simulation.
pub struct MabmSimulation {
    model: SimulationModel,
}

/// Metrics of one simulated step.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MabmStepMetrics {
    pub step: u32,
    pub n_susceptible: u64,
    pub n_exposed: u64,
    pub n_infected: u64,
    pub msp: f64,
    pub mrd: f64,
    pub mc: f64,
    pub n_contents: u64,
    pub n_fake_contents: u64,
    pub n_interactions_step: u64,
}

impl From<&StepMetricsRow> for MabmStepMetrics {
    fn from(r: &StepMetricsRow) -> Self {
        MabmStepMetrics {
            step: r.step,
            n_susceptible: r.n_susceptible as u64,
            n_exposed: r.n_exposed as u64,
            n_infected: r.n_infected as u64,
            msp: r.msp,
            mrd: r.mrd,
            mc: r.mc,
            n_contents: r.n_contents as u64,
            n_fake_contents: r.n_fake_contents as u64,
            n_interactions_step: r.n_interactions_step as u64,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> MabmStatus {
    match err {
        Error::InvalidArgument(_) => MabmStatus::InvalidArgument,
        Error::Usage(_) => MabmStatus::Usage,
        Error::InvalidConfig(_) => MabmStatus::InvalidConfig,
        Error::Parse { .. } => MabmStatus::Parse,
        Error::Io { .. } => MabmStatus::Io,
    }
}

struct Failure(MabmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MabmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MabmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MabmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            MabmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MabmStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mabm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mabm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a config holding the default parameters.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mabm_config_new(out: *mut *mut MabmConfig) -> MabmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Box::into_raw(Box::new(MabmConfig {
            plan: BatchPlan::default(),
        }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be NULL or a pointer from [`mabm_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mabm_config_free(cfg: *mut MabmConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one `key`/`value` pair using the config-file keys.
///
/// # Safety
/// `cfg` must be a live config; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn mabm_config_set(
    cfg: *mut MabmConfig,
    key: *const c_char,
    value: *const c_char,
) -> MabmStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let (key, value) = (str_arg(key, "key")?, str_arg(value, "value")?);
        apply_setting(&mut cfg.plan, key, value).map_err(|m| Failure(MabmStatus::InvalidArgument, m))
    })
}

/// Applies a `key=value` config file on top of the current settings.
///
/// # Safety
/// `cfg` must be a live config; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mabm_config_load_file(cfg: *mut MabmConfig, path: *const c_char) -> MabmStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let path = str_arg(path, "path")?;
        Ok(load_config_file(&mut cfg.plan, Path::new(path))?)
    })
}

/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn mabm_config_validate(cfg: *const MabmConfig) -> MabmStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        Ok(cfg.plan.validate()?)
    })
}

/// Builds a single simulation of `algorithm` from the config's parameters.
///
/// # Safety
/// `cfg` must be a live config, `algorithm` a NUL-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mabm_simulation_new(
    cfg: *const MabmConfig,
    algorithm: *const c_char,
    seed: u64,
    out: *mut *mut MabmSimulation,
) -> MabmStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let algorithm: Algorithm = str_arg(algorithm, "algorithm")?.parse()?;
        let config = SimulationConfig {
            algorithm,
            rng_seed: seed,
            world_seed: None,
            ..cfg.plan.base.clone()
        };
        let model = SimulationModel::new(config)?;
        *out = Box::into_raw(Box::new(MabmSimulation { model }));
        Ok(())
    })
}

/// Advances one step and writes its metrics to `out` when it is not NULL.
///
/// # Safety
/// `sim` must be a live simulation; `out` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mabm_simulation_step(sim: *mut MabmSimulation, out: *mut MabmStepMetrics) -> MabmStatus {
    guard(|| {
        let sim = handle(sim, "sim")?;
        let row = sim.model.step_once();
        if let Some(out) = out.as_mut() {
            *out = MabmStepMetrics::from(&row);
        }
        Ok(())
    })
}

/// Number of completed steps, 0 for NULL.
///
/// # Safety
/// `sim` must be NULL or a live simulation.
#[no_mangle]
pub unsafe extern "C" fn mabm_simulation_current_step(sim: *const MabmSimulation) -> u32 {
    sim.as_ref().map_or(0, |s| s.model.step())
}

/// # Safety
/// `sim` must be NULL or a pointer from [`mabm_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mabm_simulation_free(sim: *mut MabmSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs the whole batch and writes its CSV files to the configured `out` directory.
///
/// # Safety
/// `cfg` must be a live config.
#[no_mangle]
pub unsafe extern "C" fn mabm_run_batch(cfg: *const MabmConfig) -> MabmStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        run_batch(&cfg.plan)?;
        Ok(())
    })
}
