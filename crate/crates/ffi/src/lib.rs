//! C ABI over `nsverify`.
//!
//! Scenarios and trajectories are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`NsvStatus`]; on failure the message is available from
//! [`nsv_last_error`] on the same thread until the next failing call.
//! Strings returned through out-parameters are freed with [`nsv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nsverify::cli::{self, Check, ScenarioConfig};
use nsverify::solver::{self, Scenario, Trajectory};
use nsverify::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The scenario violates a well-posedness requirement.
    Validation = 3,
    /// A solve failed, blew up or violated a stability limit.
    Numerical = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

/// Opaque scenario handle.
pub struct NsvScenario(Scenario);

/// Opaque handle to a computed trajectory.
pub struct NsvTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NsvStatus {
    match e.root() {
        Error::Validation { .. } => NsvStatus::Validation,
        Error::Parse { .. } => NsvStatus::Parse,
        Error::Io { .. } | Error::Format(_) => NsvStatus::Io,
        Error::InvalidGrid(_)
        | Error::GridMismatch
        | Error::LengthMismatch { .. }
        | Error::IndexOutOfRange { .. } => NsvStatus::InvalidArgument,
        _ => NsvStatus::Numerical,
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NsvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsvStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            NsvStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            NsvStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            NsvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Arg(format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nuls removed")
        .into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn nsv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn nsv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn build(cfg: ScenarioConfig, auto_project: bool, out: *mut *mut NsvScenario) -> Result<(), Fail> {
    let out = unsafe { out_arg(out, "out")? };
    let sc = cfg.build(auto_project)?;
    *out = Box::into_raw(Box::new(NsvScenario(sc)));
    Ok(())
}

/// Builds a scenario from a preset name or a scenario file path.
///
/// # Safety
/// `source` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsv_scenario_load(
    source: *const c_char,
    auto_project: bool,
    out: *mut *mut NsvScenario,
) -> NsvStatus {
    guard(|| {
        let source = str_arg(source, "source")?;
        build(cli::load_config(Path::new(source))?, auto_project, out)
    })
}

/// Builds a scenario from TOML text.
///
/// # Safety
/// `toml` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsv_scenario_from_toml(
    toml: *const c_char,
    auto_project: bool,
    out: *mut *mut NsvScenario,
) -> NsvStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        build(
            ScenarioConfig::from_toml(text, "<toml>")?,
            auto_project,
            out,
        )
    })
}

/// Grid dimensions of a scenario.
///
/// # Safety
/// `scenario` must be a live handle; `dims` must point to three writable values.
#[no_mangle]
pub unsafe extern "C" fn nsv_scenario_dims(
    scenario: *const NsvScenario,
    dims: *mut usize,
) -> NsvStatus {
    guard(|| {
        let sc = handle(scenario, "scenario")?;
        if dims.is_null() {
            return Err(Fail::Null("dims"));
        }
        std::slice::from_raw_parts_mut(dims, 3).copy_from_slice(&sc.0.grid().dims());
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn nsv_scenario_free(scenario: *mut NsvScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Integrates the scenario, storing every `stride`-th state.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsv_run(
    scenario: *const NsvScenario,
    stride: usize,
    out: *mut *mut NsvTrajectory,
) -> NsvStatus {
    guard(|| {
        let sc = handle(scenario, "scenario")?;
        let out = out_arg(out, "out")?;
        if stride == 0 {
            return Err(Fail::Arg("stride must be at least 1".into()));
        }
        let traj = solver::run_with(&sc.0, stride, |_, _| {})?;
        *out = Box::into_raw(Box::new(NsvTrajectory(traj)));
        Ok(())
    })
}

/// Number of stored states, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nsv_trajectory_len(traj: *const NsvTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Time of stored state `index`.
///
/// # Safety
/// `traj` must be a live handle; `time` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsv_trajectory_time(
    traj: *const NsvTrajectory,
    index: usize,
    time: *mut f64,
) -> NsvStatus {
    guard(|| {
        let t = handle(traj, "traj")?;
        let time = out_arg(time, "time")?;
        let s = t.0.states().get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: t.0.len(),
        })?;
        *time = s.time;
        Ok(())
    })
}

/// Copies the velocity of state `index` into `buf` as three consecutive
/// component arrays in grid order (x fastest). `len` must be at least three
/// times the node count.
///
/// # Safety
/// `traj` must be a live handle; `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nsv_trajectory_velocity(
    traj: *const NsvTrajectory,
    index: usize,
    buf: *mut f64,
    len: usize,
) -> NsvStatus {
    guard(|| {
        let t = handle(traj, "traj")?;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        let s = t.0.states().get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: t.0.len(),
        })?;
        let n = s.velocity.grid().len();
        if len < 3 * n {
            return Err(Fail::Arg(format!(
                "buffer holds {len} values, need {}",
                3 * n
            )));
        }
        let out = std::slice::from_raw_parts_mut(buf, 3 * n);
        for (chunk, c) in out.chunks_mut(n).zip(s.velocity.components()) {
            chunk.copy_from_slice(c.values());
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn nsv_trajectory_free(traj: *mut NsvTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Evaluates a check (`max_principle`, `coincidence`, `pressure_identity`,
/// `apriori`, `stability`, `energy_residual`) and returns its report as
/// JSON in `*json`. `delta` and `seed` are used by `stability` only.
///
/// # Safety
/// `traj` must be a live handle, `check` a nul-terminated string and `json`
/// writable. The returned string is freed with [`nsv_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nsv_check(
    traj: *const NsvTrajectory,
    check: *const c_char,
    delta: f64,
    seed: u64,
    json: *mut *mut c_char,
) -> NsvStatus {
    guard(|| {
        let t = handle(traj, "traj")?;
        let name = str_arg(check, "check")?;
        let out = out_arg(json, "json")?;
        let check = Check::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Fail::Arg(format!("unknown check '{name}'")))?;
        let report = cli::evaluate_check(&t.0, check, delta, seed)?;
        *out = into_c_string(report.to_json(Some(seed)));
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(nsv_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn null_arguments_are_reported() {
        let mut sc = ptr::null_mut();
        assert_eq!(
            unsafe { nsv_scenario_load(ptr::null(), false, &mut sc) },
            NsvStatus::NullPointer
        );
        assert!(last_error().contains("source"));
        assert_eq!(unsafe { nsv_trajectory_len(ptr::null()) }, 0);
    }

    #[test]
    fn error_codes_follow_the_error_kind() {
        let mut sc = ptr::null_mut();
        let name = CString::new("compressive").unwrap();
        assert_eq!(
            unsafe { nsv_scenario_load(name.as_ptr(), false, &mut sc) },
            NsvStatus::Validation
        );
        assert!(sc.is_null());
        let bad = CString::new("viscosity = ").unwrap();
        assert_eq!(
            unsafe { nsv_scenario_from_toml(bad.as_ptr(), false, &mut sc) },
            NsvStatus::Parse
        );
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(nsv_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
