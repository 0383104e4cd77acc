//! C interface to `twistconn`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Every fallible call returns a
//! [`TwcStatus`] and stores a message retrievable with [`twc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twistconn::harness::{default_checks, run_checks, Command};
use twistconn::report::Report;
use twistconn::scenario::{load_scenario, Scenario};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidScenario = 3,
    UnknownCommand = 4,
    Panic = 5,
}

/// A validated scenario.
pub struct TwcScenario(Scenario);

/// The outcome of running checks on a scenario.
pub struct TwcReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> TwcStatus) -> TwcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            TwcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TwcStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(TwcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        TwcStatus::InvalidUtf8
    })
}

/// The message of the most recent error on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn twc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a TOML scenario.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twc_scenario_load(text: *const c_char, out: *mut *mut TwcScenario) -> TwcStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return TwcStatus::NullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_scenario(text) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(TwcScenario(s)));
                TwcStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                TwcStatus::InvalidScenario
            }
        }
    })
}

/// Overrides the caps of a loaded scenario.
///
/// # Safety
/// `scenario` must come from [`twc_scenario_load`].
#[no_mangle]
pub unsafe extern "C" fn twc_scenario_set_caps(scenario: *mut TwcScenario, max_exponent: u32, max_degree: u32) -> TwcStatus {
    guard(|| {
        let Some(s) = scenario.as_mut() else {
            set_error("null scenario");
            return TwcStatus::NullPointer;
        };
        if max_exponent == 0 || max_degree == 0 {
            set_error("caps must be at least 1");
            return TwcStatus::InvalidScenario;
        }
        s.0.caps = twistconn::basis::Caps::new(max_exponent, max_degree as usize);
        TwcStatus::Ok
    })
}

/// # Safety
/// `scenario` must come from [`twc_scenario_load`] or be null.
#[no_mangle]
pub unsafe extern "C" fn twc_scenario_free(scenario: *mut TwcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the checks of a subcommand such as `"theorem"` or `"run"`.
///
/// # Safety
/// `scenario` must come from [`twc_scenario_load`], `command` must be a
/// nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twc_run(
    scenario: *const TwcScenario,
    command: *const c_char,
    out: *mut *mut TwcReport,
) -> TwcStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else {
            set_error("null scenario");
            return TwcStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer");
            return TwcStatus::NullPointer;
        }
        let name = match read_str(command) {
            Ok(n) => n,
            Err(st) => return st,
        };
        let Some(cmd) = Command::from_name(name) else {
            set_error(format!("unknown command `{name}`"));
            return TwcStatus::UnknownCommand;
        };
        match run_checks(&s.0, &default_checks(cmd, &s.0)) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(TwcReport(r)));
                TwcStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                TwcStatus::InvalidScenario
            }
        }
    })
}

/// `0` when no check found a counterexample, `1` otherwise, `-1` for null.
///
/// # Safety
/// `report` must come from [`twc_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn twc_report_exit_code(report: *const TwcReport) -> i32 {
    match report.as_ref() {
        None => -1,
        Some(r) => i32::from(r.0.any_fail()),
    }
}

/// Number of checks in a report.
///
/// # Safety
/// `report` must come from [`twc_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn twc_report_check_count(report: *const TwcReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.checks.len())
}

/// The JSON form of a report, to be released with [`twc_string_free`].
///
/// # Safety
/// `report` must come from [`twc_run`] and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twc_report_json(report: *const TwcReport, out: *mut *mut c_char) -> TwcStatus {
    guard(|| {
        let Some(r) = report.as_ref() else {
            set_error("null report");
            return TwcStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer");
            return TwcStatus::NullPointer;
        }
        *out = CString::new(r.0.to_json()).expect("json has no nul").into_raw();
        TwcStatus::Ok
    })
}

/// # Safety
/// `report` must come from [`twc_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn twc_report_free(report: *mut TwcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn twc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_turns_panics_into_status() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, TwcStatus::Panic);
        let msg = unsafe { CStr::from_ptr(twc_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn error_messages_drop_nul_bytes() {
        set_error("a\0b");
        let msg = unsafe { CStr::from_ptr(twc_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
