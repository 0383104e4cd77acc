use std::ffi::{CStr, CString};
use std::ptr;

use twistconn_ffi::*;

const GRASSMANN: &str = "q = \"2\"\nn = 2\n[caps]\nmax_exponent = 2\nmax_degree = 2\n";
const DY: &str = "q = \"2\"\n[caps]\nmax_exponent = 2\nmax_degree = 2\n[potentials]\nF = [\"(1,1): dy\"]\n";

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = twc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(text: &str) -> *mut TwcScenario {
    let mut s = ptr::null_mut();
    let st = unsafe { twc_scenario_load(cstr(text).as_ptr(), &mut s) };
    assert_eq!(st, TwcStatus::Ok);
    s
}

fn run(s: *const TwcScenario, command: &str) -> *mut TwcReport {
    let mut r = ptr::null_mut();
    let st = unsafe { twc_run(s, cstr(command).as_ptr(), &mut r) };
    assert_eq!(st, TwcStatus::Ok, "{}", last_error());
    r
}

#[test]
fn run_and_serialize() {
    let s = load(GRASSMANN);
    let r = run(s, "theorem");
    unsafe {
        assert_eq!(twc_report_exit_code(r), 0);
        assert!(twc_report_check_count(r) >= 2);
        let mut json = ptr::null_mut();
        assert_eq!(twc_report_json(r, &mut json), TwcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"curvature-theorem\""));
        twc_string_free(json);
        twc_report_free(r);
        twc_scenario_free(s);
    }
}

#[test]
fn counterexample_sets_exit_code() {
    let s = load(DY);
    let r = run(s, "check-hypotheses");
    unsafe {
        assert_eq!(twc_report_exit_code(r), 1);
        twc_report_free(r);
        twc_scenario_free(s);
    }
}

#[test]
fn caps_override() {
    let s = load(GRASSMANN);
    unsafe {
        assert_eq!(twc_scenario_set_caps(s, 1, 1), TwcStatus::Ok);
        assert_eq!(twc_scenario_set_caps(s, 0, 1), TwcStatus::InvalidScenario);
        let r = run(s, "check-axioms");
        let mut json = ptr::null_mut();
        assert_eq!(twc_report_json(r, &mut json), TwcStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"caps\": \"1,1\""));
        twc_string_free(json);
        twc_report_free(r);
        twc_scenario_free(s);
    }
}

#[test]
fn invalid_scenario_reports_message() {
    let mut s = ptr::null_mut();
    let text = cstr("n = 2\nS_matrix = [[\"1\", \"2\"], [\"2\", \"4\"]]\n");
    let st = unsafe { twc_scenario_load(text.as_ptr(), &mut s) };
    assert_eq!(st, TwcStatus::InvalidScenario);
    assert!(s.is_null());
    assert!(last_error().contains("S_matrix not invertible"));
}

#[test]
fn unknown_command() {
    let s = load(GRASSMANN);
    let mut r = ptr::null_mut();
    let st = unsafe { twc_run(s, cstr("frobnicate").as_ptr(), &mut r) };
    assert_eq!(st, TwcStatus::UnknownCommand);
    assert!(r.is_null());
    unsafe { twc_scenario_free(s) };
}

#[test]
fn null_arguments() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(twc_scenario_load(ptr::null(), &mut s), TwcStatus::NullPointer);
        assert_eq!(twc_scenario_load(cstr(GRASSMANN).as_ptr(), ptr::null_mut()), TwcStatus::NullPointer);
        let mut r = ptr::null_mut();
        assert_eq!(twc_run(ptr::null(), cstr("run").as_ptr(), &mut r), TwcStatus::NullPointer);
        assert_eq!(twc_report_exit_code(ptr::null()), -1);
        assert_eq!(twc_report_check_count(ptr::null()), 0);
        twc_scenario_free(ptr::null_mut());
        twc_report_free(ptr::null_mut());
        twc_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8() {
    let bytes = CString::new(vec![0xff, 0xfe]).unwrap();
    let mut s = ptr::null_mut();
    let st = unsafe { twc_scenario_load(bytes.as_ptr(), &mut s) };
    assert_eq!(st, TwcStatus::InvalidUtf8);
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/twistconn.h");
    for name in ["twc_scenario_load", "twc_run", "twc_report_json", "TWC_STATUS_OK", "TwcReport"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
