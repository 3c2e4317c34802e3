use std::ffi::{CStr, CString};
use std::ptr;

use serde_json::Value;
use sparse_membership_ffi::*;

const PROBLEM: &str = r#"{"vars":["z","w"],"F":["z + z*w + w^2","z + 2*z*w + 3*w^2"],"Phi":"z^2 + 2*z*w"}"#;

fn take(s: *mut std::ffi::c_char) -> Value {
    assert!(!s.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    unsafe { sm_string_free(s) };
    v
}

fn new_problem(json: &str) -> (SmStatus, *mut SmProblem) {
    let text = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    let st = unsafe { sm_problem_new(text.as_ptr(), &mut p) };
    (st, p)
}

#[test]
fn solve_then_verify_through_handles() {
    let (st, p) = new_problem(PROBLEM);
    assert_eq!(st, SmStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sm_solve(p, ptr::null(), &mut out) }, SmStatus::Ok);
    let sol = take(out);
    assert_eq!(sol["verified"], Value::Bool(true), "{sol}");

    let doc = CString::new(sol.to_string()).unwrap();
    assert_eq!(unsafe { sm_verify(p, doc.as_ptr(), &mut out) }, SmStatus::Ok);
    take(out);

    assert_eq!(unsafe { sm_check_infinity(p, &mut out) }, SmStatus::Ok);
    take(out);
    unsafe { sm_problem_free(p) };
}

#[test]
fn rhs_outside_q_is_an_input_error() {
    let (_, p) = new_problem(PROBLEM);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sm_solve_scaled(p, 1, 1, &mut out) }, SmStatus::InputError);
    take(out);
    let msg = unsafe { CStr::from_ptr(sm_last_error()) }.to_str().unwrap();
    assert!(msg.contains("outside Q"), "{msg}");
    unsafe { sm_problem_free(p) };
}

#[test]
fn bounds_filtered_by_theorem() {
    let (_, p) = new_problem(PROBLEM);
    let mut out = ptr::null_mut();
    let list = CString::new("noether").unwrap();
    assert_eq!(unsafe { sm_bounds(p, list.as_ptr(), &mut out) }, SmStatus::Ok);
    let v = take(out);
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0]["theorem"], "noether");
    unsafe { sm_problem_free(p) };
}

#[test]
fn bad_input_sets_last_error() {
    let (st, p) = new_problem(r#"{"vars":["x"],"F":["x +"]}"#);
    assert_eq!(st, SmStatus::InputError);
    assert!(p.is_null());
    let msg = unsafe { CStr::from_ptr(sm_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sm_analyze(ptr::null(), &mut out) }, SmStatus::NullArgument);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sm_problem_new(ptr::null(), &mut p) }, SmStatus::NullArgument);
    unsafe { sm_string_free(ptr::null_mut()) };
    unsafe { sm_problem_free(ptr::null_mut()) };
    assert!(!unsafe { CStr::from_ptr(sm_version()) }.to_str().unwrap().is_empty());
}
