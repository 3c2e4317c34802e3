//! C interface: opaque problem handles, JSON documents out, integer status codes.
//!
//! Every function returning a `char *` through an out-parameter hands over
//! ownership; release it with [`sm_string_free`]. On any status other than
//! `SM_STATUS_OK`, `sm_last_error` describes what went wrong on this thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use sparse_membership::cli::{self, CliError, ExitCode, Flags, Outcome, Problem, Settings};

/// Status codes; the first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    /// Infeasible, false, or a failed hypothesis.
    False = 1,
    /// Undecided within the Gröbner budget.
    Unknown = 2,
    InputError = 3,
    NullArgument = 4,
    Panic = 5,
}

/// A parsed problem.
pub struct SmProblem {
    problem: Problem,
    settings: Settings,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(code: ExitCode) -> SmStatus {
    match code {
        ExitCode::Ok => SmStatus::Ok,
        ExitCode::False => SmStatus::False,
        ExitCode::Unknown => SmStatus::Unknown,
        ExitCode::InputError => SmStatus::InputError,
    }
}

/// Runs `f`, turning panics and errors into status codes.
fn guard(f: impl FnOnce() -> Result<SmStatus, (SmStatus, String)>) -> SmStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (SmStatus, String)> {
    if p.is_null() {
        return Err((SmStatus::NullArgument, format!("{name} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SmStatus::InputError, format!("{name} is not valid UTF-8")))
}

fn cli_err(e: CliError) -> (SmStatus, String) {
    (status_of(e.exit_code()), e.to_string())
}

unsafe fn emit(out: *mut *mut c_char, r: Result<Outcome, CliError>) -> Result<SmStatus, (SmStatus, String)> {
    if out.is_null() {
        return Err((SmStatus::NullArgument, "out is NULL".into()));
    }
    *out = ptr::null_mut();
    let outcome = r.unwrap_or_else(|e| e.outcome());
    let text = CString::new(outcome.render(false)).expect("JSON has no NUL bytes");
    *out = text.into_raw();
    let status = status_of(outcome.code);
    if status != SmStatus::Ok {
        let msg = outcome.json["error"].as_str().unwrap_or("see the returned document").to_string();
        set_error(&msg);
    }
    Ok(status)
}

unsafe fn problem_ref<'a>(p: *const SmProblem) -> Result<&'a SmProblem, (SmStatus, String)> {
    p.as_ref().ok_or((SmStatus::NullArgument, "problem is NULL".into()))
}

/// Parses a problem file given as JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_problem_new(json: *const c_char, out: *mut *mut SmProblem) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return Err((SmStatus::NullArgument, "out is NULL".into()));
        }
        *out = ptr::null_mut();
        let text = str_arg(json, "json")?;
        let problem = Problem::from_json_str(text).map_err(cli_err)?;
        let settings = Settings::resolve(&Flags::default(), &problem.options).map_err(cli_err)?;
        *out = Box::into_raw(Box::new(SmProblem { problem, settings }));
        Ok(SmStatus::Ok)
    })
}

/// # Safety
/// `p` must come from [`sm_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sm_problem_free(p: *mut SmProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets the Gröbner pair budget for later calls on this problem.
///
/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn sm_problem_set_budget(p: *mut SmProblem, budget: usize) -> SmStatus {
    guard(|| {
        let p = p.as_mut().ok_or((SmStatus::NullArgument, "problem is NULL".to_string()))?;
        p.settings.budget = sparse_membership::ideals::Budget(budget);
        Ok(SmStatus::Ok)
    })
}

/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_analyze(p: *const SmProblem, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        emit(out, cli::analyze(&p.problem, &p.settings))
    })
}

/// Bound certificates; `theorems` is NULL or a comma-separated list.
///
/// # Safety
/// `p` must be a live problem handle, `theorems` NULL or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sm_bounds(p: *const SmProblem, theorems: *const c_char, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let mut settings = p.settings.clone();
        if !theorems.is_null() {
            let list = str_arg(theorems, "theorems")?;
            let flags = Flags {
                theorem: list.split(',').map(|s| s.trim().to_string()).collect(),
                ..Default::default()
            };
            settings.theorems = Settings::resolve(&flags, &p.problem.options).map_err(cli_err)?.theorems;
        }
        emit(out, cli::bounds(&p.problem, &settings))
    })
}

/// Solves at a certificate (JSON text) or, when NULL, at the smallest certified Q.
///
/// # Safety
/// `p` must be a live problem handle, `certificate` NULL or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sm_solve(p: *const SmProblem, certificate: *const c_char, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let cert = if certificate.is_null() {
            None
        } else {
            let text = str_arg(certificate, "certificate")?;
            Some(serde_json::from_str(text).map_err(|e| (SmStatus::InputError, e.to_string()))?)
        };
        emit(out, cli::solve(&p.problem, &p.settings, cert.as_ref()))
    })
}

/// Solves at `Q = c·P` with exponent `nu`.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_solve_scaled(p: *const SmProblem, nu: u32, c: i64, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let mut settings = p.settings.clone();
        settings.c = Some(c);
        settings.nu = Some(nu);
        emit(out, cli::solve(&p.problem, &settings, None))
    })
}

/// Checks a solution document (`G`, `nu`, `Q.vertices`).
///
/// # Safety
/// `p` must be a live problem handle, `solution` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sm_verify(p: *const SmProblem, solution: *const c_char, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        let text = str_arg(solution, "solution")?;
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| (SmStatus::InputError, e.to_string()))?;
        emit(out, cli::verify(&p.problem, &doc))
    })
}

/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_check_infinity(p: *const SmProblem, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let p = problem_ref(p)?;
        emit(out, cli::check_infinity(&p.problem, &p.settings))
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
