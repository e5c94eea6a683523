//! C ABI over `residuum`.
//!
//! Graphs and branch systems are opaque handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns
//! an [`RsdStatus`]; on failure the message is available from
//! [`rsd_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` are released with [`rsd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use residuum::balance::dualizing_section_space;
use residuum::cli::{self, ConductorRequest, CurveDocument};
use residuum::curvegraph::{arithmetic_genus, betti1, DualGraph};
use residuum::localsing::{conductor_exponents, BranchSystem};
use residuum::Error;
use serde::Deserialize;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    Truncation = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// A validated dual graph.
pub struct RsdGraph(DualGraph);

/// Branch parametrizations of one plane singularity.
pub struct RsdBranchSystem(BranchSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RsdStatus, msg: &str) -> RsdStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> RsdStatus {
    let status = match e {
        Error::Parse { .. } => RsdStatus::Parse,
        Error::TruncationTooSmall { .. } => RsdStatus::Truncation,
        _ => RsdStatus::Input,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> RsdStatus) -> RsdStatus {
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(RsdStatus::Internal, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, RsdStatus> {
    if p.is_null() {
        return Err(fail(RsdStatus::NullPointer, &format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RsdStatus::InvalidUtf8, &format!("{name} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, RsdStatus> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap().into_raw()
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rsd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static library version string.
#[no_mangle]
pub extern "C" fn rsd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a curve document and builds its dual graph.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_from_json(
    json: *const c_char,
    out: *mut *mut RsdGraph,
) -> RsdStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsdStatus::NullPointer, "out is null");
        }
        let text = match str_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match CurveDocument::parse(text).and_then(|d| d.graph()) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(RsdGraph(g)));
                RsdStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `g` must be null or a handle from [`rsd_graph_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_free(g: *mut RsdGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

unsafe fn graph_query(
    g: *const RsdGraph,
    out: *mut usize,
    f: impl FnOnce(&DualGraph) -> Result<usize, Error>,
) -> RsdStatus {
    guard(|| {
        if g.is_null() || out.is_null() {
            return fail(RsdStatus::NullPointer, "graph or out is null");
        }
        match f(&(*g).0) {
            Ok(v) => {
                *out = v;
                RsdStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Number of components.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_vertex_count(g: *const RsdGraph, out: *mut usize) -> RsdStatus {
    graph_query(g, out, |g| Ok(g.vertex_count()))
}

/// Number of nodes.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_edge_count(g: *const RsdGraph, out: *mut usize) -> RsdStatus {
    graph_query(g, out, |g| Ok(g.edge_count()))
}

/// First Betti number of the dual graph.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_betti1(g: *const RsdGraph, out: *mut usize) -> RsdStatus {
    graph_query(g, out, |g| Ok(betti1(g)))
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_arithmetic_genus(
    g: *const RsdGraph,
    out: *mut usize,
) -> RsdStatus {
    graph_query(g, out, |g| Ok(arithmetic_genus(g)))
}

/// Dimension of the space of global dualizing sections; all components must
/// be rational.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_graph_dualizing_dim(g: *const RsdGraph, out: *mut usize) -> RsdStatus {
    graph_query(g, out, |g| dualizing_section_space(g, 1).map(|w| w.len()))
}

/// Catalog singularity (`node`, `cusp`, `tacnode`) at the given truncation.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_branch_system_catalog(
    name: *const c_char,
    truncation: usize,
    out: *mut *mut RsdBranchSystem,
) -> RsdStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsdStatus::NullPointer, "out is null");
        }
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        match BranchSystem::catalog(name, truncation) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(RsdBranchSystem(b)));
                RsdStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `b` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsd_branch_system_free(b: *mut RsdBranchSystem) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Conductor exponents (one per branch) and δ. `len` receives the branch
/// count; if it exceeds `cap` nothing is written to `exponents` and
/// `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `b` must be a live handle, `exponents` valid for `cap` writes, `len` and
/// `delta` writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_branch_system_conductor(
    b: *const RsdBranchSystem,
    exponents: *mut u32,
    cap: usize,
    len: *mut usize,
    delta: *mut u32,
) -> RsdStatus {
    guard(|| {
        if b.is_null() || len.is_null() || delta.is_null() {
            return fail(RsdStatus::NullPointer, "argument is null");
        }
        let cd = match conductor_exponents(&(*b).0) {
            Ok(cd) => cd,
            Err(e) => return from_error(&e),
        };
        *len = cd.exponents.len();
        *delta = cd.delta;
        if cd.exponents.len() > cap {
            return fail(RsdStatus::BufferTooSmall, "exponent buffer too small");
        }
        if exponents.is_null() && !cd.exponents.is_empty() {
            return fail(RsdStatus::NullPointer, "exponents is null");
        }
        for (i, c) in cd.exponents.iter().enumerate() {
            *exponents.add(i) = *c;
        }
        RsdStatus::Ok
    })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Options {
    k: Option<u32>,
    params: Option<String>,
    singularity: Option<String>,
    differential: Option<String>,
    trunc: Option<usize>,
}

fn dispatch(command: &str, document: Option<&str>, opts: &Options) -> Result<cli::Report, Error> {
    let doc = || document.ok_or_else(|| Error::Input(format!("{command} needs a document")));
    let k = opts.k.unwrap_or(1);
    match command {
        "graph-invariants" => cli::cmd_graph_invariants(doc()?),
        "check-balance" => cli::cmd_check_balance(doc()?, k),
        "construct" => {
            let params = opts.params.as_deref().map(cli::parse_params).transpose()?;
            cli::cmd_construct(doc()?, k, params.as_ref())
        }
        "span" => cli::cmd_span(doc()?),
        "conductor" => {
            let singularity = opts
                .singularity
                .as_deref()
                .ok_or_else(|| Error::Input("conductor needs a singularity option".into()))?;
            cli::cmd_conductor(&ConductorRequest {
                document,
                singularity,
                differential: opts.differential.as_deref(),
                k,
                truncation: opts.trunc,
            })
        }
        "selftest" => Ok(cli::cmd_selftest()),
        other => Err(Error::Input(format!("unknown command {other}"))),
    }
}

/// Runs one CLI command and returns its JSON report.
///
/// `document` may be null for `conductor` and `selftest`. `options_json` is
/// null or an object with any of `k`, `params`, `singularity`,
/// `differential`, `trunc`. On `OK`, `*report_json` holds the report and
/// `*exit_code` the code the CLI would exit with.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `report_json` and
/// `exit_code` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsd_run_command(
    command: *const c_char,
    document: *const c_char,
    options_json: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> RsdStatus {
    guard(|| {
        if report_json.is_null() || exit_code.is_null() {
            return fail(RsdStatus::NullPointer, "output pointer is null");
        }
        let args = (|| {
            Ok((
                str_arg(command, "command")?,
                opt_str_arg(document, "document")?,
                opt_str_arg(options_json, "options_json")?,
            ))
        })();
        let (command, document, options) = match args {
            Ok(a) => a,
            Err(s) => return s,
        };
        let opts: Options = match options.map(serde_json::from_str).transpose() {
            Ok(o) => o.unwrap_or_default(),
            Err(e) => return fail(RsdStatus::Parse, &format!("options: {e}")),
        };
        match dispatch(command, document, &opts) {
            Ok(report) => {
                *exit_code = cli::exit_code(&report);
                *report_json = into_c_string(report.to_json());
                RsdStatus::Ok
            }
            Err(e) => {
                *exit_code = cli::error_exit_code(&e);
                from_error(&e)
            }
        }
    })
}
