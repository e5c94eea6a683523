use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use residuum_ffi::*;

const TRIANGLE: &str = r#"{
  "format_version": "1",
  "components": [{"id": "A"}, {"id": "B"}, {"id": "C"}],
  "edges": [
    {"id": "ab", "plus": {"component": "A"}, "minus": {"component": "B"}},
    {"id": "bc", "plus": {"component": "B"}, "minus": {"component": "C"}},
    {"id": "ca", "plus": {"component": "C"}, "minus": {"component": "A"}}
  ],
  "differentials": [{"k": 1, "edge_params": {"ab": "1", "bc": "1", "ca": "1"}}]
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = rsd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn run(command: &str, doc: Option<&str>, opts: Option<&str>) -> (RsdStatus, i32, Option<String>) {
    let command = c(command);
    let doc = doc.map(c);
    let opts = opts.map(c);
    let mut out: *mut c_char = ptr::null_mut();
    let mut code = -1;
    let status = unsafe {
        rsd_run_command(
            command.as_ptr(),
            doc.as_ref().map_or(ptr::null(), |d| d.as_ptr()),
            opts.as_ref().map_or(ptr::null(), |o| o.as_ptr()),
            &mut out,
            &mut code,
        )
    };
    let text = (!out.is_null()).then(|| {
        let s = unsafe { CStr::from_ptr(out) }
            .to_string_lossy()
            .into_owned();
        unsafe { rsd_string_free(out) };
        s
    });
    (status, code, text)
}

#[test]
fn graph_handle() {
    let json = c(TRIANGLE);
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { rsd_graph_from_json(json.as_ptr(), &mut g) },
        RsdStatus::Ok
    );
    let mut v = 0;
    for (f, want) in [
        (rsd_graph_vertex_count as unsafe extern "C" fn(_, _) -> _, 3),
        (rsd_graph_edge_count, 3),
        (rsd_graph_betti1, 1),
        (rsd_graph_arithmetic_genus, 1),
        (rsd_graph_dualizing_dim, 1),
    ] {
        assert_eq!(unsafe { f(g, &mut v) }, RsdStatus::Ok);
        assert_eq!(v, want);
    }
    unsafe { rsd_graph_free(g) };
}

#[test]
fn graph_errors() {
    let mut g = ptr::null_mut();
    let bad = c("{\n  \"format_version\": 1");
    assert_eq!(
        unsafe { rsd_graph_from_json(bad.as_ptr(), &mut g) },
        RsdStatus::Parse
    );
    assert!(last_error().contains("parse error at 2:"));
    assert!(g.is_null());

    let disconnected = c(r#"{"format_version": "1", "components": [{"id": "A"}, {"id": "B"}]}"#);
    assert_eq!(
        unsafe { rsd_graph_from_json(disconnected.as_ptr(), &mut g) },
        RsdStatus::Input
    );
    assert_eq!(
        unsafe { rsd_graph_from_json(ptr::null(), &mut g) },
        RsdStatus::NullPointer
    );

    let mut v = 0;
    assert_eq!(
        unsafe { rsd_graph_betti1(ptr::null(), &mut v) },
        RsdStatus::NullPointer
    );
    unsafe { rsd_graph_free(ptr::null_mut()) };
}

#[test]
fn branch_system_conductor() {
    let mut b = ptr::null_mut();
    let name = c("tacnode");
    assert_eq!(
        unsafe { rsd_branch_system_catalog(name.as_ptr(), 12, &mut b) },
        RsdStatus::Ok
    );
    let mut exps = [0u32; 2];
    let (mut len, mut delta) = (0, 0);
    let status =
        unsafe { rsd_branch_system_conductor(b, exps.as_mut_ptr(), 1, &mut len, &mut delta) };
    assert_eq!((status, len), (RsdStatus::BufferTooSmall, 2));
    let status =
        unsafe { rsd_branch_system_conductor(b, exps.as_mut_ptr(), 2, &mut len, &mut delta) };
    assert_eq!((status, exps, delta), (RsdStatus::Ok, [2, 2], 2));
    unsafe { rsd_branch_system_free(b) };

    let small = unsafe { rsd_branch_system_catalog(name.as_ptr(), 4, &mut b) };
    assert_eq!(small, RsdStatus::Ok);
    let status =
        unsafe { rsd_branch_system_conductor(b, exps.as_mut_ptr(), 2, &mut len, &mut delta) };
    assert_eq!(status, RsdStatus::Truncation);
    unsafe { rsd_branch_system_free(b) };

    let unknown = c("A7");
    assert_eq!(
        unsafe { rsd_branch_system_catalog(unknown.as_ptr(), 12, &mut b) },
        RsdStatus::Input
    );
}

#[test]
fn run_command_reports() {
    let (status, code, text) = run("check-balance", Some(TRIANGLE), None);
    assert_eq!((status, code), (RsdStatus::Ok, 0));
    let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
    assert_eq!(report["command"], "check-balance");

    let (status, code, _) = run(
        "construct",
        Some(TRIANGLE),
        Some(r#"{"params": "ab=1,bc=2,ca=3"}"#),
    );
    assert_eq!((status, code), (RsdStatus::Ok, 0));

    let (status, code, _) = run(
        "conductor",
        None,
        Some(r#"{"singularity": "cusp", "differential": "1/t"}"#),
    );
    assert_eq!((status, code), (RsdStatus::Ok, 1));

    let (status, code, _) = run(
        "conductor",
        None,
        Some(r#"{"singularity": "tacnode", "trunc": 5}"#),
    );
    assert_eq!((status, code), (RsdStatus::Truncation, 3));

    let (status, code, _) = run("span", None, None);
    assert_eq!((status, code), (RsdStatus::Input, 2));
    let (status, _, _) = run("bogus", Some(TRIANGLE), None);
    assert_eq!(status, RsdStatus::Input);
    assert!(last_error().contains("unknown command bogus"));
    let (status, _, _) = run("span", Some(TRIANGLE), Some(r#"{"kk": 1}"#));
    assert_eq!(status, RsdStatus::Parse);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(rsd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header: PathBuf = [env!("CARGO_MANIFEST_DIR"), "include", "residuum.h"]
        .iter()
        .collect();
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "rsd_graph_from_json",
        "rsd_graph_dualizing_dim",
        "rsd_branch_system_conductor",
        "rsd_run_command",
        "rsd_string_free",
        "RSD_STATUS_TRUNCATION = 5",
        "typedef struct RsdGraph RsdGraph",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

/// Builds the static library, then compiles and runs the C smoke program
/// against it and the generated header.
#[test]
fn c_smoke_program() {
    if std::process::Command::new("cc")
        .arg("--version")
        .output()
        .is_err()
    {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let mut build = std::process::Command::new(cargo);
    build.args(["build", "--quiet", "-p", "residuum-ffi", "--lib"]);
    if !cfg!(debug_assertions) {
        build.arg("--release");
    }
    assert!(build.status().unwrap().success());

    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    let lib = tmp
        .parent()
        .unwrap()
        .join(profile)
        .join("libresiduum_ffi.a");
    let exe = tmp.join("rsd_smoke");
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("parse error"));
}
