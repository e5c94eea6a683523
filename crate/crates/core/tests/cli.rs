use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_residuum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (out.status.code().unwrap(), v)
}

fn verdict<'a>(report: &'a Value, subject: &str) -> &'a Value {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["subject"] == subject)
        .unwrap_or_else(|| panic!("no verdict {subject}"))
}

fn warnings(report: &Value) -> Vec<String> {
    report["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["id"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn graph_invariants_documents() {
    let (code, r) = json(&["graph-invariants", &fixture("triangle.json")]);
    assert_eq!(code, 0);
    let g = &verdict(&r, "graph")["values"];
    assert_eq!(g["b1"], "1");
    assert_eq!(g["arithmetic_genus"], "1");
    assert_eq!(g["tropical_jacobian_dim"], "1");

    let (_, r) = json(&["graph-invariants", &fixture("chain.json")]);
    assert_eq!(verdict(&r, "graph")["values"]["b1"], "0");
    let (_, r) = json(&["graph-invariants", &fixture("theta.json")]);
    assert_eq!(verdict(&r, "graph")["values"]["b1"], "2");
    let (_, r) = json(&["graph-invariants", &fixture("elliptic_tail.json")]);
    assert_eq!(verdict(&r, "graph")["values"]["arithmetic_genus"], "1");
}

#[test]
fn disconnected_graph_is_an_input_error() {
    let out = run(&["graph-invariants", &fixture("disconnected.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));
}

#[test]
fn parse_errors_carry_position() {
    let dir = std::env::temp_dir().join(format!("residuum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"format_version\": \"1\",\n  \"components\": [}\n",
    )
    .unwrap();
    let out = run(&["graph-invariants", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error at 3:"));
}

#[test]
fn check_balance_pair_k3() {
    let (code, r) = json(&["check-balance", &fixture("pair_k3.json"), "--k", "3"]);
    assert_eq!(code, 0);
    let e = &verdict(&r, "edge q")["values"];
    assert_eq!(
        (e["res_plus"].as_str(), e["res_minus"].as_str()),
        (Some("1"), Some("-1"))
    );
    assert_eq!(verdict(&r, "component C1")["status"], "pass");
}

#[test]
fn check_balance_unbalanced_names_the_edge() {
    let (code, r) = json(&["check-balance", &fixture("unbalanced.json")]);
    assert_eq!(code, 1);
    let e = verdict(&r, "edge q");
    assert_eq!(e["status"], "fail");
    assert_eq!(e["values"]["sum"], "1");
}

#[test]
fn check_balance_triangle() {
    let (code, r) = json(&["check-balance", &fixture("triangle.json")]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&r, "balancing")["values"]["local_ok"], "true");
}

#[test]
fn check_balance_without_differential() {
    let out = run(&["check-balance", &fixture("chain.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no differential for k = 1"));
}

#[test]
fn construct_triangle_table() {
    let (code, r) = json(&[
        "construct",
        &fixture("triangle.json"),
        "--params",
        "q12=1,q23=2,q31=3",
    ]);
    assert_eq!(code, 0);
    for (edge, a) in [("q12", "1"), ("q23", "2"), ("q31", "3")] {
        let v = &verdict(&r, &format!("edge {edge}"))["values"];
        assert_eq!(v["res_plus"], a);
        assert_eq!(v["res_minus"], format!("-{a}"));
    }
}

#[test]
fn construct_zero_params() {
    let (code, r) = json(&[
        "construct",
        &fixture("triangle.json"),
        "--params",
        "q12=0,q23=0,q31=0",
    ]);
    assert_eq!(code, 0);
    for c in ["C1", "C2", "C3"] {
        assert_eq!(r["emitted"]["differentials"][0]["pieces"][c], "0");
    }
}

#[test]
fn construct_even_k_infinity_residues() {
    let (code, r) = json(&["construct", &fixture("pair_k3.json"), "--k", "4"]);
    assert_eq!(code, 0);
    assert_eq!(
        verdict(&r, "component C1")["values"]["residues"],
        "0: 1, inf: 1"
    );
    assert_eq!(
        verdict(&r, "component C2")["values"]["residues"],
        "0: -1, inf: -1"
    );
    assert!(warnings(&r).contains(&"W-EVEN-K-RESIDUE".to_string()));
}

#[test]
fn construct_unknown_edge() {
    let out = run(&[
        "construct",
        &fixture("triangle.json"),
        "--params",
        "q12=1,q23=1,q31=1,zz=1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown edge zz"));
}

#[test]
fn construct_round_trips_through_check_balance() {
    let dir = std::env::temp_dir().join(format!("residuum-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (file, k, params) in [
        ("triangle.json", "1", "q12=1/2,q23=-3,q31=7"),
        ("theta.json", "3", "e1=1,e2=2,e3=-5/4"),
        ("loops2.json", "2", "l1=1,l2=-1"),
    ] {
        let out_path = dir.join(format!("emitted-{file}"));
        let out = run(&[
            "construct",
            &fixture(file),
            "--k",
            k,
            "--params",
            params,
            "--emit",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let (_, r) = json(&["check-balance", out_path.to_str().unwrap(), "--k", k]);
        assert_eq!(
            verdict(&r, "balancing")["values"]["local_ok"],
            "true",
            "{file}"
        );
    }
}

#[test]
fn span_documents() {
    let (code, r) = json(&["span", &fixture("loops2.json")]);
    assert_eq!(code, 0);
    let s = &verdict(&r, "residue span")["values"];
    assert_eq!(
        (s["rank"].as_str(), s["spans_dual"].as_str()),
        (Some("2"), Some("true"))
    );

    let (_, r) = json(&["span", &fixture("triangle.json")]);
    assert_eq!(verdict(&r, "residue span")["values"]["rank"], "1");
    assert_eq!(verdict(&r, "residue rank")["values"]["im_res_dim"], "2");
    assert!(warnings(&r).contains(&"W-CONSTRAINT-COUNT".to_string()));

    let (_, r) = json(&["span", &fixture("chain.json")]);
    assert_eq!(verdict(&r, "dualizing sections")["values"]["dim_w"], "0");

    let out = run(&["span", &fixture("elliptic_tail.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive genus"));
}

#[test]
fn conductor_node_and_cusp() {
    let (code, r) = json(&[
        "conductor",
        "--singularity",
        "node",
        "--differential",
        "2/u; -2/v",
    ]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&r, "descent")["status"], "pass");

    let (code, r) = json(&[
        "conductor",
        "--singularity",
        "cusp",
        "--differential",
        "1/t",
    ]);
    assert_eq!(code, 1);
    assert_eq!(verdict(&r, "descent")["status"], "fail");
    assert_eq!(verdict(&r, "conductor annihilation")["status"], "pass");
    assert_eq!(verdict(&r, "weighted residue")["values"]["value"], "2");
    assert!(warnings(&r).contains(&"W-CUSP-EX2-CONFLICT".to_string()));

    let (code, _) = json(&[
        "conductor",
        "--singularity",
        "cusp",
        "--differential",
        "1/t^2",
    ]);
    assert_eq!(code, 0);
    let (code, _) = json(&[
        "conductor",
        "--singularity",
        "cusp",
        "--k",
        "3",
        "--differential",
        "1/t^3",
    ]);
    assert_eq!(code, 0);
    let (code, _) = json(&[
        "conductor",
        "--singularity",
        "cusp",
        "--k",
        "3",
        "--differential",
        "1/t^7",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn conductor_custom_and_truncation() {
    let (code, r) = json(&[
        "conductor",
        &fixture("singularities.json"),
        "--singularity",
        "a4",
    ]);
    assert_eq!(code, 0);
    let s = &verdict(&r, "singularity a4")["values"];
    assert_eq!(
        (s["conductor_exponents"].as_str(), s["delta"].as_str()),
        (Some("(4)"), Some("2"))
    );

    let out = run(&["conductor", "--singularity", "tacnode", "--trunc", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--trunc"));

    let (_, r) = json(&["conductor", "--singularity", "tacnode"]);
    assert!(warnings(&r).contains(&"W-TACNODE-CONDUCTOR".to_string()));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["check-balance".to_string(), fixture("triangle.json")],
        vec![
            "span".to_string(),
            fixture("theta.json"),
            "--json".to_string(),
        ],
        vec![
            "construct".to_string(),
            fixture("triangle.json"),
            "--params".into(),
            "q12=1,q23=2,q31=3".into(),
        ],
    ] {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&a).stdout, run(&a).stdout);
    }
}
