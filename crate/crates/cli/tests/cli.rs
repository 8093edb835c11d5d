use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chabauty")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chabauty-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn quick_selftest_exits_zero() {
    let out = run(&["selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["passed"], true);
    assert_eq!(doc["manifest"]["command"], "selftest");
    assert!(doc["manifest"]["seed"].is_u64());
}

#[test]
fn document_shape_and_exact_numbers() {
    let doc = json(&run(&["bound", "coleman", "--genus", "2", "--p", "7", "--count", "8"]));
    for key in ["manifest", "inputs_echo", "result", "checks"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["result"]["bound_int"], "10");
    assert!(doc["manifest"].get("timestamp").is_none());
    let stamped = json(&run(&["--stamp", "bound", "coleman", "--genus", "2", "--p", "7", "--count", "8"]));
    assert!(stamped["manifest"]["timestamp"].is_u64());
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["count", "zeta", "--preset", "nodal-cubic", "--q", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["bound", "coleman", "--genus", "2", "--p", "7", "--count", "8", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = run(&["jets", "mx", "--preset", "no-such-thing", "--p", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "usage");
}

#[test]
fn hypothesis_failures_exit_two() {
    let out = run(&["bound", "sym2", "--genus", "3", "--p", "509", "--count", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["bound", "surface", "--p", "7", "--c1sq", "1", "--nxk", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"]["bound_int"], "74");
    let out = run(&["bound", "surface", "--p", "7", "--c1sq", "1", "--nxk", "50", "--formula-only"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn schema_violations_name_json_pointers() {
    let path = scratch(
        "missing.json",
        r#"{"poly": "y^2*z - x^3", "q": 5, "genera": [0], "branches": [{"point": ["0", "0", "1"]}]}"#,
    );
    let out = run(&["count", "weil", "--branches", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["error"]["kind"], "parse");
    assert!(doc["error"]["message"].as_str().unwrap().contains("/branches/0/params"));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let path = scratch("broken.json", "{\n  \"poly\": \"x\",\n  \"q\": 5,,\n}");
    let out = run(&["count", "weil", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = json(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 3 column"), "{msg}");
}

#[test]
fn valid_branch_file_and_out_flag() {
    let path = scratch(
        "cusp.json",
        r#"[{"point": ["0", "0", "1"], "params": [["t^2", "t^3"]], "field_ext": 1}]"#,
    );
    let target = path.with_file_name("report.json");
    let out = run(&[
        "count", "weil", "--branches", path.to_str().unwrap(), "--poly", "y^2*z - x^3", "--q", "5", "--genera", "0",
        "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["result"]["deltas"], serde_json::json!([1]));
    assert_eq!(doc["result"]["count"]["a_d"], 6);
}

#[test]
fn jet_search_from_json_input() {
    let path = scratch(
        "forms.json",
        r#"{"version": 1, "p": 7, "omega1": "ds1 + (s1^2) ds2", "omega2": "ds1 + (s2^2) ds2",
            "point": ["0", "0"], "branches": [{"params": ["t", "t"]}, {"params": ["t", "-t"]}]}"#,
    );
    let doc = json(&run(&["--json", path.to_str().unwrap(), "jets", "mx"]));
    assert_eq!(doc["result"]["m"], 2);
    assert_eq!(doc["result"]["bound_thm_over"], 2);
}

#[test]
fn capped_jet_search_is_inconclusive() {
    let out = run(&["jets", "mx", "--omega1", "(s2) ds1", "--omega2", "(s2) ds2", "--p", "5", "--mcap", "4", "--ext", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    assert_eq!(doc["result"]["status"], "lower_bound");
    assert_eq!(doc["result"]["m"], 4);
}

#[test]
fn enumeration_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_chabauty"))
        .args(["count", "zeta", "--poly", "y^2*z - x^3", "--q", "5", "--nmax", "3"])
        .env("CC_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["kind"], "resource");
}

#[test]
fn fgroup_and_zeros_reports() {
    let doc = json(&run(&["fgroup", "exp", "--kind", "elliptic", "--a", "0,0,1,0,0", "--p", "5", "--prec", "16", "--order", "10"]));
    assert_eq!(doc["result"]["exp"].as_array().unwrap().len(), 1);
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fail"));
    let doc = json(&run(&["zeros", "--h", "5 + z^2 - z^3", "--p", "5", "--rho", "1/2"]));
    assert_eq!(doc["result"]["nu"], 2);
    assert_eq!(doc["result"]["bound_floor"], "2");
}
