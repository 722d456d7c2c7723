//! End-to-end checks of the command-line interface: exit codes, report
//! shape, and determinism.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ncjordan"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn verify_symbolic_k3_passes() {
    let (code, stdout, _) = run(&["verify", "k3", "--alpha", "a", "--beta", "b", "--gamma", "g"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["pass"], true);
    // The report embeds the full algebra tensor.
    assert_eq!(v["algebra"]["dim"], 3);
    assert!(v["algebra"]["table"].as_array().unwrap().len() > 0);
}

#[test]
fn verify_d0_passes() {
    // t = 0 is not simple but still satisfies the identities.
    let (code, stdout, _) = run(&["verify", "dt", "--t", "0", "--alpha", "a"]);
    assert_eq!(code, 0, "stdout: {}", stdout);
}

#[test]
fn verify_bad_tensor_exits_one() {
    let dir = std::env::temp_dir().join("ncjordan-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    // e·f = f but f·e = -f with f·f = e: fails flexibility.
    std::fs::write(
        &path,
        r#"{
            "field": {"kind": "q"},
            "dim": 2,
            "parity": [0, 0],
            "names": ["e", "f"],
            "table": [[0, 0, [[0, "1"]]], [0, 1, [[1, "1"]]], [1, 1, [[0, "1"]]]]
        }"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn malformed_input_exits_two() {
    let (code, _, stderr) = run(&["verify", "nosuchfamily"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown family"));
}

#[test]
fn budget_exceeded_exits_three() {
    let (code, _, _) = run(&[
        "aut", "dt", "--t", "2", "--alpha", "2", "--field", "gf5", "--budget", "10",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn derive_reports_dims() {
    let (code, stdout, _) = run(&["derive", "k3", "--alpha", "1/2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["derivations"]["dims"][0], 3);
    assert_eq!(v["derivations"]["dims"][1], 2);
    assert_eq!(v["closure"]["closed"], true);
}

#[test]
fn aut_oracle_counts_k3() {
    let (code, stdout, _) = run(&["aut", "k3", "--alpha", "2", "--field", "gf5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["count"], 4);
    assert_eq!(v["group_closed"], true);
}

#[test]
fn grassmann_solver_dims() {
    let (code, stdout, _) = run(&["grassmann", "gras-der", "--n", "3", "--a", "diag:1,1,x1^x2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["even_dim"], 1);
    assert_eq!(v["odd_dim"], 2);
}

#[test]
fn reports_are_deterministic() {
    let (_, first, _) = run(&["derive", "k3", "--alpha", "1/2"]);
    let (_, second, _) = run(&["derive", "k3", "--alpha", "1/2"]);
    assert_eq!(first, second);
}

#[test]
fn isosearch_compact_selectors() {
    let (code, stdout, _) = run(&[
        "isosearch", "k3", "--alpha", "2", "--field", "gf5", "--b", "k3:2,0,0",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["isomorphic"], true);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("ncjordan-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let _ = std::fs::remove_file(&path);
    let (code, stdout, _) = run(&[
        "verify", "k3", "--alpha", "1/2", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
}
