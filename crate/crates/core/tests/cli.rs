use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn qtorus(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(args)
        .env("QTORUS_THREADS", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> Value {
    assert!(out.stdout.is_empty());
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn global_spec_from_file_and_stdin_agree() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/specs/global_torus.json");
    let from_file = qtorus(&["global", "--input", path.to_str().unwrap()], None);
    let from_stdin = qtorus(&["global"], Some(&std::fs::read_to_string(&path).unwrap()));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    let report = stdout_json(&from_file);
    let dims: Vec<&Value> = report["blocks"].as_array().unwrap().iter().map(|b| &b["block_dim"]).collect();
    assert_eq!(dims, vec![&json!(2); 3]);
    assert_eq!(report["checks"]["omega_matches_cochain_oracle"], json!(true));
}

#[test]
fn level_echo_is_a_valid_spec() {
    let spec = json!({"task": "local", "level": {"c_matrix": [[2, 1], [0, 1]], "zeta": "1/6"}, "bound": 1});
    let first = stdout_json(&qtorus(&["local"], Some(&spec.to_string())));
    let again = json!({"task": "local", "level": first["level"], "bound": 1});
    let second = qtorus(&["local"], Some(&again.to_string()));
    assert_eq!(serde_json::from_slice::<Value>(&second.stdout).unwrap(), first);
}

#[test]
fn surface_task_reports_euler_characteristic() {
    for (genus, rank) in [(0, 1), (1, 2), (3, 1)] {
        let spec = json!({"task": "surface", "surface": {"genus": genus, "rank": rank}});
        let report = stdout_json(&qtorus(&["surface"], Some(&spec.to_string())));
        assert_eq!(report["euler_characteristic"], json!((2 - 2 * genus) * rank));
    }
}

#[test]
fn sign_monodromy_has_torsion_components() {
    let spec = json!({
        "task": "bunt",
        "surface": {"genus": 1, "rank": 1, "monodromy": [[[-1]], [[1]]]},
        "level": {"c_matrix": [[1]], "zeta": "1/2"}
    });
    let report = stdout_json(&qtorus(&["bunt"], Some(&spec.to_string())));
    let bun = &report["bun_t"];
    assert_eq!(bun["pi0_bun_t"], json!({"free_rank": 0, "torsion": [2]}));
    assert_eq!(bun["pi1_bun_t_degree_zero"], json!({"free_rank": 0, "torsion": [2]}));
    assert_eq!(bun["identification_holds"], json!(true));
    assert_eq!(bun["blocks"].as_array().unwrap().len(), 2);
}

#[test]
fn text_format_is_plain() {
    let spec = json!({"task": "surface", "surface": {"genus": 1, "rank": 1}});
    let out = qtorus(&["surface", "--format", "text"], Some(&spec.to_string()));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("task: surface"));
    assert!(text.contains("euler_characteristic: 0"));
}

#[test]
fn validation_errors_exit_two_with_distinct_codes() {
    let cases = [
        ("{", "invalid_json"),
        (r#"{"task":"local","level":{"c_matrix":[[1]],"zeta":"1/4"},"colour":1}"#, "unknown_field"),
        (r#"{"task":"local","level":{"c_matrix":[[1,2]],"zeta":"1/4"}}"#, "non_square_matrix"),
        (r#"{"task":"local","level":{"c_matrix":[[1]]}}"#, "missing_field"),
        (r#"{"task":"global","surface":{"genus":1,"rank":1},"level":{"c_matrix":[[1]],"zeta":"1/4"}}"#, "task_mismatch"),
    ];
    let mut seen = Vec::new();
    for (spec, code) in cases {
        let out = qtorus(&["local"], Some(spec));
        assert_eq!(out.status.code(), Some(2), "{spec}");
        let err = error_of(&out);
        assert_eq!(err["code"], json!(code), "{spec}");
        assert!(err["message"].is_string() && err["path"].is_string());
        seen.push(code);
    }
    seen.dedup();
    assert_eq!(seen.len(), cases.len());
}

#[test]
fn infinite_components_need_a_selection() {
    let spec = json!({"task": "global", "surface": {"genus": 1, "rank": 1}, "level": {"c_matrix": [[1]], "zeta": "1/4"}});
    let out = qtorus(&["global"], Some(&spec.to_string()));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["code"], json!("components_required"));
}

#[test]
fn missing_input_file_is_reported() {
    let out = qtorus(&["surface", "--input", "/nonexistent/spec.json"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["code"], json!("io_error"));
}

#[test]
fn selfcheck_output_is_seed_stable() {
    let a = qtorus(&["selfcheck", "--seed", "11"], None);
    let b = qtorus(&["selfcheck", "--seed", "11"], None);
    assert_eq!(a.stdout, b.stdout);
    let report = stdout_json(&a);
    assert_eq!(report["disagreements"], json!([]));
}
