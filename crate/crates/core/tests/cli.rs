use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn wct(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wct"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn wct");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gallery(args: &[&str]) -> String {
    let out = wct(args, "");
    assert_eq!(out.status.code(), Some(0));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn symmetric_gallery_is_not_two_expansive() {
    let spec = gallery(&["gallery", "symmetric", "8"]);
    let out = wct(&["classify", "--kmax", "2"], &spec);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["is_2_expansive"], Value::Bool(false));
}

#[test]
fn geometric_spectrum_has_two_nonzero_values() {
    let spec: Value = serde_json::from_str(&gallery(&["gallery", "geometric", "0.5", "60"])).unwrap();
    let mut spec = spec;
    // u = t, w = 1 + 1/t
    let n = spec["weights"].as_array().unwrap().len();
    let u: Vec<[f64; 2]> = (1..=n).map(|t| [t as f64, 0.0]).collect();
    let w: Vec<[f64; 2]> = (1..=n).map(|t| [1.0 + 1.0 / t as f64, 0.0]).collect();
    spec["functions"] = serde_json::json!({"u": u, "w": w});
    let out = wct(&["spectrum"], &spec.to_string());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["nonzero_predicted"].as_array().unwrap().len(), 2);
    assert_eq!(v["nonzero_sets_match"], Value::Bool(true));
}

#[test]
fn every_command_accepts_a_gallery_pipe() {
    for args in [vec!["gallery", "symmetric", "4"], vec!["gallery", "geometric", "0.3", "12"], vec!["gallery", "product", "2", "3"]] {
        let spec = gallery(&args);
        for cmd in ["report", "expect", "spectrum", "polar", "classify"] {
            let out = wct(&[cmd], &spec);
            assert_eq!(out.status.code(), Some(0), "{args:?} {cmd}: {}", String::from_utf8_lossy(&out.stderr));
            json(&out);
        }
    }
}

#[test]
fn file_argument_matches_stdin() {
    let spec = gallery(&["gallery", "symmetric", "3"]);
    let path = std::env::temp_dir().join(format!("wct-cli-{}.json", std::process::id()));
    std::fs::write(&path, &spec).unwrap();
    let from_file = wct(&["expect", path.to_str().unwrap()], "");
    let from_stdin = wct(&["expect"], &spec);
    std::fs::remove_file(&path).ok();
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
}

#[test]
fn reruns_are_byte_identical() {
    let spec = gallery(&["gallery", "geometric", "0.5", "30"]);
    let a = wct(&["classify", "--kmax", "3", "--seed", "42"], &spec);
    let b = wct(&["classify", "--kmax", "3", "--seed", "42"], &spec);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_specs_exit_2_and_name_the_field() {
    let cases = [
        (r#"{"weights": [1.0], "blocks": []}"#, "blocks", "NotAPartition"),
        (r#"{"weights": [1.0, 0.0], "blocks": [[0, 1]]}"#, "weights", ""),
        (r#"{"weights": [1.0], "blocks": [[0]], "functions": {"u": [[1, 0], [1, 0]]}}"#, "functions.u", ""),
        ("not json", "", ""),
    ];
    for (text, field, fragment) in cases {
        let out = wct(&["report"], text);
        assert_eq!(out.status.code(), Some(2), "{text}");
        let v = json(&out);
        if !field.is_empty() {
            assert_eq!(v["error"]["field"], Value::String(field.into()), "{text}");
        }
        assert!(v["error"]["message"].as_str().unwrap().contains(fragment), "{text}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wct(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(wct(&["gallery", "geometric", "1.5", "10"], "").status.code(), Some(2));
    let spec = gallery(&["gallery", "symmetric", "2"]);
    assert_eq!(wct(&["polar", "--format", "csv"], &spec).status.code(), Some(2));
}

#[test]
fn classify_needs_p_equal_two() {
    let spec = gallery(&["gallery", "symmetric", "2"]);
    let out = wct(&["classify", "--p", "3"], &spec);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["error"].is_object());
}

#[test]
fn csv_views_have_headers() {
    let spec = gallery(&["gallery", "symmetric", "3"]);
    for cmd in ["spectrum", "classify"] {
        let out = wct(&[cmd, "--format", "csv"], &spec);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let mut rows = csv::Reader::from_reader(text.as_bytes());
        let width = rows.headers().unwrap().len();
        assert!(width > 1);
        assert!(rows.records().all(|r| r.unwrap().len() == width));
    }
}
