//! End-to-end tests of the command-line interface: exit codes, JSON
//! shapes, round-trips and output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_klyachko"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn p2_fan(dir: &Path) -> String {
    write(
        dir,
        "p2.json",
        r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[0,2],[1,2]]}"#,
    )
}

fn p3_fan(dir: &Path) -> String {
    write(
        dir,
        "p3.json",
        r#"{"dim":3,"rays":[[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]],
            "max_cones":[[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#,
    )
}

fn o1_divisor(dir: &Path, rays: usize) -> String {
    let mut coeffs = vec![0i64; rays];
    coeffs[rays - 1] = 1;
    write(
        dir,
        &format!("o1_{rays}.json"),
        &format!("{{\"coeffs\":{coeffs:?}}}"),
    )
}

#[test]
fn validate_fan_reports_smooth_complete() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p2_fan(dir.path());
    let out = run(&["validate-fan", "--fan", &fan]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["smooth"], Value::Bool(true));
    assert_eq!(v["complete"], Value::Bool(true));
}

#[test]
fn degrees_of_unit_polarisation() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p2_fan(dir.path());
    let div = o1_divisor(dir.path(), 3);
    let out = run(&["degrees", "--fan", &fan, "--divisor", &div]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["deg"], serde_json::json!([1, 1, 1]));
}

#[test]
fn build_check_and_locate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p2_fan(dir.path());
    let div = o1_divisor(dir.path(), 3);
    let family_path = dir.path().join("family.json");
    let out = run(&[
        "build-er",
        "--fan",
        &fan,
        "--divisor",
        &div,
        "--rank",
        "2",
        "--out",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // The emitted family re-parses and checks stable with slope -3/2.
    let out = run(&[
        "check-stability",
        "--fan",
        &fan,
        "--divisor",
        &div,
        "--family",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["status"], Value::String("stable".into()));
    assert_eq!(v["slope"], Value::String("-3/2".into()));
    assert_eq!(v["exhaustive"], Value::Bool(true));
    assert!(v.get("witness").is_none());

    // Rank equals dimension here, so the family is locally free.
    let out = run(&[
        "singular-locus",
        "--fan",
        &fan,
        "--family",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["locally_free"], Value::Bool(true));
    assert_eq!(v["sing_dim"], Value::String("empty".into()));

    // Slope command reports the exact invariant record.
    let out = run(&[
        "slope",
        "--fan",
        &fan,
        "--divisor",
        &div,
        "--family",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["iota"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["c1"], serde_json::json!([-1, -1, -1]));
    assert_eq!(v["slope"], Value::String("-3/2".into()));
}

#[test]
fn singular_family_on_p3_has_zero_dimensional_locus() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p3_fan(dir.path());
    let div = o1_divisor(dir.path(), 4);
    let family_path = dir.path().join("family3.json");
    let out = run(&[
        "build-er",
        "--fan",
        &fan,
        "--divisor",
        &div,
        "--rank",
        "2",
        "--out",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "singular-locus",
        "--fan",
        &fan,
        "--family",
        family_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["locally_free"], Value::Bool(false));
    assert_eq!(v["sing_dim"], serde_json::json!(0));
    assert_eq!(v["minimal_incompatible_cones"].as_array().unwrap().len(), 4);

    let out = run(&[
        "check-free",
        "--fan",
        &fan,
        "--family",
        family_path.to_str().unwrap(),
        "--emit-certificates",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["locally_free"], Value::Bool(false));
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 4);
    assert!(certs.iter().all(|c| c["compatible"] == Value::Bool(false)));
    assert!(certs.iter().all(|c| c["verified"] == Value::Bool(true)));
}

#[test]
fn verify_commands_exit_zero_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p2_fan(dir.path());
    let div = o1_divisor(dir.path(), 3);
    let out = run(&["verify-theorem", "--fan", &fan, "--divisor", &div]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], Value::Bool(true));

    let out = run(&["verify-prop32", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["sing_dim"], serde_json::json!(0));
    assert_eq!(v["expected"], serde_json::json!(0));

    let out = run(&["verify-prop32", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["sing_dim"], serde_json::json!(1));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p2_fan(dir.path());
    // Non-ample divisor: mathematical precondition failure.
    let zero = write(dir.path(), "zero.json", r#"{"coeffs":[0,0,0]}"#);
    let out = run(&["degrees", "--fan", &fan, "--divisor", &zero]);
    assert_eq!(out.status.code(), Some(3));

    // Malformed JSON: parse failure.
    let broken = write(dir.path(), "broken.json", r#"{"coeffs":[0,0"#);
    let out = run(&["degrees", "--fan", &fan, "--divisor", &broken]);
    assert_eq!(out.status.code(), Some(2));

    // Missing file: parse failure.
    let out = run(&["validate-fan", "--fan", "/nonexistent/fan.json"]);
    assert_eq!(out.status.code(), Some(2));

    // Rank out of range: precondition failure.
    let div = o1_divisor(dir.path(), 3);
    let out = run(&[
        "build-er", "--fan", &fan, "--divisor", &div, "--rank", "7",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // verify-prop32 below dimension 3: precondition failure.
    let out = run(&["verify-prop32", "--n", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let fan = p3_fan(dir.path());
    let div = o1_divisor(dir.path(), 4);
    let one = run(&[
        "verify-theorem", "--fan", &fan, "--divisor", &div, "--threads", "1",
    ]);
    let many = run(&[
        "verify-theorem", "--fan", &fan, "--divisor", &div, "--threads", "4",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(many.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);

    // The environment variable sets the default thread count.
    let via_env = Command::new(bin())
        .args(["verify-theorem", "--fan", &fan, "--divisor", &div])
        .env("KLYACHKO_THREADS", "2")
        .output()
        .expect("binary should run");
    assert_eq!(via_env.status.code(), Some(0));
    assert_eq!(via_env.stdout, one.stdout);
}
