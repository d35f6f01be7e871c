use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gleason-lab"));
    c.env_remove("GLEASON_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn strip_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const BORN_ZERO: &str = r#"{"dim": 2, "repr": "born", "rho": [[[1,0],[0,0]],[[0,0],[0,0]]]}"#;

fn axis_table(values: [f64; 3], skip_last: bool) -> String {
    let axes = [
        r#"[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]"#,
        r#"[[[0.5,0],[-0.5,0]],[[-0.5,0],[0.5,0]]]"#,
        r#"[[[0.5,0],[0,-0.5]],[[0,0.5],[0.5,0]]]"#,
        r#"[[[0.5,0],[0,0.5]],[[0,-0.5],[0.5,0]]]"#,
        r#"[[[1,0],[0,0]],[[0,0],[0,0]]]"#,
        r#"[[[0,0],[0,0]],[[0,0],[1,0]]]"#,
    ];
    let n = if skip_last { 5 } else { 6 };
    let entries: Vec<String> = (0..n)
        .map(|i| {
            let v = if i % 2 == 0 { values[i / 2] } else { 1.0 - values[i / 2] };
            format!(r#"{{"projector": {}, "value": {v}}}"#, axes[i])
        })
        .collect();
    format!(r#"{{"dim": 2, "repr": "table", "entries": [{}]}}"#, entries.join(","))
}

#[test]
fn gen_pvm_writes_identical_files_for_one_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["gen-pvm", "--dim", "4", "--ranks", "1,1,2", "--seed", "42", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let report = stdout_json(&o);
        for check in report["checks"].as_array().unwrap() {
            assert!(check["value"].as_f64().unwrap() <= 1e-12);
        }
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let doc: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(doc["dim"], 4);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_partition_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let o = run(&["gen-pvm", "--dim", "3", "--ranks", "1,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PartitionMismatch"));
    assert!(o.stdout.is_empty());
    assert!(!out.exists());
}

#[test]
fn env_seed_is_the_default() {
    let with_env = bin().env("GLEASON_LAB_SEED", "9").args(["gen-pvm", "--dim", "2", "--ranks", "1,1"]).output().unwrap();
    let with_flag = run(&["gen-pvm", "--dim", "2", "--ranks", "1,1", "--seed", "9"]);
    assert_eq!(strip_timestamp(stdout_json(&with_env)), strip_timestamp(stdout_json(&with_flag)));
    assert_eq!(stdout_json(&with_env)["config"]["seed"], 9);
}

#[test]
fn check_marginal_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let born = write(dir.path(), "born.json", BORN_ZERO);
    let det = write(dir.path(), "det.json", &axis_table([1.0, 0.5, 1.0], false));
    let partial = write(dir.path(), "partial.json", &axis_table([1.0, 0.5, 1.0], true));
    let cert = dir.path().join("cert.json");

    let o = run(&["check-marginal", "--frame", &born, "--dim", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["results"]["verdict"], "marginal");

    let o = run(&["check-marginal", "--frame", &det, "--dim", "2", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["results"]["witness"], "Bloch norm 1.4142, excess 0.4142");
    let c: Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    assert_eq!(c["verdict"], "non_marginal");
    assert!((c["witness"]["norm"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    let o = run(&["check-marginal", "--frame", &partial, "--dim", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("UndefinedProjector"));

    let o = run(&["check-marginal", "--frame", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(code(&run(&["check-marginal", "--frame", &garbage])), 2);
}

#[test]
fn eval_and_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let born = write(dir.path(), "born.json", BORN_ZERO);
    let pvm = dir.path().join("pvm.json");
    assert_eq!(code(&run(&["gen-pvm", "--dim", "2", "--ranks", "1,1", "--out", pvm.to_str().unwrap()])), 0);
    let o = run(&["eval", "--frame", &born, "--pvm", pvm.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let sum = stdout_json(&o)["results"]["sum"].as_f64().unwrap();
    assert!((sum - 1.0).abs() < 1e-12);

    let det = write(dir.path(), "det.json", &axis_table([1.0, 0.5, 0.0], false));
    let o = run(&["reconstruct", "--frame", &det, "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("command,name,value,tolerance,comparison,passed\n"));
    assert!(text.contains("reconstruct,linear_residual,"));
}

#[test]
fn demos() {
    let o = run(&["demo-counterexample", "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["results"]["verdict"], "non_marginal");
    assert_eq!(r["checks"][0]["value"], 0.0);

    let o = run(&["demo-counterexample", "--rho-backed"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["results"]["verdict"], "marginal");

    let o = run(&["demo-intertwine", "--n-psi", "10", "--seed", "2"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["checks"][0]["value"], 10.0);
    assert_eq!(r["results"]["single_qubit"]["summary"]["max_degree"], 1);
}

#[test]
fn verify_suite_reports() {
    let o = run(&["verify-suite", "--dims", "2,3", "--trials", "20", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let o = run(&["verify-suite", "--dims", "2", "--trials", "5", "--perturb", "1e-3"]);
    assert_eq!(code(&o), 2);
    let r = stdout_json(&o);
    assert_eq!(r["summary"]["failed"], 1);

    let o = run(&["verify-suite", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn replaying_a_run_reproduces_the_payload() {
    let args = ["verify-suite", "--dims", "2,3", "--trials", "10", "--seed", "5", "--tol", "lin=1e-8"];
    let a = run(&args);
    let b = run(&args);
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    let cut = |s: &str| s[..s.find("\"timestamp\"").unwrap()].to_string();
    assert_eq!(cut(&a), cut(&b));
    let echo = &serde_json::from_str::<Value>(&a).unwrap()["config"];
    assert_eq!(echo["tolerance_overrides"]["lin"], "1e-8");
    assert_eq!(echo["seed"], 5);
}

#[test]
fn unknown_tolerance_is_rejected() {
    let o = run(&["demo-intertwine", "--tol", "bogus=1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnknownTolerance"));
}
