use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorentz-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn norm_prints_json() {
    let o = run(&["norm", "--spec", "lpq:2,2", "--f", "indicator:0,1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "norm");
    assert_eq!(v["result"]["value"], 1.0);
}

#[test]
fn assoc_of_indicator() {
    let o = run(&["assoc", "--p", "2", "--f", "indicator:0,1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let x = v["result"]["value"].as_f64().unwrap();
    assert!((x - 2f64.sqrt()).abs() < 1e-3, "{x}");
}

#[test]
fn csv_output() {
    let o = run(&["norm", "--spec", "lpq:2,2", "--f", "indicator:0,1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("key,value\n"), "{text}");
    assert!(text.contains("\nvalue,1.0\n"), "{text}");

    let o = run(&["rearrange", "--f", "indicator:1,3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("series,t,value\n"));
}

#[test]
fn bad_literals_are_config_errors() {
    assert_eq!(code(&run(&["norm", "--spec", "lpq:2", "--f", "indicator:0,1"])), 2);
    assert_eq!(code(&run(&["norm", "--spec", "lpq:2,2", "--f", "cube:1"])), 2);
    assert_eq!(code(&run(&["norm", "--spec", "lpq:2,2"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn computation_errors_exit_one() {
    let o = run(&[
        "norm",
        "--spec",
        "classical:2",
        "--psi",
        "power:-0.75",
        "--f",
        "indicator:0,1",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("not integrable"));
    assert_eq!(
        code(&run(&["fit-measure", "--h", "power:1", "--theta", "power:0.5"])),
        1
    );
}

#[test]
fn out_file_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let out_s = out.to_str().unwrap();
    let o = run(&["norm", "--spec", "lpq:2,2", "--f", "indicator:0,1", "--out", out_s]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["value"], 1.0);

    let missing = dir.path().join("never.json");
    let m = missing.to_str().unwrap();
    for (name, text) in [
        ("unknown.json", r#"{"schema_version": 1, "colour": "blue"}"#),
        ("version.json", r#"{"schema_version": 2}"#),
        ("broken.json", "{"),
    ] {
        let cfg = write(dir.path(), name, text);
        let o = run(&[
            "norm",
            "--config",
            &cfg,
            "--spec",
            "lpq:2,2",
            "--f",
            "indicator:0,1",
            "--out",
            m,
        ]);
        assert_eq!(code(&o), 2, "{name}");
        assert!(!missing.exists(), "{name}");
    }
}

#[test]
fn hardy_job_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hardy.json",
        r#"{
            "schema_version": 1,
            "seed": 3,
            "hardy": {
                "q": 1,
                "u": {"kind": "power", "alpha": 0},
                "v": {"kind": "power", "alpha": 1},
                "w": {"kind": "tabulated", "grid": {"breakpoints": [0, 1]}, "values": [1]},
                "nu": {"atoms": [{"t": 0, "m": 1}]}
            }
        }"#,
    );
    let o = run(&["hardy-constants", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["verify-hardy", "--config", &cfg, "--trials", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = v["result"]["ratio"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 1e-12, "{r}");

    let o = run(&["verify-hardy", "--trials", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "verify-duality",
        "--p",
        "2",
        "--trials",
        "4",
        "--steps",
        "20",
        "--seed",
        "5",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_lorentz-lab"))
        .args(args)
        .env("LORENTZ_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_lorentz-lab"))
        .args(args)
        .env("LORENTZ_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&c), 2);
}
