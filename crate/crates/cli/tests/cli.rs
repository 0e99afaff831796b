use std::path::Path;
use std::process::{Command, Output};

fn hrvae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrvae"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(out: &Path, subjects: &str, beats: &str, seed: &str) -> Output {
    hrvae(&["synth", "--out", path(out), "--subjects", subjects, "--beats", beats, "--stressed-frac", "0.8", "--seed", seed])
}

#[test]
fn zero_subjects_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = synth(dir.path(), "0", "300", "1");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("subjects"));
}

#[test]
fn unknown_set_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = hrvae(&["run", "--input", path(dir.path()), "--out", path(dir.path()), "--set", "colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let absent = dir.path().join("absent");
    let out = hrvae(&["run", "--input", path(&absent), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert!(dir.path().join("seed-42/manifest.json").is_file());
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(synth(&a, "4", "300", "9").status.success());
    assert!(synth(&b, "4", "300", "9").status.success());
    for f in ["labels.csv", "subj000.rri", "subj003.rri"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn features_writes_schema_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    assert!(synth(&cohort, "3", "300", "2").status.success());
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = hrvae(&["features", "--input", path(&cohort), "--output", path(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 20);
    assert_eq!(lines.count(), 30);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn run_then_encode_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    let out = dir.path().join("out");
    assert!(synth(&cohort, "20", "600", "3").status.success());
    let run = hrvae(&[
        "run", "--input", path(&cohort), "--out", path(&out), "--model", "cae", "--epochs", "100",
        "--scaling", "global", "--seed", "1", "--set", "knn_k=7",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("cae validation"), "{stdout}");

    let run_dir = out.join("seed-1");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["epochs"], 100);
    assert_eq!(manifest["config"]["knn_k"], 7);
    assert_eq!(manifest["config_sources"]["epochs"], "cli");
    assert_eq!(manifest["config_sources"]["knn_k"], "cli");
    assert_eq!(manifest["config_sources"]["lr"], "default");

    let encoded = dir.path().join("z.csv");
    let enc = hrvae(&[
        "encode", "--checkpoint", path(&run_dir.join("cae/fold-0.ckpt.json")), "--input", path(&cohort),
        "--output", path(&encoded), "--scaling", "global",
    ]);
    assert!(enc.status.success(), "{}", String::from_utf8_lossy(&enc.stderr));
    let rows = std::fs::read_to_string(&encoded).unwrap().lines().count() - 1;
    assert_eq!(rows, 400);

    let rep = hrvae(&["report", "--run", path(&run_dir)]);
    assert!(rep.status.success(), "{}", String::from_utf8_lossy(&rep.stderr));
    assert!(String::from_utf8_lossy(&rep.stdout).contains("assignment"));
}

#[test]
fn config_file_is_read_and_cli_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 5\nepochs = 3\n").unwrap();
    let absent = dir.path().join("absent");
    let out = hrvae(&[
        "run", "--config", path(&cfg), "--epochs", "4", "--input", path(&absent), "--out", path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("seed-5/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["epochs"], 4);
    assert_eq!(manifest["config_sources"]["seed"], "file");
    assert_eq!(manifest["config_sources"]["epochs"], "cli");
}
