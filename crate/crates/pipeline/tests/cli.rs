use std::path::Path;
use std::process::Command;

fn buoyspec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_buoyspec"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    buoyspec(args).status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(
        code(&["fit", "--objective", "bayes", "--input", "x.csv"]),
        1
    );
    assert_eq!(code(&["fit"]), 1);
}

#[test]
fn missing_and_malformed_inputs_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&[
            "fit",
            "--input",
            "/nonexistent/record.csv",
            "--out-dir",
            out
        ]),
        2
    );
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed_row7.csv");
    let run = buoyspec(&["partition", "--input", fixture.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("row 7"));
}

#[test]
fn unknown_config_keys_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sede": 3}"#).unwrap();
    assert_eq!(code(&["simulate", "--config", cfg.to_str().unwrap()]), 1);
}

#[test]
fn simulate_then_fit_and_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&[
            "simulate",
            "--sea-states",
            "1",
            "--seed",
            "4",
            "--out-dir",
            out
        ]),
        0
    );
    let record = dir.path().join("record.csv");
    assert!(record.is_file());
    let rec = record.to_str().unwrap();
    assert_eq!(
        code(&["fit", "--input", rec, "--low-cut", "0.5", "--out-dir", out]),
        0
    );
    let fits = std::fs::read_to_string(dir.path().join("fits.csv")).unwrap();
    assert_eq!(fits.lines().count(), 2);
    assert!(fits.lines().nth(1).unwrap().contains(",true,"));
    assert_eq!(code(&["diagnose", "--input", rec, "--out-dir", out]), 0);
    assert!(dir.path().join("error_function.csv").is_file());
    assert_eq!(code(&["partition", "--input", rec, "--out-dir", out]), 0);
    let listing = std::fs::read_to_string(dir.path().join("sea_states.csv")).unwrap();
    assert_eq!(listing.lines().count(), 2);
}
