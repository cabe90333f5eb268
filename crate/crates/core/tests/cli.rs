use std::path::Path;
use std::process::{Command, Output};

fn ampeq(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ampeq"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("AMPEQ_JOBS")
        .output()
        .unwrap()
}

#[test]
fn gen_fbm_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen-fbm", "--hurst", "0.5", "--steps", "1024", "--dt", "0.001", "--seed", "7"];
    let a = ampeq(&args, &dir.path().join("a"));
    let b = ampeq(&args, &dir.path().join("b"));
    assert!(a.status.success() && b.status.success());
    for f in ["fbm.bin", "fbm.csv", "summary.txt", "manifest.txt"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    assert!(String::from_utf8_lossy(&a.stdout).contains("dt^(2H)"));
}

#[test]
fn invalid_hurst_names_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let o = ampeq(&["gen-fbm", "--hurst", "1.0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0, 1)"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    std::fs::write(&cfg, "hurst=0.5\nwibble=3\n").unwrap();
    let o = ampeq(&["gen-fbm", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wibble"));
}

#[test]
fn key_of_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    std::fs::write(&cfg, "lemma=a1\n").unwrap();
    let o = ampeq(&["gen-fbm", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    std::fs::write(&cfg, "# base\nhurst=0.3\nsteps=64\n").unwrap();
    let out = dir.path().join("o");
    let o = ampeq(&["gen-fbm", "--config", cfg.to_str().unwrap(), "--hurst", "0.6"], &out);
    assert!(o.status.success());
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("hurst=0.6"));
    assert!(manifest.contains("steps=64"));
}

#[test]
fn scaling_study_summary_and_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = ampeq(
        &["scaling-study", "--hurst", "0.5", "--eps-grid", "0.3,0.2", "--replicas", "3"],
        &out,
    );
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("gamma_theory=3\n"));
    let pass = summary.contains("pass=true");
    assert_eq!(o.status.code(), Some(if pass { 0 } else { 1 }));
    let csv = std::fs::read_to_string(out.join("scaling_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn simulate_writes_series_and_reruns_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = ampeq(&["simulate", "--eps", "0.25", "--preset", "sh", "--modes", "16", "--noise-modes", "16"], &a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let b = dir.path().join("b");
    let m = a.join("manifest.txt");
    assert!(ampeq(&["simulate", "--config", m.to_str().unwrap()], &b).status.success());
    for f in ["trajectory.bin", "psi.bin", "error.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("error.csv")).unwrap();
    assert!(csv.starts_with("t,error,first_order_error\n"));
}

#[test]
fn holder_lemma_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = ampeq(&["holder-check", "--lemma", "a2", "--alpha", "0.4"], &dir.path().join("a"));
    assert_eq!(ok.status.code(), Some(0));
    let bad = ampeq(&["holder-check", "--lemma", "a7"], &dir.path().join("b"));
    assert_eq!(bad.status.code(), Some(2));
    let pre = ampeq(&["holder-check", "--lemma", "young", "--alpha", "0.3", "--gamma", "0.3"], &dir.path().join("c"));
    assert_eq!(pre.status.code(), Some(2));
}

#[test]
fn moments_reject_alpha_above_hurst() {
    let dir = tempfile::tempdir().unwrap();
    let o = ampeq(&["convolution-moments", "--hurst", "0.3", "--alpha", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["convolution-moments", "--hurst", "0.75", "--alpha", "0.2", "--replicas", "500"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(ampeq(&args, &a).status.success());
    let mut with_jobs = vec!["--jobs", "2"];
    with_jobs.extend_from_slice(&args);
    assert!(ampeq(&with_jobs, &b).status.success());
    assert_eq!(std::fs::read(a.join("moments.csv")).unwrap(), std::fs::read(b.join("moments.csv")).unwrap());
}
