use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn conelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn stability_threshold_for_seven() {
    let o = conelab(&["stability-threshold", "--set", "n=7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("kappa* = 0.699854212224"), "{}", stdout(&o));
}

#[test]
fn barrier_below_threshold_is_a_usage_error() {
    let o = conelab(&["barrier-verify", "--set", "n=7", "--set", "kappa=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("kappa*") && err.contains("0.699854212224"), "{err}");
}

#[test]
fn kprime_on_the_capped_cone() {
    let o = conelab(&[
        "kprime",
        "--set",
        "kind=capped_cone",
        "--set",
        "kappa=0.6",
        "--set",
        "n=7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("10.6666666667"), "{out}");
    assert!(out.contains("NoStableHypersurface"), "{out}");
}

#[test]
fn unknown_keys_are_named() {
    let o = conelab(&["metric-show", "--set", "kapa=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`kapa`"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "command = metric-show\nsmaples = 3\n").unwrap();
    let o = conelab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`smaples` (line 2)"), "{}", stderr(&o));
}

#[test]
fn missing_command_is_a_usage_error() {
    assert_eq!(conelab(&[]).status.code(), Some(2));
}

#[test]
fn config_sections_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("show.tsv");
    fs::write(
        &cfg,
        "# global scope\nn = 4\nkappa = 0.8\nsamples = 5\n\n[metric-show]\nsamples = 7\n\n[eigen]\nsamples = 9\n",
    )
    .unwrap();
    let o = conelab(&[
        "metric-show",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("n = 4"), "{}", stdout(&o));
    let table = fs::read_to_string(&out).unwrap();
    // one header line, then the section's sample count
    assert_eq!(table.lines().count(), 8, "{table}");
    assert_eq!(table.lines().next(), Some("r phi dphi rho"));

    let o = conelab(&[
        "metric-show",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--set",
        "samples=3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 4);
}

fn run_to(dir: &Path, name: &str, seed: &str) -> (String, String) {
    let out = dir.join(format!("{name}.tsv"));
    let o = conelab(&[
        "barrier-verify",
        "--set",
        "n=4",
        "--set",
        "kappa=0.9",
        "--set",
        "kind=capped_cone",
        "--set",
        "theta_points=21",
        "--set",
        "r_points=20",
        "--set",
        "fields=10",
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cross = dir.join(format!("{name}.crosscheck.tsv"));
    (fs::read_to_string(out).unwrap(), fs::read_to_string(cross).unwrap())
}

#[test]
fn same_seed_gives_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a", "11");
    let b = run_to(dir.path(), "b", "11");
    assert_eq!(a, b);
    let c = run_to(dir.path(), "c", "12");
    assert_eq!(a.0, c.0);
    assert_ne!(a.1, c.1);
    assert_eq!(a.1.lines().next(), Some("theta r conformal polar fd ratio"));
}

#[test]
fn scan_table_has_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.tsv");
    let o = conelab(&[
        "areamin-scan",
        "--set",
        "n=4",
        "--set",
        "kappa_min=0.8",
        "--set",
        "kappa_max=0.9",
        "--set",
        "kappa_step=0.05",
        "--set",
        "grid_size=128",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}\n{}", stdout(&o), stderr(&o));
    let table = fs::read_to_string(&out).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("kappa area_flat area_min gap verdict"));
    assert_eq!(lines.count(), 3);
}
