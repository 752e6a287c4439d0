use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use soam::io::write_off;
use soam::meshgen::{icosphere, torus_grid, Mesh};

fn soam() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_soam"));
    c.env_remove("SOAM_SEED");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("soam-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run(args: &[&str]) -> Output {
    soam().args(args).output().unwrap()
}

fn write_mesh(dir: &Path, name: &str, m: &Mesh) -> String {
    let p = dir.join(name);
    std::fs::write(&p, write_off(m)).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn circle_reconstruction_writes_all_outputs() {
    let dir = scratch("circle");
    let prefix = dir.join("c");
    let o = run(&[
        "reconstruct",
        "--shape",
        "circle",
        "--dim",
        "1",
        "--seed",
        "7",
        "--max-signals",
        "500000",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.join("c.report.txt")).unwrap();
    assert!(report.contains("cycles=1\n"));
    assert!(report.contains("stop=stable\n"));
    assert!(report.contains("config.seed=7\n"));
    assert!(report.contains("config.r_max=25\n"));
    assert_eq!(stdout(&o), report);
    assert!(std::fs::read_to_string(dir.join("c.off")).unwrap().starts_with("OFF"));
    let csv = std::fs::read_to_string(dir.join("c.telemetry.csv")).unwrap();
    assert!(csv.starts_with("signal,active,"));
}

#[test]
fn missing_input_is_an_error() {
    let o = run(&["reconstruct", "--input", "does-not-exist.off"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does-not-exist.off"));
}

#[test]
fn unknown_keys_and_flags_are_errors() {
    assert_eq!(run(&["reconstruct", "--set", "bogus=1"]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct", "--dim", "3"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_2() {
    let dir = scratch("budget");
    let prefix = dir.join("b");
    let o = run(&["reconstruct", "--shape", "sphere", "--max-signals", "1000", "--out", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("stop=max_signals"));
}

#[test]
fn identical_seeds_identical_bytes() {
    let dir = scratch("det");
    let mut outs = Vec::new();
    for k in 0..2 {
        let prefix = dir.join(format!("r{k}"));
        let o = run(&[
            "reconstruct",
            "--shape",
            "circle",
            "--dim",
            "1",
            "--seed",
            "3",
            "--max-signals",
            "60000",
            "--out",
            prefix.to_str().unwrap(),
        ]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(2));
        outs.push((
            std::fs::read(dir.join(format!("r{k}.off"))).unwrap(),
            std::fs::read(dir.join(format!("r{k}.telemetry.csv"))).unwrap(),
        ));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn snapshot_and_resume_match_one_run() {
    let dir = scratch("resume");
    let p = |s: &str| dir.join(s).to_str().unwrap().to_string();
    let base = ["reconstruct", "--shape", "circle", "--dim", "1", "--seed", "5"];
    let full = soam()
        .args(base)
        .args(["--max-signals", "80000", "--out", &p("full"), "--snapshot", &p("full.snap")])
        .output()
        .unwrap();
    let half = soam()
        .args(base)
        .args(["--max-signals", "30000", "--out", &p("half"), "--snapshot", &p("half.snap")])
        .output()
        .unwrap();
    assert!(half.status.success() || half.status.code() == Some(2));
    let rest = soam()
        .args(base)
        .args([
            "--max-signals",
            "80000",
            "--out",
            &p("rest"),
            "--resume",
            &p("half.snap"),
            "--snapshot",
            &p("rest.snap"),
        ])
        .output()
        .unwrap();
    assert_eq!(full.status.code(), rest.status.code());
    assert_eq!(std::fs::read(p("full.off")).unwrap(), std::fs::read(p("rest.off")).unwrap());
    assert_eq!(std::fs::read(p("full.snap")).unwrap(), std::fs::read(p("rest.snap")).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let a = soam().args(["sample", "--shape", "torus", "--count", "5"]).env("SOAM_SEED", "42").output().unwrap();
    let b = run(&["sample", "--shape", "torus", "--count", "5", "--seed", "42"]);
    let c = run(&["sample", "--shape", "torus", "--count", "5", "--seed", "43"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert_eq!(stdout(&a).lines().count(), 5);
    assert!(stdout(&a).lines().all(|l| l.split_whitespace().count() == 3));
}

#[test]
fn verify_homeomorphism_verdicts() {
    let dir = scratch("verify");
    let ico = write_mesh(&dir, "ico.off", &icosphere(0));
    let fine = write_mesh(&dir, "fine.off", &icosphere(3));
    let torus = write_mesh(&dir, "torus.off", &torus_grid(2.0, 1.0, 16, 8));
    let o = run(&["verify", "--input", &ico, "--against", &fine]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("euler=2\n") && stdout(&o).contains("homeomorphic=true"));
    let o = run(&["verify", "--input", &fine, "--against", &torus]);
    assert!(stdout(&o).contains("homeomorphic=false"));
    let o = run(&["verify", "--input", &torus]);
    assert!(stdout(&o).contains("genus=1\n"));
}

#[test]
fn verify_flags_non_manifold() {
    let dir = scratch("nonmanifold");
    let m = Mesh {
        vertices: vec![
            soam::Point::xyz(0.0, 0.0, 0.0),
            soam::Point::xyz(1.0, 0.0, 0.0),
            soam::Point::xyz(0.0, 1.0, 0.0),
            soam::Point::xyz(0.0, -1.0, 0.0),
            soam::Point::xyz(0.0, 0.0, 1.0),
        ],
        triangles: vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]],
    };
    let path = write_mesh(&dir, "fin.off", &m);
    let o = run(&["verify", "--input", &path]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("verdict=non-manifold"));
}

#[test]
fn oracle_square_is_flagged_degenerate() {
    let dir = scratch("oracle");
    let path = dir.join("square.txt");
    std::fs::write(&path, "0 0\n1 0\n1 1\n0 1\n").unwrap();
    let o = run(&["oracle", "--points", path.to_str().unwrap(), "--witnesses", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("delaunay_edges=0-1 0-3 1-2 2-3\n"), "{s}");
    assert!(s.contains("degenerate_edges=0-2 1-3\n"));
    assert!(s.contains("subset=true"));
}

#[test]
fn oracle_cocircular_trend() {
    let o = run(&["oracle", "--cocircular", "--witnesses", "50000"]);
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("t=")).count(), 11);
    assert!(s.contains("non_increasing=true") && s.contains("vanishes=true"));
}

#[test]
fn oracle_restricted_circle_is_a_cycle() {
    let o = run(&["oracle", "--restricted", "circle", "--landmarks", "20", "--witnesses", "200000"]);
    let s = stdout(&o);
    assert!(s.contains("cycles=1\n") && s.contains("subset_of_delaunay=true"), "{s}");
}

#[test]
fn compare_both_on_circle() {
    let dir = scratch("compare");
    let prefix = dir.join("cmp");
    let o = run(&[
        "compare",
        "--shape",
        "circle",
        "--dim",
        "1",
        "--seed",
        "2",
        "--max-signals",
        "300000",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    let s = stdout(&o);
    assert!(s.lines().next().unwrap().contains("soam") && s.contains("gwr"));
    let gwr = std::fs::read_to_string(dir.join("cmp.gwr.report.txt")).unwrap();
    assert!(gwr.contains("covering_ok=true"));
    let soam = std::fs::read_to_string(dir.join("cmp.soam.report.txt")).unwrap();
    assert!(soam.contains("cycles=1"));
}
