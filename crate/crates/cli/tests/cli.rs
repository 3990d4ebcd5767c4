use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-lab")).args(args).env_remove("DIRAC_LAB_THREADS").output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["-o", dir.to_str().unwrap()]);
    lab(&all)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn zero_initial_data_stays_zero() {
    let tmp = TempDir::new().unwrap();
    for scheme in ["lffd", "sifd1", "sifd2", "cnfd", "ewi-fp", "tsfp"] {
        let out = tmp.path().join(scheme);
        let o = run_in(
            &out,
            &["solve", "--preset", "custom", "--scheme", scheme, "--h", "1/4", "--tau", "0.01", "--t-final", "0.1",
              "--set", r#"problem.initial={"kind":"zero"}"#],
        );
        assert!(o.status.success(), "{scheme}: {}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(out.join("results.csv")).unwrap();
        let m = column(&csv, "mass");
        assert_eq!(m.len(), 11);
        assert!(m.iter().all(|&x| x == 0.0), "{scheme}");
    }
}

#[test]
fn cnfd_mass_is_flat() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["solve", "--scheme", "cnfd", "--eps", "0.5", "--h", "1/8", "--tau", "0.01", "--t-final", "1"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let m = column(&csv, "mass");
    let e = column(&csv, "energy");
    for (a, b) in m.iter().zip(&e) {
        assert!((a - m[0]).abs() < 1e-11 * m[0]);
        assert!((b - e[0]).abs() < 1e-11 * e[0].abs().max(1.0));
    }
}

#[test]
fn lffd_above_bound_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["solve", "--scheme", "lffd", "--eps", "0.5", "--h", "1/8", "--tau", "1", "--t-final", "20"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up at step"));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["summary"]["blow_up_step"].as_u64().unwrap() > 0);
}

#[test]
fn auto_tau_sits_below_the_bound() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["solve", "--scheme", "lffd", "--eps", "0.5", "--h", "1/8", "--tau", "auto", "--t-final", "1"]);
    assert!(o.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    let tau = manifest["summary"]["tau"].as_f64().unwrap();
    assert!(tau > 0.0 && tau < 0.9 * 0.5 * 0.125 * 1.0001, "{tau}");
}

#[test]
fn manifest_replays_identically() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let o = run_in(
        &a,
        &["converge", "--scheme", "tsfp,sifd1", "--eps", "1,0.5", "--h", "1/4", "--tau", "0.02,0.01", "--t-final", "0.2",
          "--set", r#"reference={"kind":"tsfp-fine","h_e":0.125,"tau_e":0.001}"#, "--no-timing"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = a.join("manifest.json");
    let o = run_in(&b, &["converge", "-c", manifest.to_str().unwrap(), "--no-timing"]);
    assert!(o.status.success());
    let ra = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(ra, fs::read_to_string(b.join("results.csv")).unwrap());
    assert_eq!(ra.lines().count(), 9);
}

#[test]
fn stability_reports_each_factor() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), &["stability", "--scheme", "lffd,cnfd", "--eps", "1", "--h", "1/8"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[2].starts_with("lffd") && rows[2].ends_with("unstable"));
    assert!(rows[3..].iter().all(|r| r.ends_with(",stable")));
}

#[test]
fn usage_errors_exit_64() {
    let tmp = TempDir::new().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["solve", "--tau", "5"],
        vec!["solve", "--scheme", "rk4"],
        vec!["solve", "--set", "problem.colour=3"],
        vec!["converge", "--threads", "0"],
        vec!["solve", "--h", "1/0"],
    ] {
        let o = run_in(tmp.path(), &args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn honeycomb_writes_density_snapshots() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(
        tmp.path(),
        &["honeycomb", "--eps", "1", "--h", "1/2", "--tau", "0.05", "--t-final", "0.5",
          "--set", "honeycomb.snapshot_times=[0,0.25,0.5]"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
    let m = column(&csv, "mass");
    assert_eq!(m.len(), 3);
    assert!(m.iter().all(|x| (x - m[0]).abs() < 1e-12 * m[0]));
    let snap = tmp.path().join("snapshots");
    for step in [0, 5, 10] {
        for c in [1, 2] {
            let bin = fs::read(snap.join(format!("eps0_step{step:06}_rho{c}.bin"))).unwrap();
            assert_eq!(bin.len(), 40 * 40 * 8);
        }
    }
}
