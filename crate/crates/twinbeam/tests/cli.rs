mod common;

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinbeam"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn small_dir() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("small.toml"), common::SMALL).unwrap();
    d
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_writes_one_row_per_power() {
    let d = small_dir();
    let o = run(d.path(), &["sweep", "--config", "small.toml", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("o/sweep.csv")).unwrap();
    assert!(csv.starts_with("# "));
    assert!(csv.contains("# resolved.coupling_k = 2.000000000000e-01\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 7);
    assert!(r.windows(2).all(|w| w[1][0] > w[0][0]));
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("o/thresholds.json")).unwrap()).unwrap();
    assert!(t["k_dim_minima"]["extrema"].is_array());
}

#[test]
fn sweep_is_byte_identical_across_runs_and_threads() {
    let d = small_dir();
    for (out, threads) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let o = run(d.path(), &["sweep", "--config", "small.toml", "--out", out, "--threads", threads]);
        assert!(o.status.success());
    }
    let read = |p: &str| std::fs::read(d.path().join(p).join("sweep.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_eq!(read("a"), read("c"));
}

#[test]
fn oracle_passes_on_defaults() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["oracle", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("o/oracle_report.json")).unwrap()).unwrap();
    for (k, v) in rep.as_object().unwrap() {
        if let Some(p) = v.get("pass") {
            assert_eq!(p, true, "{k}");
        }
    }
    assert!(d.path().join("o/fock_trajectory.csv").exists());
    assert!(d.path().join("o/rk4_trajectory.csv").exists());
}

#[test]
fn modes_coefficients_carry_almost_all_mass() {
    let d = small_dir();
    let o = run(d.path(), &["modes", "--config", "small.toml", "--out", "o", "--power", "1e-3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["spectral_coefficients.csv", "radial_coefficients.csv", "azimuthal_coefficients.csv"] {
        let r = rows(&std::fs::read_to_string(d.path().join("o").join(f)).unwrap());
        let sum: f64 = r.iter().map(|x| x[2]).sum();
        assert!(sum >= 0.9999 && sum <= 1.0 + 1e-9, "{f} {sum}");
    }
    assert!(d.path().join("o/p00_histogram.csv").exists());
    assert!(d.path().join("o/triplet_classes.csv").exists());
}

#[test]
fn spectrum_writes_profiles_per_power() {
    let d = small_dir();
    let o = run(d.path(), &["spectrum", "--config", "small.toml", "--out", "o", "--power", "1e-3", "--power", "0.1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for tag in ["p00", "p01"] {
        for f in ["spectrum", "c_omega_slice", "c_omega_map", "pulse", "c_t_slice", "c_k_slice", "ring", "c_phi"] {
            assert!(d.path().join(format!("o/{tag}_{f}.csv")).exists(), "{tag}_{f}");
        }
    }
    let h = std::fs::read_to_string(d.path().join("o/p01_spectrum.csv")).unwrap();
    assert!(h.contains("# power_w = 1.000000000000e-01\n"));
}

#[test]
fn calibrate_writes_sidecar() {
    let d = tempfile::tempdir().unwrap();
    let cfg = common::SMALL.replace("k = 0.2", "reference_power_w = 0.2\nreference_fraction = 0.08\nanchor_scenario = \"self\"");
    std::fs::write(d.path().join("c.toml"), cfg).unwrap();
    let o = run(d.path(), &["calibrate", "--config", "c.toml", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("o/coupling.json")).unwrap()).unwrap();
    assert!(v["k"].as_f64().unwrap() > 0.0);
    assert!((v["achieved_fraction"].as_f64().unwrap() / 0.08 - 1.0).abs() < 1e-3);
}

fn single_line_error(o: &Output) -> String {
    assert!(!o.status.success());
    let e = String::from_utf8_lossy(&o.stderr).to_string();
    assert_eq!(e.trim_end().lines().count(), 1, "{e}");
    e
}

#[test]
fn errors_give_nonzero_exit_and_one_line() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("bad.toml"), "[pump]\nspectral_fwhm_m = -1\n").unwrap();
    let o = run(d.path(), &["sweep", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(single_line_error(&o).contains("pump.spectral_fwhm_m"));

    let o = run(d.path(), &["sweep", "--config", "missing.toml"]);
    assert_eq!(o.status.code(), Some(7));
    single_line_error(&o);

    let o = run(d.path(), &["sweep", "--threads", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(single_line_error(&o).contains("--threads"));

    let o = run(d.path(), &["spectrum", "--power=-1"]);
    assert_eq!(o.status.code(), Some(4));
    single_line_error(&o);
}

#[test]
fn unknown_subcommand_is_rejected() {
    let o = bin().arg("plot").output().unwrap();
    assert!(!o.status.success());
}
