//! Checks on the full-size default source. The scenario and one spectral
//! sweep are built once and shared.

mod common;

use common::rel;
use std::sync::OnceLock;
use twinbeam::config::SourceConfig;
use twinbeam::kernels::build_spectral_kernel;
use twinbeam::scenario::Scenario;
use twinbeam::sweep::*;
use twinbeam::width::{fwhm, Profile1D};

const SPECTRAL: SweepOptions = SweepOptions { temporal: false, transverse: false };

fn scenario() -> &'static Scenario {
    static S: OnceLock<Scenario> = OnceLock::new();
    S.get_or_init(|| Scenario::new(SourceConfig::default()).unwrap())
}

fn sweep() -> &'static [SweepRecord] {
    static R: OnceLock<Vec<SweepRecord>> = OnceLock::new();
    R.get_or_init(|| {
        let p = log_grid(1e-7, 10.0, 61).unwrap();
        run_sweep(scenario(), &p, SPECTRAL).unwrap()
    })
}

fn threshold_index() -> usize {
    let r = sweep();
    let p: Vec<f64> = r.iter().map(|x| x.power).collect();
    let c: Vec<f64> = r.iter().map(|x| x.c_omega.value).collect();
    detect_thresholds(&p, &c, ExtremumKind::Maxima).unwrap().extrema[0].index
}

#[test]
fn triplet_table_scale() {
    let t = &scenario().table;
    assert!(t.triplet_count() >= 1e3, "{}", t.triplet_count());
    assert!(t.lambda_max() < 0.3, "{}", t.lambda_max());
}

#[test]
fn calibration_anchor_is_reproduced() {
    let s = scenario();
    let r = evaluate(s, 0.2, s.z_end(), SPECTRAL).unwrap();
    assert!(rel(r.conversion, 0.08) < 1e-3, "{}", r.conversion);
    assert!((0.04..=0.16).contains(&r.conversion));
    let low = evaluate(s, 0.002, s.z_end(), SPECTRAL).unwrap();
    assert!(low.conversion < 0.008, "{}", low.conversion);
}

#[test]
fn weak_cross_slice_is_the_kernel_slice() {
    let s = scenario();
    let p = (30.0 / (s.table.lambda_min * s.xi(1.0))).powi(2).max(1.0);
    let k = 0.01 / (s.table.lambda_max() * s.xi(p) * s.z_end());
    let st = s.state_with(p, k, s.z_end());
    assert!(st.spectral.v2.iter().all(|&v| v < 1e-3));
    let g = &s.config.grid;
    let kern = build_spectral_kernel(&s.config.pump, &s.crystal, &s.geometry, g.n_omega, g.omega_span).unwrap();
    let n = kern.grid.n;
    let axis: Vec<f64> = (0..n).map(|i| kern.grid.point(i)).collect();
    let column: Vec<f64> = (0..n).map(|i| kern.values[(i, n / 2)].norm_sqr()).collect();
    let want = fwhm(&Profile1D::new(axis, column, "rad/s")).unwrap().fwhm;
    let got = fwhm(&st.spectral_cross_slice()).unwrap().fwhm;
    assert!(rel(got, want) < 0.05, "{got} {want}");
}

#[test]
fn spectrum_narrows_below_threshold() {
    let r = sweep();
    let i = threshold_index();
    assert!(r[i / 2].spectrum.value > r[i - 5].spectrum.value);
    assert!(r[i - 5].spectrum.value > r[i].spectrum.value);
}

#[test]
fn auto_and_cross_slices_coincide_near_threshold() {
    let r = &sweep()[threshold_index()];
    assert!(rel(r.a_omega.value, r.c_omega.value) < 0.1, "{:?} {:?}", r.a_omega, r.c_omega);
}

#[test]
fn fedorov_minimum_sits_at_the_cross_width_maximum() {
    let r = sweep();
    let p: Vec<f64> = r.iter().map(|x| x.power).collect();
    let f: Vec<f64> = r.iter().map(|x| x.fedorov_omega).collect();
    let m = detect_thresholds(&p, &f, ExtremumKind::Minima).unwrap();
    assert!(m.extrema[0].index.abs_diff(threshold_index()) <= 1);
}

#[test]
fn population_is_not_monotone_above_threshold() {
    let s = scenario();
    let p_th = sweep()[threshold_index()].power;
    let mut h = s.state(5.0 * p_th).mode_population_histogram(64).scatter;
    h.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(h.windows(2).any(|w| w[1].1 < w[0].1));
}

#[test]
fn transverse_ordering_and_ring_narrowing() {
    let s = scenario();
    let p_th = sweep()[threshold_index()].power;
    let full = SweepOptions { temporal: false, transverse: true };
    let r: Vec<SweepRecord> = [1e-4 * p_th, p_th, 2.5 * p_th]
        .iter()
        .map(|&p| evaluate(s, p, s.z_end(), full).unwrap())
        .collect();
    assert!(r[0].c_phi.value / r[0].c_theta > 1.0);
    assert!(r[1].ring.value < r[0].ring.value);
    assert!(r[2].ring.value > r[1].ring.value);
}
