mod common;

use common::{linspace, profile, rel};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use twinbeam::dispersion::*;
use twinbeam::kernels::*;
use twinbeam::pump::*;
use twinbeam::width::fwhm;

const HBAR: f64 = 1.054_571_817e-34;
const C: f64 = 299_792_458.0;

fn setup(pump: &PumpConfig) -> (CrystalConfig, Geometry) {
    let set = SellmeierSet::bbo_kato();
    let g = Geometry::new(pump.wavelength, 8.45f64.to_radians(), &set).unwrap();
    let mut c = CrystalConfig { length: 4e-3, ext_length: None, cut_angle: 0.0, sellmeier: set };
    c.cut_angle = find_phasematching_angle(&g, &c).unwrap();
    (c, g)
}

fn pump_intensity_fwhm(pump: &PumpConfig) -> f64 {
    let w0 = pump.omega0();
    let half = 5.0 * pump.fwhm_omega();
    let p = profile(linspace(w0 - half, w0 + half, 20001), |w| pump_spectral_amplitude(w, pump).norm_sqr());
    fwhm(&p).unwrap().fwhm
}

/// Width of |K|^2 along the line (i, i) and along (i, n - i).
fn line_widths(k: &Kernel2D) -> (f64, f64) {
    let n = k.grid.n;
    let sum: Vec<f64> = (0..n).map(|i| k.values[(i, i)].norm_sqr()).collect();
    let diff: Vec<f64> = (1..n).map(|i| k.values[(i, n - i)].norm_sqr()).collect();
    let ax = k.grid.points();
    let ps = twinbeam::width::Profile1D::new(ax.clone(), sum, "rad/s");
    let pd = twinbeam::width::Profile1D::new(ax[1..].to_vec(), diff, "rad/s");
    (fwhm(&ps).unwrap().fwhm, fwhm(&pd).unwrap().fwhm)
}

#[test]
fn xi_from_photon_energy() {
    let pump = PumpConfig { power: 0.1, ..PumpConfig::default() };
    let energy = HBAR * 2.0 * PI * C / 349e-9;
    let expect = (0.1 / 400.0 / energy).sqrt();
    assert!(rel(pulse_amplitude_xi(&pump), expect) < 1e-12);
    assert!(rel(pulse_amplitude_xi(&pump), 2.10e7) < 0.01);
    assert!(rel(pulse_amplitude_xi(&pump).powi(2), 4.39e14) < 0.01);
}

#[test]
fn xi_zero_power_and_scaling() {
    let p0 = PumpConfig { power: 0.0, ..PumpConfig::default() };
    assert_eq!(pulse_amplitude_xi(&p0), 0.0);
    let a = pulse_amplitude_xi(&PumpConfig { power: 0.05, ..PumpConfig::default() });
    let b = pulse_amplitude_xi(&PumpConfig { power: 0.2, ..PumpConfig::default() });
    assert!(rel(b, 2.0 * a) < 1e-14);
}

#[test]
fn spectral_amplitude_unit_at_carrier() {
    let pump = PumpConfig { chirp: 0.7, ..PumpConfig::default() };
    assert_eq!(pump_spectral_amplitude(pump.omega0(), &pump), Complex64::new(1.0, 0.0));
}

#[test]
fn realized_fwhm_equals_configured() {
    for chirp in [0.0, 1.0, -2.5] {
        let pump = PumpConfig { chirp, ..PumpConfig::default() };
        assert!(rel(pump_intensity_fwhm(&pump), pump.fwhm_omega()) < 1e-3);
    }
}

#[test]
fn chirp_at_fixed_duration_broadens_by_sqrt2() {
    let base = PumpConfig::default();
    let tau = base.tau();
    let chirped = base.clone().with_duration(tau, 1.0);
    let r = pump_intensity_fwhm(&chirped) / pump_intensity_fwhm(&base);
    assert!(rel(r, 2f64.sqrt()) < 1e-3, "{r}");
}

#[test]
fn transform_limited_pair() {
    // |E(t)|^2 ~ exp(-t^2 / tau^2) has FWHM 2 sqrt(ln 2) tau.
    let p = PumpConfig::default();
    let dt = 2.0 * 2f64.ln().sqrt() * p.tau();
    let tbp = dt * p.fwhm_omega();
    assert!(rel(tbp, 4.0 * 2f64.ln()) < 1e-12);
}

#[test]
fn spectral_kernel_shape() {
    let pump = PumpConfig::default();
    let (c, g) = setup(&pump);
    let k = build_spectral_kernel(&pump, &c, &g, 256, 3e14).unwrap();
    let n = k.grid.n;
    let ic = k.grid.center_index();
    assert!(k.frobenius().is_finite());
    assert_eq!(k.values[(ic, ic)].norm(), k.peak());
    for i in 0..n {
        for j in 0..n {
            assert_eq!(k.values[(i, j)], k.values[(j, i)]);
        }
    }
}

fn rms_width(v: &[f64], x: &[f64]) -> f64 {
    let m0: f64 = v.iter().sum();
    let m1: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / m0;
    (v.iter().zip(x).map(|(a, b)| a * (b - m1).powi(2)).sum::<f64>() / m0).sqrt()
}

#[test]
fn narrower_pump_narrows_sum_direction_only() {
    // At 1 nm phase matching, not the pump, limits the sum direction; the
    // pump sets it once it is well below that acceptance.
    let wide = PumpConfig { spectral_fwhm: 0.1e-9, ..PumpConfig::default() };
    let narrow = PumpConfig { spectral_fwhm: 0.05e-9, ..wide.clone() };
    let (c, g) = setup(&wide);
    let n = 2048;
    let kw = build_spectral_kernel(&wide, &c, &g, n, 3e14).unwrap();
    let kn = build_spectral_kernel(&narrow, &c, &g, n, kw.grid.span()).unwrap();
    assert_eq!(kw.grid, kn.grid);
    let ax = kw.grid.points();
    let sum = |k: &Kernel2D| (0..n).map(|i| k.values[(i, i)].norm_sqr()).collect::<Vec<_>>();
    let r = rms_width(&sum(&kw), &ax) / rms_width(&sum(&kn), &ax);
    assert!(rel(r, 2.0) < 0.05, "{r}");
    let (_, dw) = line_widths(&kw);
    let (_, dn) = line_widths(&kn);
    assert!(rel(dn, dw) < 0.05, "difference widths {dw} {dn}");
}

#[test]
fn chirp_changes_phase_not_modulus() {
    let a = PumpConfig::default();
    let b = PumpConfig { chirp: 1.0, ..a.clone() };
    let (c, g) = setup(&a);
    let ka = build_spectral_kernel(&a, &c, &g, 128, 3e14).unwrap();
    let kb = build_spectral_kernel(&b, &c, &g, 128, ka.grid.span()).unwrap();
    let mut phase = 0f64;
    for (x, y) in ka.values.iter().zip(kb.values.iter()) {
        assert!((x.norm() - y.norm()).abs() <= 1e-12 * ka.peak());
        phase = phase.max((x - y).norm());
    }
    assert!(phase > 1e-3);
}

#[test]
fn radial_kernel_centre_and_antidiagonal() {
    let pump = PumpConfig::default();
    let (c, g) = setup(&pump);
    let k = build_radial_kernel(&pump, &c, &g, 128, 2e5).unwrap();
    let (n, ic) = (k.grid.n, k.grid.center_index());
    let centre = k.values[(ic, ic)];
    assert!((centre.re - 1.0).abs() < 1e-6 && centre.im == 0.0, "{centre}");
    let w0 = g.omega_s0;
    for i in 1..n {
        let d = k.grid.point(i);
        let x = phase_mismatch_z(w0, w0, (d, -d), &g, &c).unwrap() * 2e-3;
        assert!((k.values[(i, n - i)].re - sinc(x)).abs() < 1e-12);
    }
}

#[test]
fn wider_waist_narrows_radial_sum() {
    let a = PumpConfig::default();
    let b = PumpConfig { waist: 2e-3, ..a.clone() };
    let (c, g) = setup(&a);
    // Fine grid: the sum width is about one step of the default grid.
    let ka = build_radial_kernel(&a, &c, &g, 4096, 2e5).unwrap();
    let kb = build_radial_kernel(&b, &c, &g, 4096, ka.grid.span()).unwrap();
    let (sa, _) = line_widths(&ka);
    let (sb, _) = line_widths(&kb);
    assert!(rel(sa / sb, 2.0) < 0.05, "{sa} {sb}");
}

#[test]
fn kernels_are_small_at_the_edges() {
    let pump = PumpConfig::default();
    let (c, g) = setup(&pump);
    let s = build_spectral_kernel(&pump, &c, &g, 512, 3e14).unwrap();
    let r = build_radial_kernel(&pump, &c, &g, 512, 2e5).unwrap();
    // Sinc side lobes fall off as 1/x; the Gaussian part is below 1e-4.
    for k in [&s, &r] {
        let e = k.edge_max() / k.peak();
        assert!(e < 0.05, "{e}");
    }
}

#[test]
fn azimuthal_coefficients() {
    let pump = PumpConfig::default();
    let (_, g) = setup(&pump);
    let c = build_azimuthal_coefficients(&pump, &g, 4096).unwrap();
    let m = c.max_order as i64;
    for k in 0..=m {
        assert!(c.get(k) >= 0.0);
        assert_eq!(c.get(k), c.get(-k));
    }
    let s: f64 = c.c.iter().sum();
    // Orders past the 1e-4 cut carry the remainder.
    assert!((s - 1.0).abs() < 1e-4, "{s}");
    assert!(c.get(m) < 1e-4 * c.get(0));
}

#[test]
fn azimuthal_mode_count_scales_with_waist() {
    // G(dphi) widens as the waist shrinks, so fewer orders contribute.
    let a = PumpConfig::default();
    let b = PumpConfig { waist: 0.5e-3, ..a.clone() };
    let (_, g) = setup(&a);
    let na = build_azimuthal_coefficients(&a, &g, 4096).unwrap().effective_modes();
    let nb = build_azimuthal_coefficients(&b, &g, 4096).unwrap().effective_modes();
    assert!(rel(na / nb, 2.0) < 0.02, "{na} {nb}");
    // Continuum value: 1 / sum c^2 = sqrt(2 pi) k_r w_p.
    let expect = (2.0 * PI).sqrt() * g.k_r * a.waist;
    assert!(rel(na, expect) < 1e-3, "{na} {expect}");
}

#[test]
fn azimuthal_order_limit_is_a_config_error() {
    let pump = PumpConfig::default();
    let (_, g) = setup(&pump);
    let e = build_azimuthal_coefficients(&pump, &g, 64).unwrap_err();
    assert!(e.to_string().contains("grid.max_azimuthal_order"));
}

proptest! {
    #[test]
    fn pump_modulus_is_gaussian(nu in -5.0f64..5.0, chirp in -3.0f64..3.0) {
        let p = PumpConfig { chirp, ..PumpConfig::default() };
        let s = p.sigma_omega();
        let a = pump_spectral_amplitude(p.omega0() + nu * s, &p);
        // nu is recovered from an absolute frequency near 5e15 rad/s.
        prop_assert!((a.norm_sqr() - (-nu * nu / 2.0).exp()).abs() < 1e-10);
    }
}
