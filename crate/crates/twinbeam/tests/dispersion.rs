use proptest::prelude::*;
use twinbeam::dispersion::*;

const DEG: f64 = std::f64::consts::PI / 180.0;

// Kato's ordinary-ray fit, written out independently of the library.
fn n_o_reference(lambda_m: f64) -> f64 {
    let l2 = (lambda_m * 1e6).powi(2);
    (2.7405 + 0.0184 / (l2 - 0.0179) - 0.0155 * l2).sqrt()
}

fn crystal(cut: f64) -> CrystalConfig {
    CrystalConfig { length: 4e-3, ext_length: None, cut_angle: cut, sellmeier: SellmeierSet::bbo_kato() }
}

fn geometry(theta_ext_deg: f64) -> Geometry {
    Geometry::new(349e-9, theta_ext_deg * DEG, &SellmeierSet::bbo_kato()).unwrap()
}

#[test]
fn ordinary_index_matches_reference_fit() {
    let n = refractive_index(&SellmeierSet::bbo_kato(), Polarization::Ordinary, 698e-9).unwrap();
    assert!((n - n_o_reference(698e-9)).abs() < 1e-12);
    assert!((n - 1.6650).abs() < 5e-4, "{n}");
}

#[test]
fn extraordinary_along_axis_is_ordinary() {
    let s = SellmeierSet::bbo_kato();
    for l in [0.35e-6, 0.5e-6, 0.698e-6, 1.0e-6] {
        let no = refractive_index(&s, Polarization::Ordinary, l).unwrap();
        let ne = refractive_index(&s, Polarization::Extraordinary(0.0), l).unwrap();
        assert_eq!(no, ne);
    }
}

#[test]
fn normal_dispersion() {
    let s = SellmeierSet::bbo_kato();
    let a = refractive_index(&s, Polarization::Ordinary, 400e-9).unwrap();
    let b = refractive_index(&s, Polarization::Ordinary, 800e-9).unwrap();
    assert!(a > b);
}

#[test]
fn internal_angle_and_ring_radius() {
    let g = geometry(8.45);
    assert!(g.theta_int > 0.0 && g.theta_int < g.theta_ext);
    let no = refractive_index(&SellmeierSet::bbo_kato(), Polarization::Ordinary, 698e-9).unwrap();
    assert!((no * g.theta_int.sin() - g.theta_ext.sin()).abs() < 1e-12);
    assert!(g.k_r > 0.0);
}

#[test]
fn solved_angle_zeroes_the_mismatch() {
    let g = geometry(8.45);
    let theta = find_phasematching_angle(&g, &crystal(0.0)).unwrap();
    let dk = phase_mismatch_z(g.omega_s0, g.omega_s0, (0.0, 0.0), &g, &crystal(theta)).unwrap();
    assert!(dk.abs() < 10.0, "{dk}");
}

#[test]
fn cut_angle_near_reported_value() {
    let theta = find_phasematching_angle(&geometry(8.45), &crystal(0.0)).unwrap();
    assert!((theta / DEG - 36.3).abs() < 0.5, "{}", theta / DEG);
}

#[test]
fn collinear_angle_is_smaller() {
    let c = crystal(0.0);
    let a0 = find_phasematching_angle(&geometry(0.0), &c).unwrap();
    let a1 = find_phasematching_angle(&geometry(8.45), &c).unwrap();
    assert!(a0 < a1);
    // The root moves monotonically with the emission angle.
    let mut prev = a0;
    for d in 1..=10 {
        let a = find_phasematching_angle(&geometry(d as f64), &c).unwrap();
        assert!(a > prev);
        prev = a;
    }
}

#[test]
fn bisection_tolerance_is_converged() {
    let (g, c) = (geometry(8.45), crystal(0.0));
    let a = find_phasematching_angle_tol(&g, &c, 1e-8).unwrap();
    let b = find_phasematching_angle_tol(&g, &c, 2e-8).unwrap();
    assert!((a - b).abs() < 1e-5);
}

#[test]
fn nominal_cut_residual_is_bounded() {
    // The Kato set puts the root about 0.2 deg above 36.3 deg, which leaves
    // |dk L / 2| near 17 at the nominal cut instead of below 3.
    let g = geometry(8.45);
    let dk = phase_mismatch_z(g.omega_s0, g.omega_s0, (0.0, 0.0), &g, &crystal(36.3 * DEG)).unwrap();
    let r = (dk * 2e-3).abs();
    assert!(r > 3.0 && r < 30.0, "{r}");
}

#[test]
fn out_of_band_and_evanescent_are_errors() {
    let s = SellmeierSet::bbo_kato();
    assert!(refractive_index(&s, Polarization::Ordinary, 0.2e-6).is_err());
    let g = geometry(8.45);
    let c = crystal(36.5 * DEG);
    assert!(phase_mismatch_z(g.omega_s0, g.omega_s0, (1e9, 0.0), &g, &c).is_err());
    assert!(phase_mismatch_z(-1.0, g.omega_s0, (0.0, 0.0), &g, &c).is_err());
}

#[test]
fn length_validation() {
    let mut c = crystal(0.6);
    assert!(c.validate().is_ok());
    c.ext_length = Some(2e-3);
    assert!(c.validate().is_err());
    c.ext_length = Some(8e-3);
    assert_eq!(c.dynamics_length(), 8e-3);
}

proptest! {
    #[test]
    fn sellmeier_above_one_in_band(l in 0.3e-6f64..1.1e-6, theta in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let s = SellmeierSet::bbo_kato();
        let no = refractive_index(&s, Polarization::Ordinary, l).unwrap();
        let ne = refractive_index(&s, Polarization::Extraordinary(theta), l).unwrap();
        let ne90 = refractive_index(&s, Polarization::Extraordinary(std::f64::consts::FRAC_PI_2), l).unwrap();
        prop_assert!(no > 1.0 && ne > 1.0);
        prop_assert!(ne <= no + 1e-15 && ne >= ne90 - 1e-15);
    }

    #[test]
    fn extraordinary_index_monotone(l in 0.3e-6f64..1.1e-6, t in 0.0f64..1.5, dt in 1e-4f64..0.07) {
        let s = SellmeierSet::bbo_kato();
        let a = refractive_index(&s, Polarization::Extraordinary(t), l).unwrap();
        let b = refractive_index(&s, Polarization::Extraordinary(t + dt), l).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn mismatch_exchange_symmetric(dw in -2e13f64..2e13, ds in -2e4f64..2e4, di in -2e4f64..2e4) {
        let g = geometry(8.45);
        let c = crystal(36.5 * DEG);
        let (ws, wi) = (g.omega_s0 + dw, g.omega_s0 - 0.3 * dw);
        let a = phase_mismatch_z(ws, wi, (ds, di), &g, &c).unwrap();
        let b = phase_mismatch_z(wi, ws, (di, ds), &g, &c).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
    }
}
