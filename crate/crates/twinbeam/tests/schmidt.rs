mod common;

use common::rel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use twinbeam::kernels::Grid1D;
use twinbeam::schmidt::*;

fn double_gaussian(grid: &Grid1D, sp: f64, sm: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(grid.n, grid.n, |i, j| {
        let (x, y) = (grid.point(i), grid.point(j));
        let e = -(x + y).powi(2) / (4.0 * sp * sp) - (x - y).powi(2) / (4.0 * sm * sm);
        Complex64::new(e.exp(), 0.0)
    })
}

fn gram_defect(m: &DMatrix<Complex64>, step: f64) -> f64 {
    let g = m.adjoint() * m * Complex64::new(step, 0.0);
    let mut worst = 0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - want).norm());
        }
    }
    worst
}

fn grid() -> Grid1D {
    Grid1D::with_span(0.0, 48.0, 480)
}

#[test]
fn separable_kernel_has_one_mode() {
    let g = grid();
    let k = DMatrix::from_fn(g.n, g.n, |i, j| {
        let (x, y) = (g.point(i), g.point(j));
        let gx = Complex64::new(1.0, 0.2 * x) * (-x * x / 3.0).exp();
        gx * (1.0 + 0.1 * y) * (-y * y / 5.0).exp()
    });
    let w = vec![g.step; g.n];
    let s = svd_schmidt(&k, &w, &w).unwrap();
    assert!((s.coeffs[0] - 1.0).abs() < 1e-10);
    assert!(s.coeffs[1..].iter().all(|c| *c < 1e-10));
}

#[test]
fn double_gaussian_matches_mehler() {
    let g = grid();
    let (sp, sm) = (2.0, 1.0);
    let mu = (sp - sm) / (sp + sm);
    let count = 12;
    let w = vec![g.step; g.n];
    let s = svd_schmidt(&double_gaussian(&g, sp, sm), &w, &w).unwrap();
    let a = analytic_gaussian_basis(mu, count, g, (sp * sm).sqrt()).unwrap();
    for q in 0..count {
        assert!((s.coeffs[q] - a.coeffs[q]).abs() < 1e-6, "q = {q}: {} vs {}", s.coeffs[q], a.coeffs[q]);
    }
    // Modes agree in L2 on the grid.
    for q in 0..6 {
        let d: f64 = (0..g.n).map(|i| (s.left[(i, q)] - a.signal[(i, q)]).norm_sqr()).sum::<f64>() * g.step;
        assert!(d.sqrt() < 1e-4, "mode {q}: {}", d.sqrt());
    }
    let k = schmidt_number(&s.coeffs);
    assert!((k - (1.0 + mu * mu) / (1.0 - mu * mu)).abs() < 1e-4, "{k}");
}

#[test]
fn svd_modes_orthonormal_and_normalized() {
    let g = grid();
    let w = vec![g.step; g.n];
    let s = svd_schmidt(&double_gaussian(&g, 3.0, 0.7), &w, &w).unwrap();
    let total: f64 = s.coeffs.iter().map(|c| c * c).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(s.coeffs.windows(2).all(|p| p[0] >= p[1]));
    let r = 20;
    assert!(gram_defect(&s.left.columns(0, r).into_owned(), g.step) < 1e-8);
    assert!(gram_defect(&s.right.columns(0, r).into_owned(), g.step) < 1e-8);
}

#[test]
fn svd_is_deterministic() {
    let g = Grid1D::with_span(0.0, 20.0, 120);
    let k = double_gaussian(&g, 2.5, 0.8);
    let w = vec![g.step; g.n];
    let a = svd_schmidt(&k, &w, &w).unwrap();
    let b = svd_schmidt(&k, &w, &w).unwrap();
    assert_eq!(a.coeffs, b.coeffs);
    assert_eq!(a.left, b.left);
}

#[test]
fn analytic_basis_examples() {
    let g = grid();
    let a = analytic_gaussian_basis(0.0, 5, g, 1.0).unwrap();
    assert_eq!(a.coeffs, vec![1.0]);
    let b = analytic_gaussian_basis(0.5, 60, g, 1.3).unwrap();
    assert!((b.schmidt_number() - 5.0 / 3.0).abs() < 1e-12);
    assert!(gram_defect(&b.signal.columns(0, 20).into_owned(), g.step) < 1e-8);
    assert!(analytic_gaussian_basis(1.0, 3, g, 1.0).is_err());
}

#[test]
fn truncation_keeps_requested_mass() {
    let c: Vec<f64> = (0..50).map(|q| 0.8f64.powi(q)).collect();
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c: Vec<f64> = c.iter().map(|x| x / norm).collect();
    let r = truncation_count(&c, 1.0 - 1e-4);
    let kept: f64 = c[..r].iter().map(|x| x * x).sum();
    let short: f64 = c[..r - 1].iter().map(|x| x * x).sum();
    assert!(kept >= 1.0 - 1e-4 && short < 1.0 - 1e-4);
}

#[test]
fn single_modes_give_one_triplet() {
    let g = Grid1D::with_span(0.0, 1.0, 8);
    let basis = SchmidtBasis { spectral: ModeFamily::single(g), radial: ModeFamily::single(g), azimuthal: AzimuthalFamily::single() };
    let t = assemble_triplets(&basis, 1000).unwrap();
    assert_eq!(t.triplet_count(), 1.0);
    assert_eq!(t.lambda_max(), 1.0);
    assert_eq!(t.transverse, Classes { lambda: vec![1.0], count: vec![1.0] });
}

#[test]
fn pump_power_partition() {
    let g = Grid1D::with_span(0.0, 30.0, 200);
    let sp = analytic_gaussian_basis(0.6, 40, g, 1.0).unwrap();
    let ra = analytic_gaussian_basis(0.3, 40, g, 1.0).unwrap();
    let mut az = AzimuthalFamily::single();
    az.orders = vec![0, -1, 1];
    az.coeffs = vec![0.8, 0.4, 0.4];
    let basis = SchmidtBasis { spectral: sp, radial: ra, azimuthal: az };
    let t = assemble_triplets(&basis, 1000).unwrap();
    let xi = 3.7e6;
    let mut total = 0.0;
    for &q in &t.spectral {
        for (l, n) in t.transverse.lambda.iter().zip(&t.transverse.count) {
            total += n * (pump_amplitude(l * q, xi)).powi(2);
        }
    }
    assert!(rel(total, xi * xi * t.retained_mass) < 1e-12);
    let exact: f64 = 0.96 * basis.spectral.mass() * basis.radial.mass();
    assert!(rel(t.retained_mass, exact) < 1e-12);
}

proptest! {
    #[test]
    fn binning_preserves_count_and_mass(
        a in prop::collection::vec(1e-6f64..1.0, 1..40),
        b in prop::collection::vec(1e-6f64..1.0, 1..40),
        bins in 1usize..2000,
    ) {
        let c = bin_products(&a, &b, bins);
        let mass: f64 = a.iter().flat_map(|x| b.iter().map(move |y| (x * y).powi(2))).sum();
        prop_assert_eq!(c.multiplicity(), (a.len() * b.len()) as f64);
        prop_assert!(rel(c.mass(), mass) < 1e-12);
        prop_assert!(c.lambda.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn mehler_schmidt_number(mu in 0.0f64..0.9) {
        let g = grid();
        let a = analytic_gaussian_basis(mu, 400, g, 1.0).unwrap();
        let want = (1.0 + mu * mu) / (1.0 - mu * mu);
        prop_assert!((a.schmidt_number() - want).abs() < 1e-9);
    }
}
