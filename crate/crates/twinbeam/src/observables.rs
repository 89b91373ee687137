//! Twin-beam observables from the exit coefficients of all triplets.
//!
//! A profile resolved in one family (say frequency) sums incoherently over
//! the other two. Those are grouped into classes of equal coefficient
//! product, so each observable works on a (classes x modes) table of
//! V^2 and U V. Central slices of the correlation functions reduce to a
//! quadratic form with the Gram matrix `G_qq' = sum_c n_c w_cq w_cq'`.

use crate::dynamics::{phase_integral, TripletInit};
use crate::schmidt::{Classes, ModeFamily, SchmidtBasis, TripletTable};
use crate::width::{Profile1D, Profile2D};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Exit coefficients on a (class x mode) table.
#[derive(Debug, Clone)]
pub struct ClassState {
    pub count: Vec<f64>,
    /// Triplet coefficient `lambda_c * lambda_j`.
    pub lambda: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    pub v2: DMatrix<f64>,
    pub uv: DMatrix<f64>,
}

impl ClassState {
    pub fn new(classes: &Classes, modes: &[f64], xi: f64, k: f64, z_end: f64) -> Self {
        let (nc, nm) = (classes.len(), modes.len());
        let mut lambda = DMatrix::zeros(nc, nm);
        let mut phi = DMatrix::zeros(nc, nm);
        let mut v2 = DMatrix::zeros(nc, nm);
        let mut uv = DMatrix::zeros(nc, nm);
        for j in 0..nm {
            for c in 0..nc {
                let l = classes.lambda[c] * modes[j];
                let init = TripletInit::seeded(l * xi, k, z_end);
                let p = phase_integral(&init, z_end);
                let (s, ch) = (p.sinh(), p.cosh());
                lambda[(c, j)] = l;
                phi[(c, j)] = p;
                v2[(c, j)] = s * s;
                uv[(c, j)] = s * ch;
            }
        }
        ClassState { count: classes.count.clone(), lambda, phi, v2, uv }
    }

    /// Only the `U V` table, for observables that need nothing else.
    pub fn uv_only(classes: &Classes, modes: &[f64], xi: f64, k: f64, z_end: f64) -> DMatrix<f64> {
        DMatrix::from_fn(classes.len(), modes.len(), |c, j| {
            let init = TripletInit::seeded(classes.lambda[c] * modes[j] * xi, k, z_end);
            let p = phase_integral(&init, z_end);
            p.sinh() * p.cosh()
        })
    }

    /// Photons per mode, `S_j = sum_c n_c V^2_cj`.
    pub fn mode_photons(&self) -> Vec<f64> {
        (0..self.v2.ncols())
            .map(|j| (0..self.v2.nrows()).map(|c| self.count[c] * self.v2[(c, j)]).sum())
            .collect()
    }

    /// `sum_c n_c w_cq w_cq'` for weights `w` (either `v2` or `uv`).
    pub fn gram(&self, w: &DMatrix<f64>) -> DMatrix<f64> {
        let mut s = w.clone();
        for c in 0..s.nrows() {
            let r = self.count[c].sqrt();
            s.row_mut(c).iter_mut().for_each(|x| *x *= r);
        }
        s.transpose() * &s
    }

    /// Largest `|U^2 - V^2 - 1|` relative to `U^2`, and the number of checks.
    pub fn symplectic_defect(&self) -> (f64, usize) {
        let mut worst = 0f64;
        for &p in self.phi.iter() {
            let (u, v) = (p.cosh(), p.sinh());
            let d = ((u * u - v * v) - 1.0).abs() / (u * u);
            worst = worst.max(d);
        }
        (worst, self.phi.len())
    }
}

/// Temporal modes: unitary DFT of the zero-padded spectral modes.
#[derive(Debug, Clone)]
pub struct TemporalModes {
    pub axis: Vec<f64>,
    pub signal: DMatrix<Complex64>,
    pub idler: DMatrix<Complex64>,
}

/// Zero-padding factor of the spectral-to-temporal transform.
pub const TIME_PADDING: usize = 4;

impl TemporalModes {
    pub fn new(family: &ModeFamily) -> Self {
        let n = family.grid.n;
        let nt = TIME_PADDING * n;
        let h = family.grid.step;
        let dt = 2.0 * PI / (nt as f64 * h);
        let fft = FftPlanner::<f64>::new().plan_fft_forward(nt);
        let transform = |m: &DMatrix<Complex64>| {
            let mut out = DMatrix::<Complex64>::zeros(nt, m.ncols());
            let mut buf = vec![Complex64::new(0.0, 0.0); nt];
            for q in 0..m.ncols() {
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for j in 0..n {
                    let off = j as i64 - (n / 2) as i64;
                    buf[off.rem_euclid(nt as i64) as usize] = m[(j, q)] * h.sqrt();
                }
                fft.process(&mut buf);
                let norm = 1.0 / (nt as f64 * dt).sqrt();
                for k in 0..nt {
                    // index nt/2 of the output is t = 0
                    let src = (k + nt / 2) % nt;
                    out[(k, q)] = buf[src] * norm;
                }
            }
            out
        };
        let axis = (0..nt).map(|k| (k as f64 - (nt / 2) as f64) * dt).collect();
        TemporalModes { axis, signal: transform(&family.signal), idler: transform(&family.idler) }
    }

    pub fn center_index(&self) -> usize {
        self.axis.len() / 2
    }
}

/// `sum_q |f_q(x)|^2 S_q`.
fn intensity(modes: &DMatrix<Complex64>, photons: &[f64]) -> Vec<f64> {
    (0..modes.nrows())
        .map(|i| (0..modes.ncols()).map(|q| modes[(i, q)].norm_sqr() * photons[q]).sum())
        .collect()
}

/// `Re sum_qq' a_q conj(a_q') G_qq'` for each row of `a`.
fn quadratic_rows(a: &DMatrix<Complex64>, g: &DMatrix<f64>) -> Vec<f64> {
    let r = g.nrows();
    let gc = g.map(|x| Complex64::new(x, 0.0));
    let ga = a.conjugate() * gc.transpose();
    (0..a.nrows())
        .map(|i| (0..r).map(|q| (a[(i, q)] * ga[(i, q)]).re).sum::<f64>().max(0.0))
        .collect()
}

/// Slice of a correlation function: `a_q(x) = x_q(x) y_q(y0)`, the signal
/// factor conjugated for autocorrelations.
fn slice(x: &DMatrix<Complex64>, y0: &[Complex64], conj_x: bool, g: &DMatrix<f64>) -> Vec<f64> {
    let a = DMatrix::from_fn(x.nrows(), x.ncols(), |i, q| {
        let f = if conj_x { x[(i, q)].conj() } else { x[(i, q)] };
        f * y0[q]
    });
    quadratic_rows(&a, g)
}

fn map2d(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    axis: &[f64],
    conj_x: bool,
    g: &DMatrix<f64>,
    stride: usize,
    unit: &'static str,
) -> Profile2D {
    let idx: Vec<usize> = (0..x.nrows()).step_by(stride.max(1)).collect();
    let mut values = Vec::with_capacity(idx.len() * idx.len());
    for &i in &idx {
        let xi: Vec<Complex64> = (0..x.ncols()).map(|q| if conj_x { x[(i, q)].conj() } else { x[(i, q)] }).collect();
        let a = DMatrix::from_fn(idx.len(), x.ncols(), |j, q| xi[q] * y[(idx[j], q)]);
        values.extend(quadratic_rows(&a, g));
    }
    let ax: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
    Profile2D { x: ax.clone(), y: ax, values, unit }
}

fn row(m: &DMatrix<Complex64>, i: usize) -> Vec<Complex64> {
    (0..m.ncols()).map(|q| m[(i, q)]).collect()
}

#[derive(Debug, Clone)]
pub struct TemporalCorrelations {
    pub pulse: Profile1D,
    /// A(t, 0).
    pub auto_slice: Profile1D,
    /// C(t_s, t_i = 0).
    pub cross_slice: Profile1D,
}

#[derive(Debug, Clone)]
pub struct TransverseCorrelations {
    /// C(dk_s, dk_i = 0) in rad/m.
    pub radial_slice: Profile1D,
    /// Signal intensity across the ring.
    pub ring: Profile1D,
}

#[derive(Debug, Clone)]
pub struct Histogram {
    /// (lambda, V^2, multiplicity) per class and spectral mode.
    pub scatter: Vec<(f64, f64, f64)>,
    /// Lower edge, upper edge and triplet count of each occupied bin.
    pub density: Vec<(f64, f64, f64)>,
}

/// Bins per decade of the mode-density histogram.
pub const DENSITY_BINS_PER_DECADE: usize = 64;

/// All triplets at the crystal exit for one pump power.
#[derive(Debug, Clone)]
pub struct TwinBeamState<'a> {
    pub basis: &'a SchmidtBasis,
    pub table: &'a TripletTable,
    pub power: f64,
    pub xi: f64,
    pub k: f64,
    pub z_end: f64,
    /// Spectral modes against azimuthal x radial classes.
    pub spectral: ClassState,
}

impl<'a> TwinBeamState<'a> {
    pub fn new(basis: &'a SchmidtBasis, table: &'a TripletTable, power: f64, xi: f64, k: f64, z_end: f64) -> Self {
        let spectral = ClassState::new(&table.transverse, &table.spectral, xi, k, z_end);
        TwinBeamState { basis, table, power, xi, k, z_end, spectral }
    }

    pub fn photon_number(&self) -> f64 {
        self.spectral.mode_photons().iter().sum()
    }

    /// `(sum U^2 V^2)^2 / sum U^4 V^4`; falls back to the weak-gain Schmidt
    /// number (flag set) when every V vanishes.
    pub fn entanglement_dimensionality(&self) -> (f64, bool) {
        let s = &self.spectral;
        let (mut a, mut b) = (0.0, 0.0);
        for c in 0..s.uv.nrows() {
            let n = s.count[c];
            for j in 0..s.uv.ncols() {
                let w = s.uv[(c, j)] * s.uv[(c, j)];
                a += n * w;
                b += n * w * w;
            }
        }
        if b == 0.0 {
            return (self.table.schmidt_number(), true);
        }
        (a * a / b, false)
    }

    pub fn signal_spectrum(&self) -> Profile1D {
        let f = &self.basis.spectral;
        Profile1D::new(f.grid.points(), intensity(&f.signal, &self.spectral.mode_photons()), "rad/s")
    }

    /// C(w_s, w_i0).
    pub fn spectral_cross_slice(&self) -> Profile1D {
        let f = &self.basis.spectral;
        let g = self.spectral.gram(&self.spectral.uv);
        let y0 = row(&f.idler, f.grid.center_index());
        Profile1D::new(f.grid.points(), slice(&f.signal, &y0, false, &g), "rad/s")
    }

    /// A(w_s, w_s0).
    pub fn spectral_auto_slice(&self) -> Profile1D {
        let f = &self.basis.spectral;
        let g = self.spectral.gram(&self.spectral.v2);
        let y0 = row(&f.signal, f.grid.center_index());
        Profile1D::new(f.grid.points(), slice(&f.signal, &y0, true, &g), "rad/s")
    }

    /// C(w_s, w_i) on every `stride`-th grid point.
    pub fn spectral_crosscorrelation(&self, stride: usize) -> Profile2D {
        let f = &self.basis.spectral;
        let g = self.spectral.gram(&self.spectral.uv);
        map2d(&f.signal, &f.idler, &f.grid.points(), false, &g, stride, "rad/s")
    }

    /// A(w_s, w_s') on every `stride`-th grid point.
    pub fn spectral_autocorrelation(&self, stride: usize) -> Profile2D {
        let f = &self.basis.spectral;
        let g = self.spectral.gram(&self.spectral.v2);
        map2d(&f.signal, &f.signal, &f.grid.points(), true, &g, stride, "rad/s")
    }

    pub fn temporal_correlations(&self, modes: &TemporalModes) -> TemporalCorrelations {
        let t0 = modes.center_index();
        let g_uv = self.spectral.gram(&self.spectral.uv);
        let g_v2 = self.spectral.gram(&self.spectral.v2);
        let pulse = intensity(&modes.signal, &self.spectral.mode_photons());
        TemporalCorrelations {
            pulse: Profile1D::new(modes.axis.clone(), pulse, "s"),
            auto_slice: Profile1D::new(modes.axis.clone(), slice(&modes.signal, &row(&modes.signal, t0), true, &g_v2), "s"),
            cross_slice: Profile1D::new(modes.axis.clone(), slice(&modes.signal, &row(&modes.idler, t0), false, &g_uv), "s"),
        }
    }

    /// Exit coefficients arranged for radially resolved observables.
    pub fn radial_state(&self) -> ClassState {
        ClassState::new(&self.table.for_radial, &self.table.radial, self.xi, self.k, self.z_end)
    }

    pub fn transverse_correlations(&self) -> TransverseCorrelations {
        self.transverse_correlations_with(&self.radial_state())
    }

    /// As `transverse_correlations`, reusing a state from `radial_state`.
    pub fn transverse_correlations_with(&self, st: &ClassState) -> TransverseCorrelations {
        let f = &self.basis.radial;
        let g = st.gram(&st.uv);
        let y0 = row(&f.idler, f.grid.center_index());
        TransverseCorrelations {
            radial_slice: Profile1D::new(f.grid.points(), slice(&f.signal, &y0, false, &g), "rad/m"),
            ring: Profile1D::new(f.grid.points(), intensity(&f.signal, &st.mode_photons()), "rad/m"),
        }
    }

    /// Azimuthal cross-correlation `C(dphi)`, `dphi = phi_s - phi_i - pi`, on
    /// `2 n_half - 1` points over [-half_width, half_width]. The window
    /// doubles until the edges fall below half height.
    pub fn azimuthal_correlation(&self, half_width: f64, n_half: usize) -> Result<Profile1D> {
        let az = &self.basis.azimuthal;
        // Distinct |m| with their multiplicity in the cosine sum.
        let mut orders: Vec<(i64, f64, f64)> = Vec::new();
        for (&m, &l) in az.orders.iter().zip(&az.coeffs) {
            if m >= 0 {
                let mult = if m == 0 { 1.0 } else { 2.0 };
                let present_neg = m == 0 || az.orders.contains(&-m);
                orders.push((m, l, if present_neg { mult } else { 1.0 }));
            }
        }
        let lam: Vec<f64> = orders.iter().map(|o| o.1).collect();
        let classes = &self.table.for_azimuthal;
        let mut w = ClassState::uv_only(classes, &lam, self.xi, self.k, self.z_end);
        for (j, o) in orders.iter().enumerate() {
            w.column_mut(j).iter_mut().for_each(|x| *x *= o.2 / (2.0 * PI));
        }
        let n_half = n_half.max(3);
        let mut hw = half_width;
        for _ in 0..12 {
            let phis: Vec<f64> = (0..n_half).map(|k| hw * k as f64 / (n_half - 1) as f64).collect();
            let cosm = DMatrix::from_fn(orders.len(), n_half, |j, k| (orders[j].0 as f64 * phis[k]).cos());
            let amp = &w * cosm;
            let half: Vec<f64> = (0..n_half)
                .map(|k| (0..amp.nrows()).map(|c| classes.count[c] * amp[(c, k)] * amp[(c, k)]).sum())
                .collect();
            if half[n_half - 1] < 0.5 * half[0] || az.orders.len() == 1 {
                let mut axis: Vec<f64> = phis.iter().rev().map(|p| -p).collect();
                axis.extend_from_slice(&phis[1..]);
                let mut values: Vec<f64> = half.iter().rev().copied().collect();
                values.extend_from_slice(&half[1..]);
                return Ok(Profile1D::new(axis, values, "rad"));
            }
            hw *= 2.0;
        }
        Err(Error::numeric("azimuthal correlation wider than the search window"))
    }

    pub fn mode_population_histogram(&self, bins_per_decade: usize) -> Histogram {
        let s = &self.spectral;
        let mut scatter = Vec::with_capacity(s.lambda.len());
        let mut bins = std::collections::BTreeMap::<i64, f64>::new();
        let b = bins_per_decade.max(1) as f64;
        for c in 0..s.lambda.nrows() {
            for j in 0..s.lambda.ncols() {
                let l = s.lambda[(c, j)];
                scatter.push((l, s.v2[(c, j)], s.count[c]));
                *bins.entry((l.log10() * b).floor() as i64).or_insert(0.0) += s.count[c];
            }
        }
        let density = bins
            .into_iter()
            .map(|(k, n)| (10f64.powf(k as f64 / b), 10f64.powf((k + 1) as f64 / b), n))
            .collect();
        Histogram { scatter, density }
    }
}
