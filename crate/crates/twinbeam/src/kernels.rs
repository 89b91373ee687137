//! Discretized two-photon kernels: spectral F(w_s, w_i), radial R(dk_s, dk_i)
//! and the Fourier coefficients of the azimuthal correlation kernel.

use crate::dispersion::{phase_mismatch_z, CrystalConfig, Geometry};
use crate::pump::{pump_spectral_amplitude, PumpConfig};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Edge samples must fall below this fraction of the peak.
pub const EDGE_FRACTION: f64 = 1e-4;
/// Span doublings allowed before giving up.
pub const MAX_DOUBLINGS: usize = 12;

/// Pump amplitudes below this are treated as zero; far from the carrier the
/// pump frequency can leave the range where the dispersion model holds.
const NEGLIGIBLE: f64 = 1e-30;

/// Gaussian with the half-amplitude width of the sinc main lobe,
/// `exp(-0.193 x^2)`; used only to size the grids.
const SINC_ENVELOPE: f64 = 0.193;

/// Uniform grid `center + (i - n/2) * step`, i = 0..n. The centre is sample n/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub center: f64,
    pub step: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn with_span(center: f64, span: f64, n: usize) -> Self {
        Grid1D { center, step: span / n as f64, n }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.center + (i as f64 - (self.n / 2) as f64) * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    pub fn span(&self) -> f64 {
        self.step * self.n as f64
    }
}

#[derive(Debug, Clone)]
pub struct Kernel2D {
    pub grid: Grid1D,
    /// Rows index the signal variable, columns the idler variable.
    pub values: DMatrix<Complex64>,
}

impl Kernel2D {
    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude over the four grid edges.
    pub fn edge_max(&self) -> f64 {
        edge_max(self.grid.n, |i, j| self.values[(i, j)].norm())
    }
}

fn edge_max(n: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
    let mut m = 0f64;
    for k in 0..n {
        m = m.max(f(0, k)).max(f(n - 1, k)).max(f(k, 0)).max(f(k, n - 1));
    }
    m
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Doubles `span` until `edge(span) < EDGE_FRACTION`.
fn adapt_span(mut span: f64, what: &str, edge: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    for _ in 0..=MAX_DOUBLINGS {
        if edge(span)? < EDGE_FRACTION {
            return Ok(span);
        }
        span *= 2.0;
    }
    Err(Error::config(format!("{what} kernel still significant at the grid edge after {MAX_DOUBLINGS} doublings")))
}

/// Spectral kernel `pump(w_s + w_i) sinc(dk_z L / 2)` on an n x n grid
/// centred at the degenerate frequency.
///
/// The span is sized so that the pump amplitude times the Gaussian envelope of
/// the sinc main lobe is below 1e-4 at the edges; the sinc side lobes decay
/// only as 1/x and cannot meet a pointwise bound on any finite grid.
pub fn build_spectral_kernel(
    pump: &PumpConfig,
    crystal: &CrystalConfig,
    geom: &Geometry,
    n: usize,
    initial_span: f64,
) -> Result<Kernel2D> {
    let half_l = 0.5 * crystal.length;
    let envelope = |ws: f64, wi: f64| -> Result<f64> {
        let a = pump_spectral_amplitude(ws + wi, pump).norm();
        if a < NEGLIGIBLE {
            return Ok(a);
        }
        let x = phase_mismatch_z(ws, wi, (0.0, 0.0), geom, crystal)? * half_l;
        Ok(a * (-SINC_ENVELOPE * x * x).exp())
    };
    let span = adapt_span(initial_span, "spectral", |span| {
        let g = Grid1D::with_span(geom.omega_s0, span, n);
        let mut m = 0f64;
        for k in 0..n {
            for (i, j) in [(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
                m = m.max(envelope(g.point(i), g.point(j))?);
            }
        }
        Ok(m)
    })?;
    let grid = Grid1D::with_span(geom.omega_s0, span, n);
    let w = grid.points();
    let mut values = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let a = pump_spectral_amplitude(w[i] + w[j], pump);
            if a.norm() < NEGLIGIBLE {
                continue;
            }
            let x = phase_mismatch_z(w[i], w[j], (0.0, 0.0), geom, crystal)? * half_l;
            let v = a * sinc(x);
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    Ok(Kernel2D { grid, values })
}

/// Radial kernel `exp(-w_p^2 (dk_s + dk_i)^2 / 4) sinc(dk_z L / 2)` at the
/// central frequencies, with the same envelope-based span rule.
pub fn build_radial_kernel(
    pump: &PumpConfig,
    crystal: &CrystalConfig,
    geom: &Geometry,
    n: usize,
    initial_span: f64,
) -> Result<Kernel2D> {
    let half_l = 0.5 * crystal.length;
    let w2 = pump.waist * pump.waist;
    let w0 = geom.omega_s0;
    let gauss = |a: f64, b: f64| (-w2 * (a + b) * (a + b) / 4.0).exp();
    let span = adapt_span(initial_span, "radial", |span| {
        let g = Grid1D::with_span(0.0, span, n);
        let mut m = 0f64;
        for k in 0..n {
            for (i, j) in [(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
                let (a, b) = (g.point(i), g.point(j));
                let x = phase_mismatch_z(w0, w0, (a, b), geom, crystal)? * half_l;
                m = m.max(gauss(a, b) * (-SINC_ENVELOPE * x * x).exp());
            }
        }
        Ok(m)
    })?;
    let grid = Grid1D::with_span(0.0, span, n);
    let d = grid.points();
    let mut values = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = phase_mismatch_z(w0, w0, (d[i], d[j]), geom, crystal)? * half_l;
            let v = Complex64::new(gauss(d[i], d[j]) * sinc(x), 0.0);
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    Ok(Kernel2D { grid, values })
}

/// Fourier coefficients c_m, m = -M..=M (index m + M), of
/// `G(dphi) = exp(-k_r^2 w_p^2 dphi^2 / 4)`.
#[derive(Debug, Clone)]
pub struct AzimuthalCoefficients {
    pub max_order: usize,
    pub c: Vec<f64>,
}

impl AzimuthalCoefficients {
    pub fn get(&self, m: i64) -> f64 {
        let i = m + self.max_order as i64;
        if i < 0 || i as usize >= self.c.len() {
            0.0
        } else {
            self.c[i as usize]
        }
    }

    /// (sum c)^2 / sum c^2.
    pub fn effective_modes(&self) -> f64 {
        let s: f64 = self.c.iter().sum();
        let s2: f64 = self.c.iter().map(|c| c * c).sum();
        s * s / s2
    }
}

/// Expands the azimuthal kernel by FFT, doubling M from 64 until
/// `c_M < 1e-4 c_0` or M would exceed `max_order`.
pub fn build_azimuthal_coefficients(pump: &PumpConfig, geom: &Geometry, max_order: usize) -> Result<AzimuthalCoefficients> {
    let a = (geom.k_r * pump.waist).powi(2) / 4.0;
    let mut m = 64usize;
    let mut planner = FftPlanner::<f64>::new();
    loop {
        let nf = 4 * m;
        let mut buf: Vec<Complex64> = (0..nf)
            .map(|j| {
                let j = if j <= nf / 2 { j as f64 } else { j as f64 - nf as f64 };
                let phi = 2.0 * std::f64::consts::PI * j / nf as f64;
                Complex64::new((-a * phi * phi).exp(), 0.0)
            })
            .collect();
        planner.plan_fft_forward(nf).process(&mut buf);
        let c_at = |k: i64| {
            let idx = k.rem_euclid(nf as i64) as usize;
            (buf[idx].re / nf as f64).max(0.0)
        };
        if c_at(m as i64) < EDGE_FRACTION * c_at(0) {
            // G is even; symmetrize to remove rounding asymmetry.
            let c = (-(m as i64)..=m as i64).map(|k| 0.5 * (c_at(k) + c_at(-k))).collect();
            return Ok(AzimuthalCoefficients { max_order: m, c });
        }
        if 2 * m > max_order {
            return Err(Error::config_key(
                "grid.max_azimuthal_order",
                format!("azimuthal coefficients not below 1e-4 of c_0 at M = {m}"),
            ));
        }
        m *= 2;
    }
}
