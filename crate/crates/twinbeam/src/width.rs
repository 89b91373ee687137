//! Sampled profiles and full widths at half maximum.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    /// Unit of the axis, e.g. "rad/s".
    pub unit: &'static str,
}

impl Profile1D {
    pub fn new(axis: Vec<f64>, values: Vec<f64>, unit: &'static str) -> Self {
        debug_assert_eq!(axis.len(), values.len());
        Profile1D { axis, values, unit }
    }

    /// Trapezoid-free integral on a uniform axis: sum times step.
    pub fn integral(&self) -> f64 {
        if self.axis.len() < 2 {
            return self.values.iter().sum();
        }
        let h = self.axis[1] - self.axis[0];
        self.values.iter().sum::<f64>() * h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile2D {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major, `values[i * y.len() + j]` at `(x[i], y[j])`.
    pub values: Vec<f64>,
    pub unit: &'static str,
}

impl Profile2D {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.y.len() + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthReport {
    pub fwhm: f64,
    /// Samples bracketing the left and right half-height crossings.
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub multimodal: bool,
}

/// FWHM between the outermost half-height crossings, by linear
/// interpolation. The profile is flagged multimodal when the level is crossed
/// more than twice, or when the curvature changes sign more than twice above
/// half height (a narrow peak sitting on a broader one).
pub fn fwhm(p: &Profile1D) -> Result<WidthReport> {
    let y = &p.values;
    let x = &p.axis;
    let n = y.len();
    if n < 3 {
        return Err(Error::domain("profile needs at least three samples"));
    }
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(ymax > 0.0) || !ymax.is_finite() {
        return Err(Error::domain("profile has no positive maximum"));
    }
    let half = 0.5 * ymax;
    let cross = |i: usize| {
        let (x0, x1, y0, y1) = (x[i], x[i + 1], y[i], y[i + 1]);
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };
    let first = y.iter().position(|&v| v >= half).unwrap();
    let last = n - 1 - y.iter().rev().position(|&v| v >= half).unwrap();
    let xl = if first == 0 { x[0] } else { cross(first - 1) };
    let xr = if last == n - 1 { x[n - 1] } else { cross(last) };

    let crossings = y.windows(2).filter(|w| (w[0] >= half) != (w[1] >= half)).count();
    let tol = 1e-9 * ymax;
    let mut sign = 0i8;
    let mut flips = 0usize;
    for i in first.max(1)..last.min(n - 2) + 1 {
        let d2 = y[i - 1] - 2.0 * y[i] + y[i + 1];
        let s = if d2 > tol {
            1
        } else if d2 < -tol {
            -1
        } else {
            0
        };
        if s != 0 {
            if sign != 0 && s != sign {
                flips += 1;
            }
            sign = s;
        }
    }
    Ok(WidthReport {
        fwhm: xr - xl,
        left: (first.saturating_sub(1), first),
        right: (last, (last + 1).min(n - 1)),
        multimodal: crossings > 2 || flips > 2,
    })
}

/// Fedorov ratio of a marginal to a conditional width.
pub fn fedorov_ratio(marginal: &WidthReport, conditional: &WidthReport) -> Result<f64> {
    if !(conditional.fwhm > 0.0) {
        return Err(Error::domain("conditional width must be positive"));
    }
    Ok(marginal.fwhm / conditional.fwhm)
}
