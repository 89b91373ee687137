//! Schmidt decompositions of the kernels and the compressed triplet table.

use crate::kernels::{AzimuthalCoefficients, Grid1D, Kernel2D};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Result of a weighted SVD, coefficients normalized to unit square sum and
/// sorted descending.
#[derive(Debug, Clone)]
pub struct SvdSchmidt {
    pub coeffs: Vec<f64>,
    /// Column q holds mode q sampled on the row grid.
    pub left: DMatrix<Complex64>,
    /// Column q holds mode q sampled on the column grid.
    pub right: DMatrix<Complex64>,
}

/// Weighted SVD of `k(x_i, y_j)`: `k ~ sum_q s_q f_q(x) h_q(y)` with
/// `sum_i wx_i |f_q(x_i)|^2 = 1` and likewise for h.
pub fn svd_schmidt(kernel: &DMatrix<Complex64>, wx: &[f64], wy: &[f64]) -> Result<SvdSchmidt> {
    let (nr, nc) = kernel.shape();
    if wx.len() != nr || wy.len() != nc {
        return Err(Error::domain("weight length does not match kernel shape"));
    }
    if wx.iter().chain(wy).any(|w| !(*w > 0.0)) {
        return Err(Error::domain("quadrature weights must be positive"));
    }
    if kernel.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numeric("kernel contains non-finite samples"));
    }
    let sx: Vec<f64> = wx.iter().map(|w| w.sqrt()).collect();
    let sy: Vec<f64> = wy.iter().map(|w| w.sqrt()).collect();
    let m = DMatrix::from_fn(nr, nc, |i, j| kernel[(i, j)] * (sx[i] * sy[j]));
    let norm2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if !(norm2 > 0.0) {
        return Err(Error::numeric("kernel has zero norm"));
    }
    let svd = m
        .try_svd(true, true, 1e-15, 10_000)
        .ok_or_else(|| Error::numeric(format!("SVD did not converge ({nr}x{nc}, |k|^2 = {norm2:e})")))?;
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let s = svd.singular_values;
    let r = s.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let total: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut coeffs = Vec::with_capacity(r);
    let mut left = DMatrix::<Complex64>::zeros(nr, r);
    let mut right = DMatrix::<Complex64>::zeros(nc, r);
    for (q, &k) in order.iter().enumerate() {
        coeffs.push(s[k] / total);
        let col = u.column(k);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let first = col.iter().find(|z| z.norm() > 1e-8 * peak).copied().unwrap_or(Complex64::new(1.0, 0.0));
        let phase = first.conj() / first.norm();
        for i in 0..nr {
            left[(i, q)] = col[i] * phase / sx[i];
        }
        for j in 0..nc {
            right[(j, q)] = vt[(k, j)] / phase / sy[j];
        }
    }
    Ok(SvdSchmidt { coeffs, left, right })
}

/// One family of Schmidt modes on a uniform grid.
#[derive(Debug, Clone)]
pub struct ModeFamily {
    pub grid: Grid1D,
    pub coeffs: Vec<f64>,
    /// Signal modes, one per column.
    pub signal: DMatrix<Complex64>,
    /// Idler modes, one per column.
    pub idler: DMatrix<Complex64>,
}

impl ModeFamily {
    /// Decomposes a kernel and keeps the leading modes carrying at least
    /// `keep` of the squared-coefficient mass.
    pub fn from_kernel(k: &Kernel2D, keep: f64) -> Result<Self> {
        let w = vec![k.grid.step; k.grid.n];
        let s = svd_schmidt(&k.values, &w, &w)?;
        let r = truncation_count(&s.coeffs, keep);
        Ok(ModeFamily {
            grid: k.grid,
            coeffs: s.coeffs[..r].to_vec(),
            signal: s.left.columns(0, r).into_owned(),
            idler: s.right.columns(0, r).into_owned(),
        })
    }

    /// A single flat-topped mode, for tests and degenerate setups.
    pub fn single(grid: Grid1D) -> Self {
        let v = Complex64::new(1.0 / (grid.step * grid.n as f64).sqrt(), 0.0);
        ModeFamily {
            grid,
            coeffs: vec![1.0],
            signal: DMatrix::from_element(grid.n, 1, v),
            idler: DMatrix::from_element(grid.n, 1, v),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// (sum l^2)^2 / sum l^4 over the retained coefficients.
    pub fn schmidt_number(&self) -> f64 {
        schmidt_number(&self.coeffs)
    }
}

pub fn schmidt_number(c: &[f64]) -> f64 {
    let s2: f64 = c.iter().map(|x| x * x).sum();
    let s4: f64 = c.iter().map(|x| x.powi(4)).sum();
    s2 * s2 / s4
}

/// Smallest count whose leading squared coefficients reach `keep`.
pub fn truncation_count(sorted: &[f64], keep: f64) -> usize {
    let mut acc = 0.0;
    for (i, c) in sorted.iter().enumerate() {
        acc += c * c;
        if acc >= keep {
            return i + 1;
        }
    }
    sorted.len()
}

/// Hermite functions psi_0..psi_{count-1} at `x`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if count > 1 {
        out.push(2f64.sqrt() * x * p0);
    }
    for n in 2..count {
        let nf = n as f64;
        let v = (2.0 / nf).sqrt() * x * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
        out.push(v);
    }
    out
}

/// Analytic basis of the double-Gaussian kernel: `l_q = sqrt(1 - mu^2) mu^q`
/// with Hermite-Gauss modes of width `scale` sampled on `grid`.
pub fn analytic_gaussian_basis(mu: f64, count: usize, grid: Grid1D, scale: f64) -> Result<ModeFamily> {
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::domain(format!("mu = {mu} outside [0, 1)")));
    }
    let count = if mu == 0.0 { 1 } else { count.max(1) };
    let coeffs: Vec<f64> = (0..count).map(|q| (1.0 - mu * mu).sqrt() * mu.powi(q as i32)).collect();
    let mut m = DMatrix::<Complex64>::zeros(grid.n, count);
    for i in 0..grid.n {
        let h = hermite_functions(grid.point(i) / scale, count);
        for q in 0..count {
            m[(i, q)] = Complex64::new(h[q] / scale.sqrt(), 0.0);
        }
    }
    // Same sign convention as the SVD backend.
    for q in 0..count {
        let col = m.column(q);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(first) = col.iter().find(|z| z.norm() > 1e-8 * peak).copied() {
            if first.re < 0.0 {
                m.column_mut(q).iter_mut().for_each(|z| *z = -*z);
            }
        }
    }
    Ok(ModeFamily { grid, coeffs, signal: m.clone(), idler: m })
}

/// Azimuthal Schmidt coefficients `c_m / sqrt(sum c^2)`, truncated
/// symmetrically in |m|.
#[derive(Debug, Clone)]
pub struct AzimuthalFamily {
    pub orders: Vec<i64>,
    pub coeffs: Vec<f64>,
}

impl AzimuthalFamily {
    pub fn from_coefficients(c: &AzimuthalCoefficients, keep: f64) -> Self {
        let norm: f64 = c.c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mm = c.max_order as i64;
        let mut acc = 0.0;
        let mut orders = Vec::new();
        let mut coeffs = Vec::new();
        for m in 0..=mm {
            let l = c.get(m) / norm;
            if m == 0 {
                orders.push(0);
                coeffs.push(l);
                acc += l * l;
            } else {
                orders.extend([m, -m]);
                coeffs.extend([l, l]);
                acc += 2.0 * l * l;
            }
            if acc >= keep {
                break;
            }
        }
        AzimuthalFamily { orders, coeffs }
    }

    pub fn single() -> Self {
        AzimuthalFamily { orders: vec![0], coeffs: vec![1.0] }
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Largest |m| retained.
    pub fn max_order(&self) -> i64 {
        self.orders.iter().map(|m| m.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct SchmidtBasis {
    pub spectral: ModeFamily,
    pub radial: ModeFamily,
    pub azimuthal: AzimuthalFamily,
}

/// Products of two coefficient families grouped into logarithmic classes.
/// Each class keeps its multiplicity and a representative coefficient that
/// preserves the class's squared-coefficient mass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classes {
    pub lambda: Vec<f64>,
    pub count: Vec<f64>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.lambda.iter().zip(&self.count).map(|(l, n)| n * l * l).sum()
    }

    pub fn multiplicity(&self) -> f64 {
        self.count.iter().sum()
    }
}

/// Groups all products `a_i b_j` by `floor(bins_per_decade log10(p))`;
/// `bins_per_decade == 0` keeps every product as its own class.
pub fn bin_products(a: &[f64], b: &[f64], bins_per_decade: usize) -> Classes {
    if bins_per_decade == 0 {
        let mut p: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        p.sort_by(|x, y| y.total_cmp(x));
        let count = vec![1.0; p.len()];
        return Classes { lambda: p, count };
    }
    let scale = bins_per_decade as f64;
    let mut map: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        for &y in b {
            let p = x * y;
            if !(p > 0.0) {
                continue;
            }
            let e = map.entry((p.log10() * scale).floor() as i64).or_insert((0.0, 0.0));
            e.0 += 1.0;
            e.1 += p * p;
        }
    }
    let mut c = Classes::default();
    for (_, (n, s2)) in map.into_iter().rev() {
        c.lambda.push((s2 / n).sqrt());
        c.count.push(n);
    }
    c
}

/// Retained triplets: the outer product of the three families, stored as
/// classes of the two families not resolved by a given observable.
#[derive(Debug, Clone)]
pub struct TripletTable {
    pub spectral: Vec<f64>,
    pub radial: Vec<f64>,
    pub azimuthal: Vec<f64>,
    /// azimuthal x radial products; pair with `spectral`.
    pub transverse: Classes,
    /// azimuthal x spectral products; pair with `radial`.
    pub for_radial: Classes,
    /// radial x spectral products; pair with `azimuthal`.
    pub for_azimuthal: Classes,
    /// Sum of lambda^2 over retained triplets.
    pub retained_mass: f64,
    /// Smallest retained triplet coefficient.
    pub lambda_min: f64,
}

/// Class count above which assembly gives up.
pub const MAX_CLASSES: usize = 20_000_000;

pub fn assemble_triplets(basis: &SchmidtBasis, bins_per_decade: usize) -> Result<TripletTable> {
    let sp = basis.spectral.coeffs.clone();
    let ra = basis.radial.coeffs.clone();
    let az = basis.azimuthal.coeffs.clone();
    let pairs = [az.len() * ra.len(), az.len() * sp.len(), ra.len() * sp.len()];
    if bins_per_decade == 0 && pairs.iter().any(|&p| p > MAX_CLASSES) {
        return Err(Error::config_key("grid.class_bins_per_decade", "exact triplet table exceeds the memory budget"));
    }
    let transverse = bin_products(&az, &ra, bins_per_decade);
    let for_radial = bin_products(&az, &sp, bins_per_decade);
    let for_azimuthal = bin_products(&ra, &sp, bins_per_decade);
    let mass = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let retained_mass = mass(&sp) * mass(&ra) * mass(&az);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(TripletTable {
        lambda_min: min(&sp) * min(&ra) * min(&az),
        spectral: sp,
        radial: ra,
        azimuthal: az,
        transverse,
        for_radial,
        for_azimuthal,
        retained_mass,
    })
}

impl TripletTable {
    /// Number of (m, l, q) triplets represented.
    pub fn triplet_count(&self) -> f64 {
        (self.azimuthal.len() * self.radial.len() * self.spectral.len()) as f64
    }

    pub fn lambda_max(&self) -> f64 {
        self.spectral[0] * self.radial[0] * self.azimuthal[0]
    }

    /// Weak-gain Schmidt number (sum l^2)^2 / sum l^4 of the retained triplets.
    pub fn schmidt_number(&self) -> f64 {
        let f = |v: &[f64], p: i32| v.iter().map(|x| x.powi(p)).sum::<f64>();
        let s2 = f(&self.spectral, 2) * f(&self.radial, 2) * f(&self.azimuthal, 2);
        let s4 = f(&self.spectral, 4) * f(&self.radial, 4) * f(&self.azimuthal, 4);
        s2 * s2 / s4
    }
}

/// Initial classical pump amplitude of a triplet.
pub fn pump_amplitude(lambda: f64, xi: f64) -> f64 {
    lambda * xi
}
