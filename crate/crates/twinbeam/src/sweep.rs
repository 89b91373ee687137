//! Power sweeps, threshold detection and coupling calibration.

use crate::dynamics::exit_weights;
use crate::observables::TwinBeamState;
use crate::scenario::Scenario;
use crate::width::{fedorov_ratio, fwhm, Profile1D};
use crate::{Error, Result};
use rayon::prelude::*;

/// Samples per half window of the azimuthal correlation.
pub const AZIMUTHAL_SAMPLES: usize = 129;

/// A width with its multimodality flag; NaN when not evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Width {
    pub value: f64,
    pub multimodal: bool,
}

impl Width {
    pub const NONE: Width = Width { value: f64::NAN, multimodal: false };

    fn of(p: &Profile1D) -> Result<Width> {
        let r = fwhm(p)?;
        Ok(Width { value: r.fwhm, multimodal: r.multimodal })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub power: f64,
    pub photons: f64,
    /// Fraction of pulse energy in signal plus idler.
    pub conversion: f64,
    pub k_dim: f64,
    /// K_dim fell back to the weak-gain Schmidt number.
    pub k_dim_weak: bool,
    pub fedorov_omega: f64,
    pub spectrum: Width,
    pub c_omega: Width,
    pub a_omega: Width,
    pub c_t: Width,
    pub a_t: Width,
    /// Radial cross-correlation width (rad/m).
    pub c_k: Width,
    /// The same width as an external polar angle (rad).
    pub c_theta: f64,
    /// Azimuthal cross-correlation width (rad).
    pub c_phi: Width,
    pub ring: Width,
    /// Largest relative |U^2 - V^2 - 1| over all evaluated triplets.
    pub symplectic_defect: f64,
    pub symplectic_checks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub temporal: bool,
    pub transverse: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { temporal: true, transverse: true }
    }
}

/// `n` logarithmically spaced powers from `p_min` to `p_max` inclusive.
pub fn log_grid(p_min: f64, p_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(p_min > 0.0 && p_max > p_min) || n < 2 {
        return Err(Error::domain("power grid needs 0 < p_min < p_max and at least two points"));
    }
    let (a, b) = (p_min.ln(), p_max.ln());
    let mut v: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    v[0] = p_min;
    v[n - 1] = p_max;
    Ok(v)
}

/// Evaluates every requested observable at one power.
pub fn evaluate(scenario: &Scenario, power: f64, z_end: f64, opts: SweepOptions) -> Result<SweepRecord> {
    let st = scenario.state_with(power, scenario.k, z_end);
    record(scenario, &st, opts)
}

fn record(scenario: &Scenario, st: &TwinBeamState<'_>, opts: SweepOptions) -> Result<SweepRecord> {
    let photons = st.photon_number();
    if photons == 0.0 {
        // Dark state: no profile to take a width of.
        let (symplectic_defect, symplectic_checks) = st.spectral.symplectic_defect();
        return Ok(SweepRecord {
            power: st.power,
            photons,
            conversion: if st.power > 0.0 { 0.0 } else { f64::NAN },
            k_dim: f64::NAN,
            k_dim_weak: false,
            fedorov_omega: f64::NAN,
            spectrum: Width::NONE,
            c_omega: Width::NONE,
            a_omega: Width::NONE,
            c_t: Width::NONE,
            a_t: Width::NONE,
            c_k: Width::NONE,
            c_theta: f64::NAN,
            c_phi: Width::NONE,
            ring: Width::NONE,
            symplectic_defect,
            symplectic_checks,
        });
    }
    let (k_dim, k_dim_weak) = st.entanglement_dimensionality();
    let spectrum = fwhm(&st.signal_spectrum())?;
    let cross = fwhm(&st.spectral_cross_slice())?;
    let (mut defect, mut checks) = st.spectral.symplectic_defect();
    let mut r = SweepRecord {
        power: st.power,
        photons,
        conversion: if st.power > 0.0 { scenario.conversion(photons, st.power) } else { f64::NAN },
        k_dim,
        k_dim_weak,
        fedorov_omega: fedorov_ratio(&spectrum, &cross)?,
        spectrum: Width { value: spectrum.fwhm, multimodal: spectrum.multimodal },
        c_omega: Width { value: cross.fwhm, multimodal: cross.multimodal },
        a_omega: Width::of(&st.spectral_auto_slice())?,
        c_t: Width::NONE,
        a_t: Width::NONE,
        c_k: Width::NONE,
        c_theta: f64::NAN,
        c_phi: Width::NONE,
        ring: Width::NONE,
        symplectic_defect: 0.0,
        symplectic_checks: 0,
    };
    if opts.temporal {
        let t = st.temporal_correlations(&scenario.temporal);
        r.c_t = Width::of(&t.cross_slice)?;
        r.a_t = Width::of(&t.auto_slice)?;
    }
    if opts.transverse {
        let radial = st.radial_state();
        let (d, n) = radial.symplectic_defect();
        defect = defect.max(d);
        checks += n;
        let t = st.transverse_correlations_with(&radial);
        drop(radial);
        r.c_k = Width::of(&t.radial_slice)?;
        r.c_theta = scenario.radial_to_angle(r.c_k.value);
        r.ring = Width::of(&t.ring)?;
        r.c_phi = Width::of(&st.azimuthal_correlation(scenario.azimuthal_window(), AZIMUTHAL_SAMPLES)?)?;
    }
    r.symplectic_defect = defect;
    r.symplectic_checks = checks;
    Ok(r)
}

fn with_power(e: Error, p: f64) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("at P = {p:e} W: {m}")),
        Error::Numeric(m) => Error::Numeric(format!("at P = {p:e} W: {m}")),
        Error::Cutoff(m) => Error::Cutoff(format!("at P = {p:e} W: {m}")),
        Error::Config { key, reason } => Error::Config { key, reason: format!("at P = {p:e} W: {reason}") },
        other => other,
    }
}

/// Runs every power in parallel; records come back in input order.
pub fn run_sweep(scenario: &Scenario, powers: &[f64], opts: SweepOptions) -> Result<Vec<SweepRecord>> {
    run_to(scenario, powers, scenario.z_end(), opts)
}

/// Propagates the triplets over `l_ext` while the modes stay those of the
/// scenario's crystal length.
pub fn run_extended_length(scenario: &Scenario, powers: &[f64], l_ext: f64, opts: SweepOptions) -> Result<Vec<SweepRecord>> {
    if !(l_ext >= scenario.crystal.length) {
        return Err(Error::config_key("crystal.ext_length_m", "must be at least crystal.length_m"));
    }
    run_to(scenario, powers, l_ext, opts)
}

fn run_to(scenario: &Scenario, powers: &[f64], z_end: f64, opts: SweepOptions) -> Result<Vec<SweepRecord>> {
    if powers.windows(2).any(|w| !(w[1] > w[0])) || powers.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::domain("powers must be non-negative and strictly increasing"));
    }
    if !scenario.k.is_finite() {
        return Err(Error::config_key("coupling.k", "coupling constant not resolved"));
    }
    powers
        .par_iter()
        .map(|&p| evaluate(scenario, p, z_end, opts).map_err(|e| with_power(e, p)))
        .collect()
}

/// Mean signal photon number without building the full state.
pub fn photon_number(scenario: &Scenario, power: f64, k: f64, z_end: f64) -> f64 {
    let xi = scenario.xi(power);
    let t = &scenario.table;
    let mut total = 0.0;
    for &lq in &t.spectral {
        let mut s = 0.0;
        for (l, n) in t.transverse.lambda.iter().zip(&t.transverse.count) {
            s += n * exit_weights(l * lq * xi, k, z_end).0;
        }
        total += s;
    }
    total
}

/// Lowest K at which the conversion at `power` reaches `fraction`: a scan
/// over K in [1e-3, 1e3] brackets the first crossing, then bisection in log K.
pub fn calibrate_coupling(scenario: &Scenario, power: f64, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 0.5) {
        return Err(Error::config_key("coupling.reference_fraction", "must lie in (0, 0.5)"));
    }
    if !(power > 0.0) {
        return Err(Error::config_key("coupling.reference_power_w", "must be positive"));
    }
    let z = scenario.crystal.length;
    let conv = |k: f64| scenario.conversion(photon_number(scenario, power, k, z), power);
    let scan = log_grid(1e-3, 1e3, 121)?;
    let mut lo = None;
    let mut hi = None;
    for &k in &scan {
        if conv(k) >= fraction {
            hi = Some(k);
            break;
        }
        lo = Some(k);
    }
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Err(Error::config_key("coupling", format!("conversion {fraction} at {power} W not bracketed by K in [1e-3, 1e3]")));
    };
    while hi / lo - 1.0 > 1e-12 {
        let mid = (lo * hi).sqrt();
        if conv(mid) < fraction {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = (lo * hi).sqrt();
    let got = conv(k);
    if (got / fraction - 1.0).abs() > 1e-3 {
        return Err(Error::numeric(format!("calibration reached {got} instead of {fraction}")));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minima,
    Maxima,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub power: f64,
    pub value: f64,
}

/// Interior extrema in ascending power: P_th, P_th1, P_th2, ...
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub kind: ExtremumKind,
    pub extrema: Vec<Extremum>,
}

impl ThresholdReport {
    pub fn p_th(&self) -> Option<f64> {
        self.extrema.first().map(|e| e.power)
    }

    pub fn p_th1(&self) -> Option<f64> {
        self.extrema.get(1).map(|e| e.power)
    }

    pub fn p_th2(&self) -> Option<f64> {
        self.extrema.get(2).map(|e| e.power)
    }
}

/// Three-point running median; the end points are kept.
pub fn median3(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in 1..v.len().saturating_sub(1) {
        let mut w = [v[i - 1], v[i], v[i + 1]];
        w.sort_by(f64::total_cmp);
        out[i] = w[1];
    }
    out
}

/// Interior local extrema of the median-smoothed series. A flat run counts
/// when both neighbours are strictly on the other side; the raw series
/// picks the point within the run.
pub fn detect_thresholds(powers: &[f64], values: &[f64], kind: ExtremumKind) -> Result<ThresholdReport> {
    if powers.len() != values.len() {
        return Err(Error::domain("powers and values differ in length"));
    }
    if values.len() < 5 {
        return Err(Error::domain("threshold detection needs at least five records"));
    }
    let sign = match kind {
        ExtremumKind::Maxima => 1.0,
        ExtremumKind::Minima => -1.0,
    };
    let raw: Vec<f64> = values.iter().map(|v| sign * v).collect();
    let s = median3(&raw);
    let n = s.len();
    let mut extrema = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        let mut j = i;
        while j + 1 < n - 1 && s[j + 1] == s[i] {
            j += 1;
        }
        if s[i - 1] < s[i] && s[j + 1] < s[j] {
            let best = (i..=j).fold(i, |b, k| if raw[k] > raw[b] { k } else { b });
            extrema.push(Extremum { index: best, power: powers[best], value: values[best] });
        }
        i = j + 1;
    }
    Ok(ThresholdReport { kind, extrema })
}
