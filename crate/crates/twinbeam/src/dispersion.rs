//! BBO refractive indices and the longitudinal phase mismatch of the
//! type-I (e -> o + o) non-collinear geometry.

use crate::{Error, Result, C};
use std::f64::consts::PI;

/// Lowest and highest wavelength (m) where the Sellmeier fits are trusted.
pub const BAND: (f64, f64) = (0.3e-6, 1.1e-6);

/// `n^2 = a + b / (lambda^2 - c) - d lambda^2`, lambda in micrometres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    pub fn from_array(v: [f64; 4]) -> Self {
        Sellmeier { a: v[0], b: v[1], c: v[2], d: v[3] }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn n2(&self, wavelength: f64) -> f64 {
        let l2 = (wavelength * 1e6).powi(2);
        self.a + self.b / (l2 - self.c) - self.d * l2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellmeierSet {
    pub ordinary: Sellmeier,
    pub extraordinary: Sellmeier,
}

impl SellmeierSet {
    /// Kato (1986) coefficients for beta-barium borate.
    pub fn bbo_kato() -> Self {
        SellmeierSet {
            ordinary: Sellmeier { a: 2.7405, b: 0.0184, c: 0.0179, d: 0.0155 },
            extraordinary: Sellmeier { a: 2.3730, b: 0.0128, c: 0.0156, d: 0.0044 },
        }
    }
}

impl Default for SellmeierSet {
    fn default() -> Self {
        Self::bbo_kato()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Polarization {
    Ordinary,
    /// Extraordinary wave propagating at `theta` (rad) to the optic axis.
    Extraordinary(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    /// Crystal length L (m); fixes the mode profiles.
    pub length: f64,
    /// Optional effective interaction length for the dynamics (m).
    pub ext_length: Option<f64>,
    /// Cut angle between optic axis and the pump direction (rad).
    pub cut_angle: f64,
    pub sellmeier: SellmeierSet,
}

impl CrystalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::config_key("crystal.length_m", "must be positive"));
        }
        if let Some(le) = self.ext_length {
            if !(le >= self.length) {
                return Err(Error::config_key("crystal.ext_length_m", "must be at least crystal.length_m"));
            }
        }
        for lam in [BAND.0, 0.5 * (BAND.0 + BAND.1), BAND.1] {
            for pol in [Polarization::Ordinary, Polarization::Extraordinary(PI / 2.0)] {
                let n = refractive_index(&self.sellmeier, pol, lam)?;
                if !(n > 1.0) {
                    return Err(Error::config_key("crystal.sellmeier", "index must exceed 1 over 0.3-1.1 um"));
                }
            }
        }
        Ok(())
    }

    /// Length used to propagate the triplets.
    pub fn dynamics_length(&self) -> f64 {
        self.ext_length.unwrap_or(self.length)
    }
}

/// Degenerate non-collinear geometry: pump along z, signal and idler on a
/// cone of external half-angle `theta_ext`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub omega_p0: f64,
    pub omega_s0: f64,
    pub theta_ext: f64,
    pub theta_int: f64,
    /// Ring radius in transverse wave-vector space (rad/m).
    pub k_r: f64,
}

impl Geometry {
    pub fn new(pump_wavelength: f64, theta_ext: f64, sellmeier: &SellmeierSet) -> Result<Self> {
        if !(pump_wavelength > 0.0) {
            return Err(Error::config_key("pump.wavelength_m", "must be positive"));
        }
        if !(0.0..PI / 2.0).contains(&theta_ext) {
            return Err(Error::config_key("geometry.emission_angle_deg", "must lie in [0, 90)"));
        }
        let omega_p0 = 2.0 * PI * C / pump_wavelength;
        let omega_s0 = 0.5 * omega_p0;
        let n_s = refractive_index(sellmeier, Polarization::Ordinary, 2.0 * pump_wavelength)?;
        let theta_int = (theta_ext.sin() / n_s).asin();
        let k_r = n_s * omega_s0 / C * theta_int.sin();
        Ok(Geometry { omega_p0, omega_s0, theta_ext, theta_int, k_r })
    }

    /// Vacuum wave number of the degenerate signal (rad/m).
    pub fn k0_signal(&self) -> f64 {
        self.omega_s0 / C
    }
}

pub fn wavelength_of(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

pub fn refractive_index(set: &SellmeierSet, pol: Polarization, wavelength: f64) -> Result<f64> {
    if !(wavelength >= BAND.0 && wavelength <= BAND.1) {
        return Err(Error::domain(format!("wavelength {wavelength:e} m outside 0.3-1.1 um")));
    }
    let no2 = set.ordinary.n2(wavelength);
    let n2 = match pol {
        Polarization::Ordinary => no2,
        // On the optic axis; the general formula is off by an ulp here.
        Polarization::Extraordinary(theta) if theta.sin() == 0.0 => no2,
        Polarization::Extraordinary(theta) => {
            let ne2 = set.extraordinary.n2(wavelength);
            let (s, c) = theta.sin_cos();
            1.0 / (c * c / no2 + s * s / ne2)
        }
    };
    if !(n2 > 0.0) {
        return Err(Error::domain(format!("negative n^2 at {wavelength:e} m")));
    }
    Ok(n2.sqrt())
}

fn kz(n: f64, omega: f64, k_perp: f64) -> Result<f64> {
    let k = n * omega / C;
    let r = k * k - k_perp * k_perp;
    if r < 0.0 {
        return Err(Error::domain("evanescent wave: transverse wave vector exceeds k"));
    }
    Ok(r.sqrt())
}

/// Longitudinal mismatch `k_pz - k_sz - k_iz` (rad/m) for signal and idler at
/// radial offsets `dk = (dk_s, dk_i)` from the ring.
pub fn phase_mismatch_z(
    omega_s: f64,
    omega_i: f64,
    dk: (f64, f64),
    geom: &Geometry,
    crystal: &CrystalConfig,
) -> Result<f64> {
    if !(omega_s > 0.0 && omega_i > 0.0) {
        return Err(Error::domain("frequencies must be positive"));
    }
    let set = &crystal.sellmeier;
    let wp = omega_s + omega_i;
    let n_p = refractive_index(set, Polarization::Extraordinary(crystal.cut_angle), wavelength_of(wp))?;
    let n_s = refractive_index(set, Polarization::Ordinary, wavelength_of(omega_s))?;
    let n_i = refractive_index(set, Polarization::Ordinary, wavelength_of(omega_i))?;
    let kp = n_p * wp / C;
    Ok(kp - kz(n_s, omega_s, geom.k_r + dk.0)? - kz(n_i, omega_i, geom.k_r + dk.1)?)
}

/// Cut angle zeroing the mismatch at the degenerate centre, by bisection on
/// [20, 50] degrees down to `tol` rad.
pub fn find_phasematching_angle_tol(geom: &Geometry, crystal: &CrystalConfig, tol: f64) -> Result<f64> {
    let f = |theta: f64| -> Result<f64> {
        let c = CrystalConfig { cut_angle: theta, ..crystal.clone() };
        phase_mismatch_z(geom.omega_s0, geom.omega_s0, (0.0, 0.0), geom, &c)
    };
    let (mut lo, mut hi) = (20f64.to_radians(), 50f64.to_radians());
    let (mut flo, fhi) = (f(lo)?, f(hi)?);
    if flo * fhi > 0.0 {
        return Err(Error::config("no phase-matching angle between 20 and 50 degrees"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn find_phasematching_angle(geom: &Geometry, crystal: &CrystalConfig) -> Result<f64> {
    find_phasematching_angle_tol(geom, crystal, 1e-6)
}
