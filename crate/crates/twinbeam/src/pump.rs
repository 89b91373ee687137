//! Chirped Gaussian pump pulse.

use crate::{Error, Result, C, HBAR};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct PumpConfig {
    /// Central wavelength (m).
    pub wavelength: f64,
    /// Mean power (W).
    pub power: f64,
    /// Repetition rate (1/s).
    pub rep_rate: f64,
    /// Beam waist (m).
    pub waist: f64,
    /// FWHM of the realized spectral intensity, in wavelength (m).
    pub spectral_fwhm: f64,
    /// Chirp parameter a_p.
    pub chirp: f64,
}

impl Default for PumpConfig {
    fn default() -> Self {
        PumpConfig {
            wavelength: 349e-9,
            power: 0.1,
            rep_rate: 400.0,
            waist: 1e-3,
            spectral_fwhm: 1e-9,
            chirp: 0.0,
        }
    }
}

impl PumpConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("pump.wavelength_m", self.wavelength > 0.0),
            ("pump.power_w", self.power >= 0.0),
            ("pump.rep_rate_hz", self.rep_rate > 0.0),
            ("pump.waist_m", self.waist > 0.0),
            ("pump.spectral_fwhm_m", self.spectral_fwhm > 0.0),
            ("pump.chirp", self.chirp.is_finite()),
        ];
        for (key, ok) in checks {
            if !ok {
                return Err(Error::config_key(key, "out of range"));
            }
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }

    /// Spectral intensity FWHM in angular frequency (rad/s).
    pub fn fwhm_omega(&self) -> f64 {
        2.0 * PI * C * self.spectral_fwhm / (self.wavelength * self.wavelength)
    }

    /// Standard deviation of the spectral intensity (rad/s).
    pub fn sigma_omega(&self) -> f64 {
        self.fwhm_omega() / (2.0 * (2.0 * 2f64.ln()).sqrt())
    }

    /// Duration parameter tau of the temporal envelope
    /// `exp(-(1 - i a) t^2 / (2 tau^2))` (s).
    pub fn tau(&self) -> f64 {
        (1.0 + self.chirp * self.chirp).sqrt() / (2f64.sqrt() * self.sigma_omega())
    }

    /// Pump whose spectral width follows from a fixed duration and chirp.
    pub fn with_duration(mut self, tau: f64, chirp: f64) -> Self {
        let sigma = (1.0 + chirp * chirp).sqrt() / (2f64.sqrt() * tau);
        let fwhm_omega = sigma * 2.0 * (2.0 * 2f64.ln()).sqrt();
        self.chirp = chirp;
        self.spectral_fwhm = fwhm_omega * self.wavelength * self.wavelength / (2.0 * PI * C);
        self
    }
}

/// Square root of the mean number of pump photons per pulse.
pub fn pulse_amplitude_xi(pump: &PumpConfig) -> f64 {
    (pump.power / (pump.rep_rate * HBAR * pump.omega0())).sqrt()
}

/// Spectral amplitude at absolute frequency `omega`, unit peak at the carrier.
pub fn pump_spectral_amplitude(omega: f64, pump: &PumpConfig) -> Complex64 {
    let nu = omega - pump.omega0();
    let s = pump.sigma_omega();
    let x = nu * nu / (4.0 * s * s);
    Complex64::new(-x, -pump.chirp * x).exp()
}
