//! A fully assembled source: resolved geometry, Schmidt basis, triplet table
//! and coupling constant. Everything that does not depend on pump power.

use crate::config::{AnchorScenario, Coupling, SourceConfig};
use crate::dispersion::{find_phasematching_angle, CrystalConfig, Geometry};
use crate::kernels::{build_azimuthal_coefficients, build_radial_kernel, build_spectral_kernel};
use crate::observables::{TemporalModes, TwinBeamState};
use crate::pump::{pulse_amplitude_xi, PumpConfig};
use crate::schmidt::{assemble_triplets, AzimuthalFamily, ModeFamily, SchmidtBasis, TripletTable};
use crate::{Result, HBAR};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SourceConfig,
    /// Crystal with the cut angle resolved.
    pub crystal: CrystalConfig,
    pub geometry: Geometry,
    pub basis: SchmidtBasis,
    pub table: TripletTable,
    pub temporal: TemporalModes,
    /// Coupling constant K (1/(m sqrt-photon)).
    pub k: f64,
}

impl Scenario {
    /// Builds the basis and resolves the coupling, calibrating if needed.
    pub fn new(config: SourceConfig) -> Result<Self> {
        let mut s = Self::uncoupled(config)?;
        s.k = match s.config.coupling.clone() {
            Coupling::Explicit(k) => k,
            Coupling::Anchor { power, fraction, scenario } => {
                let reference = s.config.reference();
                if scenario == AnchorScenario::SelfScenario || reference == s.config {
                    crate::sweep::calibrate_coupling(&s, power, fraction)?
                } else {
                    let r = Self::uncoupled(reference)?;
                    crate::sweep::calibrate_coupling(&r, power, fraction)?
                }
            }
        };
        Ok(s)
    }

    /// Builds everything but leaves K at NaN.
    pub fn uncoupled(config: SourceConfig) -> Result<Self> {
        let set = config.crystal.sellmeier;
        let geometry = Geometry::new(config.pump.wavelength, config.emission_angle, &set)?;
        let mut crystal = config.crystal.clone();
        crystal.cut_angle = match config.cut_angle {
            Some(a) => a,
            None => find_phasematching_angle(&geometry, &crystal)?,
        };
        let g = &config.grid;
        let keep = 1.0 - g.truncation_epsilon / 3.0;
        let sk = build_spectral_kernel(&config.pump, &crystal, &geometry, g.n_omega, g.omega_span)?;
        let spectral = ModeFamily::from_kernel(&sk, keep)?;
        drop(sk);
        let rk = build_radial_kernel(&config.pump, &crystal, &geometry, g.n_k, g.k_span)?;
        let radial = ModeFamily::from_kernel(&rk, keep)?;
        drop(rk);
        let c = build_azimuthal_coefficients(&config.pump, &geometry, g.max_azimuthal_order)?;
        let azimuthal = AzimuthalFamily::from_coefficients(&c, keep);
        let basis = SchmidtBasis { spectral, radial, azimuthal };
        let table = assemble_triplets(&basis, g.class_bins_per_decade)?;
        let temporal = TemporalModes::new(&basis.spectral);
        Ok(Scenario { config, crystal, geometry, basis, table, temporal, k: f64::NAN })
    }

    /// The same scenario with an explicit coupling constant.
    pub fn with_coupling(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn pump_at(&self, power: f64) -> PumpConfig {
        PumpConfig { power, ..self.config.pump.clone() }
    }

    pub fn xi(&self, power: f64) -> f64 {
        pulse_amplitude_xi(&self.pump_at(power))
    }

    pub fn z_end(&self) -> f64 {
        self.crystal.dynamics_length()
    }

    pub fn state(&self, power: f64) -> TwinBeamState<'_> {
        self.state_with(power, self.k, self.z_end())
    }

    pub fn state_with(&self, power: f64, k: f64, z_end: f64) -> TwinBeamState<'_> {
        TwinBeamState::new(&self.basis, &self.table, power, self.xi(power), k, z_end)
    }

    /// Fraction of pulse energy carried by signal plus idler photons.
    pub fn conversion(&self, photons: f64, power: f64) -> f64 {
        2.0 * photons * HBAR * self.geometry.omega_s0 * self.config.pump.rep_rate / power
    }

    /// Starting half-width (rad) of the azimuthal correlation window.
    pub fn azimuthal_window(&self) -> f64 {
        16.0 / (self.geometry.k_r * self.config.pump.waist)
    }

    /// Converts a radial wave-vector width (rad/m) to an external polar angle (rad).
    pub fn radial_to_angle(&self, dk: f64) -> f64 {
        dk / (self.geometry.k0_signal() * self.geometry.theta_ext.cos())
    }
}
