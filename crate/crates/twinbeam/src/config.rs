//! Scenario configuration: a TOML file of dotted keys with documented
//! defaults. Unknown keys are rejected so typos do not pass silently.

use crate::dispersion::{CrystalConfig, Sellmeier, SellmeierSet};
use crate::pump::PumpConfig;
use crate::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_omega: usize,
    pub n_k: usize,
    /// Starting spectral span (rad/s), doubled as needed.
    pub omega_span: f64,
    /// Starting radial span (rad/m), doubled as needed.
    pub k_span: f64,
    pub max_azimuthal_order: usize,
    /// Logarithmic bins per decade for grouping triplets; 0 keeps them all.
    pub class_bins_per_decade: usize,
    /// Squared-coefficient mass allowed to be dropped by truncation.
    pub truncation_epsilon: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_omega: 512,
            n_k: 512,
            omega_span: 3e14,
            k_span: 2e5,
            max_azimuthal_order: 4096,
            class_bins_per_decade: 1000,
            truncation_epsilon: 1e-4,
        }
    }
}

/// Where the anchor calibration is run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorScenario {
    /// The default 4 mm, 1 nm, 1 mm scenario with this file's grid settings.
    Reference,
    /// The scenario described by this file.
    SelfScenario,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Explicit(f64),
    /// Fraction of pump energy converted into signal plus idler at `power`.
    Anchor { power: f64, fraction: f64, scenario: AnchorScenario },
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling::Anchor { power: 0.2, fraction: 0.08, scenario: AnchorScenario::Reference }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub points: usize,
    pub temporal: bool,
    pub transverse: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { p_min: 1e-7, p_max: 10.0, points: 61, temporal: true, transverse: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub crystal: CrystalConfig,
    /// Cut angle from the file; solved from phase matching when absent.
    pub cut_angle: Option<f64>,
    /// External emission half-angle (rad).
    pub emission_angle: f64,
    pub pump: PumpConfig,
    pub grid: GridConfig,
    pub coupling: Coupling,
    pub sweep: SweepConfig,
    pub output_dir: Option<String>,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            crystal: CrystalConfig {
                length: 4e-3,
                ext_length: None,
                cut_angle: 0.0,
                sellmeier: SellmeierSet::bbo_kato(),
            },
            cut_angle: None,
            emission_angle: 8.45f64.to_radians(),
            pump: PumpConfig::default(),
            grid: GridConfig::default(),
            coupling: Coupling::default(),
            sweep: SweepConfig::default(),
            output_dir: None,
        }
    }
}

const KEYS: &[&str] = &[
    "crystal.length_m",
    "crystal.ext_length_m",
    "crystal.cut_angle_deg",
    "crystal.sellmeier_o",
    "crystal.sellmeier_e",
    "geometry.emission_angle_deg",
    "pump.wavelength_m",
    "pump.rep_rate_hz",
    "pump.waist_m",
    "pump.spectral_fwhm_m",
    "pump.chirp",
    "coupling.k",
    "coupling.reference_power_w",
    "coupling.reference_fraction",
    "coupling.anchor_scenario",
    "grid.n_omega",
    "grid.n_k",
    "grid.omega_span_rad_s",
    "grid.k_span_rad_m",
    "grid.max_azimuthal_order",
    "grid.class_bins_per_decade",
    "grid.truncation_epsilon",
    "sweep.p_min_w",
    "sweep.p_max_w",
    "sweep.points",
    "sweep.temporal",
    "sweep.transverse",
    "output.dir",
];

struct Flat(Vec<(String, toml::Value)>);

impl Flat {
    fn new(t: &toml::Table) -> Result<Self> {
        let mut out = Vec::new();
        for (section, v) in t {
            let toml::Value::Table(inner) = v else {
                return Err(Error::config_key(section, "expected a [section] table"));
            };
            for (k, v) in inner {
                let key = format!("{section}.{k}");
                if !KEYS.contains(&key.as_str()) {
                    return Err(Error::config_key(&key, "unknown key"));
                }
                out.push((key, v.clone()));
            }
        }
        Ok(Flat(out))
    }

    fn get(&self, key: &str) -> Option<&toml::Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(Error::config_key(key, "expected a number")),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(Error::config_key(key, "expected a non-negative integer")),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(Error::config_key(key, "expected true or false")),
        }
    }

    fn str(&self, key: &str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Error::config_key(key, "expected a string")),
        }
    }

    fn sellmeier(&self, key: &str) -> Result<Option<Sellmeier>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(a)) if a.len() == 4 => {
                let mut v = [0.0; 4];
                for (i, x) in a.iter().enumerate() {
                    v[i] = match x {
                        toml::Value::Float(f) => *f,
                        toml::Value::Integer(n) => *n as f64,
                        _ => return Err(Error::config_key(key, "expected four numbers")),
                    };
                }
                Ok(Some(Sellmeier::from_array(v)))
            }
            Some(_) => Err(Error::config_key(key, "expected [a, b, c, d]")),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config_key(key, format!("must be positive, got {v}")))
    }
}

impl SourceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config(e.to_string()))?;
        let f = Flat::new(&table)?;
        let mut c = SourceConfig::default();

        if let Some(v) = f.f64("crystal.length_m")? {
            c.crystal.length = positive("crystal.length_m", v)?;
        }
        if let Some(v) = f.f64("crystal.ext_length_m")? {
            c.crystal.ext_length = Some(positive("crystal.ext_length_m", v)?);
        }
        if let Some(v) = f.f64("crystal.cut_angle_deg")? {
            c.cut_angle = Some(positive("crystal.cut_angle_deg", v)?.to_radians());
        }
        if let Some(s) = f.sellmeier("crystal.sellmeier_o")? {
            c.crystal.sellmeier.ordinary = s;
        }
        if let Some(s) = f.sellmeier("crystal.sellmeier_e")? {
            c.crystal.sellmeier.extraordinary = s;
        }
        if let Some(v) = f.f64("geometry.emission_angle_deg")? {
            if !(0.0..90.0).contains(&v) {
                return Err(Error::config_key("geometry.emission_angle_deg", "must lie in [0, 90)"));
            }
            c.emission_angle = v.to_radians();
        }
        if let Some(v) = f.f64("pump.wavelength_m")? {
            c.pump.wavelength = positive("pump.wavelength_m", v)?;
        }
        if let Some(v) = f.f64("pump.rep_rate_hz")? {
            c.pump.rep_rate = positive("pump.rep_rate_hz", v)?;
        }
        if let Some(v) = f.f64("pump.waist_m")? {
            c.pump.waist = positive("pump.waist_m", v)?;
        }
        if let Some(v) = f.f64("pump.spectral_fwhm_m")? {
            c.pump.spectral_fwhm = positive("pump.spectral_fwhm_m", v)?;
        }
        if let Some(v) = f.f64("pump.chirp")? {
            c.pump.chirp = v;
        }

        let has_section = table.contains_key("coupling");
        let k = f.f64("coupling.k")?;
        let p = f.f64("coupling.reference_power_w")?;
        let eta = f.f64("coupling.reference_fraction")?;
        let anchor = match f.str("coupling.anchor_scenario")?.as_deref() {
            None | Some("reference") => AnchorScenario::Reference,
            Some("self") => AnchorScenario::SelfScenario,
            Some(_) => return Err(Error::config_key("coupling.anchor_scenario", "expected \"reference\" or \"self\"")),
        };
        if has_section {
            c.coupling = match (k, p.is_some() || eta.is_some()) {
                (Some(k), false) => Coupling::Explicit(positive("coupling.k", k)?),
                (None, true) => {
                    let power = positive("coupling.reference_power_w", p.unwrap_or(0.2))?;
                    let fraction = eta.unwrap_or(0.08);
                    if !(fraction > 0.0 && fraction < 0.5) {
                        return Err(Error::config_key("coupling.reference_fraction", "must lie in (0, 0.5)"));
                    }
                    Coupling::Anchor { power, fraction, scenario: anchor }
                }
                (Some(_), true) => {
                    return Err(Error::config_key("coupling", "give either k or the calibration anchor, not both"))
                }
                (None, false) => {
                    return Err(Error::config_key("coupling", "give either k or the calibration anchor"))
                }
            };
        }

        let g = &mut c.grid;
        if let Some(v) = f.usize("grid.n_omega")? {
            g.n_omega = v;
        }
        if let Some(v) = f.usize("grid.n_k")? {
            g.n_k = v;
        }
        if let Some(v) = f.f64("grid.omega_span_rad_s")? {
            g.omega_span = positive("grid.omega_span_rad_s", v)?;
        }
        if let Some(v) = f.f64("grid.k_span_rad_m")? {
            g.k_span = positive("grid.k_span_rad_m", v)?;
        }
        if let Some(v) = f.usize("grid.max_azimuthal_order")? {
            g.max_azimuthal_order = v;
        }
        if let Some(v) = f.usize("grid.class_bins_per_decade")? {
            g.class_bins_per_decade = v;
        }
        if let Some(v) = f.f64("grid.truncation_epsilon")? {
            g.truncation_epsilon = v;
        }
        for (key, n) in [("grid.n_omega", g.n_omega), ("grid.n_k", g.n_k)] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::config_key(key, "must be an even number >= 8"));
            }
        }
        if !(g.truncation_epsilon > 0.0 && g.truncation_epsilon < 1.0) {
            return Err(Error::config_key("grid.truncation_epsilon", "must lie in (0, 1)"));
        }
        if g.max_azimuthal_order < 64 {
            return Err(Error::config_key("grid.max_azimuthal_order", "must be at least 64"));
        }

        let s = &mut c.sweep;
        if let Some(v) = f.f64("sweep.p_min_w")? {
            s.p_min = positive("sweep.p_min_w", v)?;
        }
        if let Some(v) = f.f64("sweep.p_max_w")? {
            s.p_max = positive("sweep.p_max_w", v)?;
        }
        if let Some(v) = f.usize("sweep.points")? {
            s.points = v;
        }
        if let Some(v) = f.bool("sweep.temporal")? {
            s.temporal = v;
        }
        if let Some(v) = f.bool("sweep.transverse")? {
            s.transverse = v;
        }
        if s.points < 2 || !(s.p_max > s.p_min) {
            return Err(Error::config_key("sweep.points", "need at least two points and p_max_w > p_min_w"));
        }
        c.output_dir = f.str("output.dir")?;

        c.crystal.validate()?;
        c.pump.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Every setting as `key = value` lines, for output headers.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, s: String| v.push((k.to_string(), s));
        let arr = |s: Sellmeier| format!("{:?}", s.to_array());
        put("crystal.length_m", format!("{:e}", self.crystal.length));
        put(
            "crystal.ext_length_m",
            self.crystal.ext_length.map_or("none".into(), |x| format!("{x:e}")),
        );
        put(
            "crystal.cut_angle_deg",
            self.cut_angle.map_or("solved".into(), |x| format!("{}", x.to_degrees())),
        );
        put("crystal.sellmeier_o", arr(self.crystal.sellmeier.ordinary));
        put("crystal.sellmeier_e", arr(self.crystal.sellmeier.extraordinary));
        put("geometry.emission_angle_deg", format!("{}", self.emission_angle.to_degrees()));
        put("pump.wavelength_m", format!("{:e}", self.pump.wavelength));
        put("pump.rep_rate_hz", format!("{}", self.pump.rep_rate));
        put("pump.waist_m", format!("{:e}", self.pump.waist));
        put("pump.spectral_fwhm_m", format!("{:e}", self.pump.spectral_fwhm));
        put("pump.chirp", format!("{}", self.pump.chirp));
        match &self.coupling {
            Coupling::Explicit(k) => put("coupling.k", format!("{k:e}")),
            Coupling::Anchor { power, fraction, scenario } => {
                put("coupling.reference_power_w", format!("{power}"));
                put("coupling.reference_fraction", format!("{fraction}"));
                let s = match scenario {
                    AnchorScenario::Reference => "reference",
                    AnchorScenario::SelfScenario => "self",
                };
                put("coupling.anchor_scenario", s.into());
            }
        }
        let g = &self.grid;
        put("grid.n_omega", g.n_omega.to_string());
        put("grid.n_k", g.n_k.to_string());
        put("grid.omega_span_rad_s", format!("{:e}", g.omega_span));
        put("grid.k_span_rad_m", format!("{:e}", g.k_span));
        put("grid.max_azimuthal_order", g.max_azimuthal_order.to_string());
        put("grid.class_bins_per_decade", g.class_bins_per_decade.to_string());
        put("grid.truncation_epsilon", format!("{:e}", g.truncation_epsilon));
        let s = &self.sweep;
        put("sweep.p_min_w", format!("{:e}", s.p_min));
        put("sweep.p_max_w", format!("{:e}", s.p_max));
        put("sweep.points", s.points.to_string());
        put("sweep.temporal", s.temporal.to_string());
        put("sweep.transverse", s.transverse.to_string());
        v
    }

    /// The same grids and sweep settings with the default physical scenario.
    pub fn reference(&self) -> SourceConfig {
        SourceConfig {
            grid: self.grid.clone(),
            sweep: self.sweep.clone(),
            coupling: self.coupling.clone(),
            output_dir: self.output_dir.clone(),
            ..SourceConfig::default()
        }
    }
}
