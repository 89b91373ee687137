//! CSV and JSON output. Numbers use C-style `%.12e`; every file starts with
//! `#` lines carrying the resolved configuration.

use crate::config::SourceConfig;
use crate::sweep::SweepRecord;
use crate::width::{Profile1D, Profile2D};
use crate::Result;
use std::fmt::Write as _;
use std::path::Path;

/// `%.12e`: twelve fraction digits, signed exponent of at least two digits.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Header lines for a file, including the resolved configuration and any
/// extra `key = value` pairs.
pub fn header(config: &SourceConfig, extra: &[(&str, String)]) -> String {
    let mut h = String::new();
    for (k, v) in config.to_key_values() {
        let _ = writeln!(h, "# {k} = {v}");
    }
    for (k, v) in extra {
        let _ = writeln!(h, "# {k} = {v}");
    }
    h
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "power_w",
    "photons",
    "conversion",
    "k_dim",
    "k_dim_weak",
    "fedorov_omega",
    "spectrum_fwhm_rad_s",
    "spectrum_multimodal",
    "c_omega_rad_s",
    "c_omega_multimodal",
    "a_omega_rad_s",
    "a_omega_multimodal",
    "c_t_s",
    "c_t_multimodal",
    "a_t_s",
    "a_t_multimodal",
    "c_k_rad_m",
    "c_k_multimodal",
    "c_theta_rad",
    "c_phi_rad",
    "c_phi_multimodal",
    "ring_fwhm_rad_m",
    "ring_multimodal",
    "symplectic_defect",
    "symplectic_checks",
];

pub fn sweep_csv(header: &str, records: &[SweepRecord]) -> String {
    let mut s = String::from(header);
    s.push_str(&SWEEP_COLUMNS.join(","));
    s.push('\n');
    for r in records {
        let cells = [
            sci(r.power),
            sci(r.photons),
            sci(r.conversion),
            sci(r.k_dim),
            flag(r.k_dim_weak).into(),
            sci(r.fedorov_omega),
            sci(r.spectrum.value),
            flag(r.spectrum.multimodal).into(),
            sci(r.c_omega.value),
            flag(r.c_omega.multimodal).into(),
            sci(r.a_omega.value),
            flag(r.a_omega.multimodal).into(),
            sci(r.c_t.value),
            flag(r.c_t.multimodal).into(),
            sci(r.a_t.value),
            flag(r.a_t.multimodal).into(),
            sci(r.c_k.value),
            flag(r.c_k.multimodal).into(),
            sci(r.c_theta),
            sci(r.c_phi.value),
            flag(r.c_phi.multimodal).into(),
            sci(r.ring.value),
            flag(r.ring.multimodal).into(),
            sci(r.symplectic_defect),
            r.symplectic_checks.to_string(),
        ];
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn profile_csv(header: &str, name: &str, p: &Profile1D) -> String {
    let mut s = String::from(header);
    let _ = writeln!(s, "# axis unit = {}", p.unit);
    let _ = writeln!(s, "axis,{name}");
    for (x, y) in p.axis.iter().zip(&p.values) {
        let _ = writeln!(s, "{},{}", sci(*x), sci(*y));
    }
    s
}

/// Long format: one `x,y,value` row per sample.
pub fn profile2d_csv(header: &str, name: &str, p: &Profile2D) -> String {
    let mut s = String::from(header);
    let _ = writeln!(s, "# axis unit = {}", p.unit);
    let _ = writeln!(s, "x,y,{name}");
    for (i, x) in p.x.iter().enumerate() {
        for (j, y) in p.y.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", sci(*x), sci(*y), sci(p.at(i, j)));
        }
    }
    s
}

/// Generic table with named columns.
pub fn table_csv(header: &str, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::from(header);
    s.push_str(&columns.join(","));
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| sci(*x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(sci(1e-7), "1.000000000000e-07");
        assert_eq!(sci(-2.5e120), "-2.500000000000e+120");
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(f64::NAN), "NaN");
    }
}
