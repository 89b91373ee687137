//! C interface to the twinbeam simulator.
//!
//! Scenarios are opaque handles created from TOML text and released with
//! `tb_scenario_free`. Every function returns a `TbStatus`; on failure the
//! message is available from `tb_last_error_message` on the same thread.
//! Panics are caught at the boundary and reported as `TB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use twinbeam::config::SourceConfig;
use twinbeam::dispersion::{refractive_index, Polarization, SellmeierSet};
use twinbeam::dynamics::{exit_coefficients, TripletInit};
use twinbeam::scenario::Scenario;
use twinbeam::sweep::{self, SweepOptions};
use twinbeam::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Config = 4,
    Numeric = 5,
    Io = 6,
    Panic = 7,
    Cutoff = 8,
}

/// Opaque scenario handle.
pub struct TbScenario(Scenario);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TbTripletExit {
    pub z0: f64,
    pub phi: f64,
    pub u: f64,
    pub v: f64,
    pub a_p: f64,
    pub a_s: f64,
}

/// One sweep point. Widths not requested are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TbSweepRecord {
    pub power: f64,
    pub photons: f64,
    pub conversion: f64,
    pub k_dim: f64,
    pub fedorov_omega: f64,
    pub spectrum_fwhm: f64,
    pub c_omega: f64,
    pub a_omega: f64,
    pub c_t: f64,
    pub a_t: f64,
    pub c_k: f64,
    pub c_phi: f64,
    pub ring_fwhm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::Domain(_) => TbStatus::Domain,
        Error::Config { .. } => TbStatus::Config,
        Error::Numeric(_) => TbStatus::Numeric,
        Error::Cutoff(_) => TbStatus::Cutoff,
        Error::Io(_) => TbStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), TbStatus>) -> TbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TbStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TbStatus::Panic
        }
    }
}

fn fail(e: Error) -> TbStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> TbStatus {
    set_error(format!("null pointer: {what}"));
    TbStatus::NullPointer
}

fn invalid(msg: &str) -> TbStatus {
    set_error(msg.to_string());
    TbStatus::InvalidArgument
}

/// Builds a scenario from TOML text (NUL-terminated UTF-8). An empty string
/// gives the default scenario. With a calibration anchor this solves for
/// the coupling constant, which can take several seconds.
///
/// # Safety
/// `toml` must be a valid C string; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn tb_scenario_from_toml_str(toml: *const c_char, out: *mut *mut TbScenario) -> TbStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml).to_str().map_err(|_| invalid("toml is not valid UTF-8"))?;
        let config = SourceConfig::from_toml_str(text).map_err(fail)?;
        let s = Scenario::new(config).map_err(fail)?;
        *out = Box::into_raw(Box::new(TbScenario(s)));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from `tb_scenario_from_toml_str` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tb_scenario_free(s: *mut TbScenario) {
    if !s.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(s))));
    }
}

/// Current coupling constant K.
///
/// # Safety
/// `s` must be a live handle and `k` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_scenario_coupling(s: *const TbScenario, k: *mut f64) -> TbStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        let k = k.as_mut().ok_or_else(|| null("k"))?;
        *k = s.0.k;
        Ok(())
    })
}

/// Replaces the coupling constant K (must be positive).
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_scenario_set_coupling(s: *mut TbScenario, k: f64) -> TbStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid("coupling must be positive and finite"));
        }
        s.0.k = k;
        Ok(())
    })
}

/// Solves for K so that signal plus idler carry `fraction` of the pulse
/// energy at `power` (W), stores it in the scenario and writes it to `k`.
///
/// # Safety
/// `s` must be a live handle; `k` may be null.
#[no_mangle]
pub unsafe extern "C" fn tb_calibrate(s: *mut TbScenario, power: f64, fraction: f64, k: *mut f64) -> TbStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        let v = sweep::calibrate_coupling(&s.0, power, fraction).map_err(fail)?;
        s.0.k = v;
        if let Some(k) = k.as_mut() {
            *k = v;
        }
        Ok(())
    })
}

/// Mean signal photon number per pulse at `power` (W).
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_photon_number(s: *const TbScenario, power: f64, out: *mut f64) -> TbStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(power >= 0.0 && power.is_finite()) {
            return Err(invalid("power must be non-negative"));
        }
        *out = sweep::photon_number(&s.0, power, s.0.k, s.0.z_end());
        Ok(())
    })
}

/// Evaluates `n` strictly increasing powers into `out[0..n]`. Nonzero
/// `temporal` / `transverse` request the corresponding widths.
///
/// # Safety
/// `powers` must hold `n` values and `out` room for `n` records.
#[no_mangle]
pub unsafe extern "C" fn tb_sweep(
    s: *const TbScenario,
    powers: *const f64,
    n: usize,
    temporal: i32,
    transverse: i32,
    out: *mut TbSweepRecord,
) -> TbStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        if powers.is_null() {
            return Err(null("powers"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(invalid("need at least one power"));
        }
        let p = std::slice::from_raw_parts(powers, n);
        let opts = SweepOptions { temporal: temporal != 0, transverse: transverse != 0 };
        let records = sweep::run_sweep(&s.0, p, opts).map_err(fail)?;
        let dst = std::slice::from_raw_parts_mut(out, n);
        for (d, r) in dst.iter_mut().zip(&records) {
            *d = TbSweepRecord {
                power: r.power,
                photons: r.photons,
                conversion: r.conversion,
                k_dim: r.k_dim,
                fedorov_omega: r.fedorov_omega,
                spectrum_fwhm: r.spectrum.value,
                c_omega: r.c_omega.value,
                a_omega: r.a_omega.value,
                c_t: r.c_t.value,
                a_t: r.a_t.value,
                c_k: r.c_k.value,
                c_phi: r.c_phi.value,
                ring_fwhm: r.ring.value,
            };
        }
        Ok(())
    })
}

/// Refractive index of BBO at `wavelength` (m). `extraordinary == 0` gives
/// the ordinary index; otherwise the extraordinary index at `theta` (rad)
/// from the optic axis.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_refractive_index(wavelength: f64, extraordinary: i32, theta: f64, out: *mut f64) -> TbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let pol = if extraordinary == 0 { Polarization::Ordinary } else { Polarization::Extraordinary(theta) };
        *out = refractive_index(&SellmeierSet::bbo_kato(), pol, wavelength).map_err(fail)?;
        Ok(())
    })
}

/// Exit state of one triplet with initial amplitudes `ap0 >= as0 >= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_triplet_exit(ap0: f64, as0: f64, k: f64, z_end: f64, out: *mut TbTripletExit) -> TbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let init = TripletInit::new(ap0, as0, k, z_end).map_err(fail)?;
        let r = exit_coefficients(&init);
        *out = TbTripletExit { z0: r.z0, phi: r.phi, u: r.u, v: r.v, a_p: r.ap, a_s: r.as_ };
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
/// Passing a null `buf` only queries the length.
///
/// # Safety
/// `buf` must be null or hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
