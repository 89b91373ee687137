//! Single-triplet dynamics under the generalized parametric approximation.
//!
//! With `A_s = A_i` the classical equations conserve `A_p^2 + A_s^2 = A_ps^2`
//! and give `A_p(z) = A_ps (a - b e^x) / (a + b e^x)`, `x = 2 K A_ps z`,
//! `a, b = (A_ps +- A_p(0)) / (2 A_ps)`. The phase is `phi = K int A_p dz`.
//! Past the depletion length z0 both are mirrored, `f(z) = f(2 z0 - z)`, and
//! the motion repeats with period 2 z0.

use crate::{Error, Result};

/// Vacuum amplitude in symmetric ordering.
pub const VACUUM: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletInit {
    pub ap0: f64,
    pub as0: f64,
    pub k: f64,
    pub z_end: f64,
    pub aps: f64,
    /// `A_ps - A_p(0)`, kept separately to avoid cancellation.
    gap: f64,
}

impl TripletInit {
    pub fn new(ap0: f64, as0: f64, k: f64, z_end: f64) -> Result<Self> {
        if !(ap0 >= as0 && as0 >= 0.0) {
            return Err(Error::domain("need A_p(0) >= A_s(0) >= 0"));
        }
        if !(k > 0.0) || !(z_end >= 0.0) {
            return Err(Error::domain("need K > 0 and z_end >= 0"));
        }
        let aps = ap0.hypot(as0);
        let gap = as0 * as0 / (aps + ap0);
        Ok(TripletInit { ap0, as0, k, z_end, aps, gap })
    }

    /// Symmetric-ordering seed for a triplet with classical pump amplitude
    /// `an`: `A_p(0) = sqrt(an^2 + 1/2)`, `A_s(0) = 1/sqrt(2)`.
    pub fn seeded(an: f64, k: f64, z_end: f64) -> Self {
        let ap0 = (an * an + 0.5).sqrt();
        let aps = (an * an + 1.0).sqrt();
        TripletInit { ap0, as0: VACUUM, k, z_end, aps, gap: 0.5 / (aps + ap0) }
    }

    /// The same triplet propagated to a different exit plane.
    pub fn with_z_end(self, z_end: f64) -> Self {
        TripletInit { z_end, ..self }
    }

    /// `ln a` and `ln b`.
    fn log_ab(&self) -> (f64, f64) {
        let two = 2.0 * self.aps;
        (((self.aps + self.ap0) / two).ln(), (self.gap / two).ln())
    }

    /// Position within the first half period after folding, or None when the
    /// motion is frozen (z0 = 0).
    fn fold(&self, z: f64) -> Option<f64> {
        let z0 = depletion_length(self);
        if z0 == 0.0 {
            return None;
        }
        if !z0.is_finite() {
            return Some(z);
        }
        let per = 2.0 * z0;
        let zz = z.rem_euclid(per);
        Some(if zz > z0 { per - zz } else { zz })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletSolution {
    pub z0: f64,
    pub phi: f64,
    pub u: f64,
    pub v: f64,
    pub ap: f64,
    pub as_: f64,
}

/// Distance at which the pump falls to the initial signal level.
pub fn depletion_length(init: &TripletInit) -> f64 {
    if init.ap0 == init.as0 {
        return 0.0;
    }
    if init.gap == 0.0 {
        return f64::INFINITY;
    }
    let r = 2.0 * init.aps / (init.aps + init.as0) * (init.ap0 - init.as0) / init.gap;
    r.ln_1p() / (2.0 * init.k * init.aps)
}

/// Classical pump and signal amplitudes at `z`.
pub fn classical_amplitudes(init: &TripletInit, z: f64) -> (f64, f64) {
    let Some(zz) = init.fold(z) else {
        return (init.ap0, init.as0);
    };
    if init.gap == 0.0 || zz == 0.0 {
        return (init.ap0, init.as0);
    }
    let (la, lb) = init.log_ab();
    // A_p = A_ps tanh(-t/2), A_s = A_ps / cosh(t/2), t = ln(b e^x / a).
    let t = lb - la + 2.0 * init.k * init.aps * zz;
    (init.aps * (-0.5 * t).tanh(), init.aps / (0.5 * t).cosh())
}

/// `phi(z) = K A_ps z - ln(a + b e^x)` on [0, z0], mirrored and periodic beyond.
pub fn phase_integral(init: &TripletInit, z: f64) -> f64 {
    let Some(zz) = init.fold(z) else {
        return 0.0;
    };
    if zz == 0.0 {
        return 0.0;
    }
    let x = 2.0 * init.k * init.aps * zz;
    if x < 1.0 {
        // a + b = 1, so ln(a + b e^x) = ln(1 + b (e^x - 1)) without cancellation.
        let b = init.gap / (2.0 * init.aps);
        return 0.5 * x - (b * x.exp_m1()).ln_1p();
    }
    let (la, lb) = init.log_ab();
    let lb = lb + x;
    let m = la.max(lb);
    let lse = if m == f64::NEG_INFINITY { m } else { m + (-(la - lb).abs()).exp().ln_1p() };
    0.5 * x - lse
}

pub fn exit_coefficients(init: &TripletInit) -> TripletSolution {
    let phi = phase_integral(init, init.z_end);
    let (ap, as_) = classical_amplitudes(init, init.z_end);
    TripletSolution { z0: depletion_length(init), phi, u: phi.cosh(), v: phi.sinh(), ap, as_ }
}

/// Exit `(V^2, U V)` of a seeded triplet; the hot loop of every observable.
#[inline]
pub fn exit_weights(an: f64, k: f64, z_end: f64) -> (f64, f64) {
    let phi = phase_integral(&TripletInit::seeded(an, k, z_end), z_end);
    let (s, c) = (phi.sinh(), phi.cosh());
    (s * s, s * c)
}
