//! Independent checks of the closed-form dynamics: RK4 integration of the
//! classical and linear operator equations, and exact truncated-Fock
//! evolution of a single triplet.

use crate::dynamics::{depletion_length, exit_weights, phase_integral, classical_amplitudes, TripletInit, VACUUM};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sampled RK4 trajectory of `[A_p, A_s, A_i, phi, U, V]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub ap: Vec<f64>,
    pub as_: Vec<f64>,
    pub ai: Vec<f64>,
    pub phi: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Turning points found during integration.
    pub turns: Vec<f64>,
    /// Largest |phi| and |U| reached up to the last sample.
    pub peak_phi: f64,
    pub peak_u: f64,
    /// Steps per unit of `K A_ps z` in the accepted run.
    pub resolution: usize,
}

type State = [f64; 6];

fn rhs(y: &State, k: f64, dir: f64) -> State {
    let [ap, as_, ai, _, u, v] = *y;
    let g = dir * k;
    [-g * as_ * ai, g * ap * ai, g * ap * as_, g * ap, g * ap * v, g * ap * u]
}

fn rk4_step(y: &State, h: f64, k: f64, dir: f64) -> State {
    let add = |a: &State, b: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = rhs(y, k, dir);
    let k2 = rhs(&add(y, &k1, 0.5 * h), k, dir);
    let k3 = rhs(&add(y, &k2, 0.5 * h), k, dir);
    let k4 = rhs(&add(y, &k3, h), k, dir);
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrates with a fixed step. Going forward, the direction flips when
/// the pump crosses the initial signal level, located by bisection on the
/// step length. The mirrored phase then runs for exactly as long as the
/// forward phase did before the direction flips back.
pub fn integrate_fixed(init: &TripletInit, z_grid: &[f64], steps_per_unit: usize) -> Trajectory {
    let k = init.k;
    let h = 1.0 / (k * init.aps * steps_per_unit as f64);
    let mut y: State = [init.ap0, init.as0, init.as0, 0.0, 1.0, 0.0];
    let mut z = 0.0;
    let mut dir = 1.0;
    let mut phase_start = 0.0;
    let mut return_at = f64::INFINITY;
    let mut t = Trajectory {
        z: Vec::new(),
        ap: Vec::new(),
        as_: Vec::new(),
        ai: Vec::new(),
        phi: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
        turns: Vec::new(),
        peak_phi: 0.0,
        peak_u: 1.0,
        resolution: steps_per_unit,
    };
    let frozen = init.ap0 == init.as0;
    for &target in z_grid {
        while z < target && !frozen {
            if dir < 0.0 {
                let step = h.min(target - z).min(return_at - z);
                y = rk4_step(&y, step, k, dir);
                z += step;
                t.peak_phi = t.peak_phi.max(y[3].abs());
                t.peak_u = t.peak_u.max(y[4].abs());
                if z >= return_at {
                    z = return_at;
                    t.turns.push(z);
                    dir = 1.0;
                    phase_start = z;
                }
                continue;
            }
            let step = h.min(target - z);
            let next = rk4_step(&y, step, k, dir);
            if !(next[0] < init.as0) {
                y = next;
                z += step;
                t.peak_phi = t.peak_phi.max(y[3].abs());
                t.peak_u = t.peak_u.max(y[4].abs());
                continue;
            }
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if rk4_step(&y, mid, k, dir)[0] < init.as0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            y = rk4_step(&y, lo, k, dir);
            z += lo;
            t.peak_phi = t.peak_phi.max(y[3].abs());
            t.peak_u = t.peak_u.max(y[4].abs());
            t.turns.push(z);
            return_at = z + (z - phase_start);
            dir = -1.0;
        }
        t.z.push(target);
        t.ap.push(y[0]);
        t.as_.push(y[1]);
        t.ai.push(y[2]);
        t.phi.push(y[3]);
        t.u.push(y[4]);
        t.v.push(y[5]);
    }
    t
}

/// Target for successive-halving agreement.
pub const STEP_TOLERANCE: f64 = 1e-10;

fn max_change(a: &Trajectory, b: &Trajectory, init: &TripletInit) -> f64 {
    let mut m = 0f64;
    for i in 0..a.z.len() {
        let amp = [(a.ap[i], b.ap[i]), (a.as_[i], b.as_[i]), (a.ai[i], b.ai[i])];
        for (x, y) in amp {
            m = m.max((x - y).abs() / init.aps);
        }
        m = m.max((a.phi[i] - b.phi[i]).abs() / a.peak_phi.max(1.0));
        m = m.max((a.u[i] - b.u[i]).abs() / a.peak_u);
        m = m.max((a.v[i] - b.v[i]).abs() / a.peak_u);
    }
    m
}

/// RK4 trajectory of the classical amplitudes and the operator coefficients,
/// halving the step until the samples change by less than `STEP_TOLERANCE`.
pub fn rk4_classical(init: &TripletInit, z_grid: &[f64]) -> Result<Trajectory> {
    if z_grid.windows(2).any(|w| w[1] < w[0]) || z_grid.iter().any(|z| *z < 0.0) {
        return Err(Error::domain("z grid must be non-negative and ascending"));
    }
    let mut n = 64;
    let mut prev = integrate_fixed(init, z_grid, n);
    while n < 1 << 18 {
        n *= 2;
        let next = integrate_fixed(init, z_grid, n);
        if max_change(&prev, &next, init) < STEP_TOLERANCE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::numeric("RK4 step refinement did not converge"))
}

/// `(U, V)` along the grid, integrated from `U = 1, V = 0` against the
/// RK4 pump amplitude.
pub fn rk4_linear_uv(init: &TripletInit, z_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = rk4_classical(init, z_grid)?;
    Ok((t.u, t.v))
}

/// Worst deviations of a trajectory from the closed forms. Amplitudes are
/// relative to `A_ps`; the phase and U, V relative to their size or to the
/// phase reached at the depletion length, whichever is larger.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClosedFormErrors {
    pub amplitude: f64,
    pub phase: f64,
    pub uv: f64,
    /// Largest |A_p^2 + A_s^2 - A_ps^2| / A_ps^2 along the RK4 run.
    pub conservation: f64,
    /// Largest |U^2 - V^2 - 1| along the RK4 run, relative to the peak U^2.
    pub symplectic: f64,
}

impl ClosedFormErrors {
    pub fn worst(&self) -> f64 {
        self.amplitude.max(self.phase).max(self.uv)
    }
}

pub fn compare_closed_form(init: &TripletInit, t: &Trajectory) -> ClosedFormErrors {
    let z0 = depletion_length(init);
    let phi_ref = if z0.is_finite() { phase_integral(init, z0) } else { 0.0 };
    let mut e = ClosedFormErrors::default();
    for i in 0..t.z.len() {
        let (ap, as_) = classical_amplitudes(init, t.z[i]);
        let phi = phase_integral(init, t.z[i]);
        e.amplitude = e.amplitude.max((t.ap[i] - ap).abs() / init.aps).max((t.as_[i] - as_).abs() / init.aps);
        let scale = phi.abs().max(phi_ref).max(1e-300);
        e.phase = e.phase.max((t.phi[i] - phi).abs() / scale);
        let uscale = phi.cosh().max(phi_ref.cosh());
        e.uv = e.uv.max((t.u[i] - phi.cosh()).abs() / uscale).max((t.v[i] - phi.sinh()).abs() / uscale);
        let a2 = t.ap[i] * t.ap[i] + t.as_[i] * t.as_[i];
        e.conservation = e.conservation.max((a2 - init.aps * init.aps).abs() / (init.aps * init.aps));
        e.symplectic = e.symplectic.max((t.u[i] * t.u[i] - t.v[i] * t.v[i] - 1.0).abs() / (t.peak_u * t.peak_u));
    }
    e
}

/// Reproducible family of inits: `A_p(0)` log-uniform in [1, 1e8], vacuum
/// seed, K log-uniform in [0.1, 10], `K A_ps z_end` uniform in [0.1, 20].
pub fn random_inits(seed: u64, count: usize) -> Vec<TripletInit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ap0 = 10f64.powf(rng.random_range(0.0..8.0));
            let k = 10f64.powf(rng.random_range(-1.0..1.0));
            let x = rng.random_range(0.1..20.0);
            let aps = ap0.hypot(VACUUM);
            TripletInit::new(ap0, VACUUM, k, x / (k * aps)).expect("valid init")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockConfig {
    /// Coherent pump amplitude (real).
    pub alpha: f64,
    /// Largest pump photon number kept.
    pub n_max: usize,
    pub k: f64,
    pub z_max: f64,
    pub points: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig { alpha: 5.0, n_max: 60, k: 1.0, z_max: 1.5, points: 1501 }
    }
}

/// Largest product `h * |coupling|` allowed in a Fock-space RK4 step.
pub const FOCK_STEP: f64 = 0.01;
/// Largest coherent-state mass allowed beyond the cutoff.
pub const FOCK_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FockTrajectory {
    pub z: Vec<f64>,
    pub n_p: Vec<f64>,
    pub n_s: Vec<f64>,
    pub n_i: Vec<f64>,
    pub var_p: Vec<f64>,
    pub var_s: Vec<f64>,
    /// Largest |norm - initial norm| of any block over the run.
    pub norm_drift: f64,
    /// Coherent-state mass beyond the cutoff.
    pub tail: f64,
}

/// Exact evolution under `K (a_p a_s^+ a_i^+ - h.c.)` from a coherent pump
/// and signal/idler vacuum. Pump Fock component n spans the block
/// `|n - j, j, j>`, j = 0..=n, which the generator leaves invariant.
pub fn fock_trilinear(cfg: &FockConfig) -> Result<FockTrajectory> {
    let a2 = cfg.alpha * cfg.alpha;
    if !(cfg.alpha >= 0.0) || a2 + 5.0 * cfg.alpha > cfg.n_max as f64 || cfg.n_max > 60 {
        return Err(Error::domain("need alpha^2 + 5 alpha <= n_max <= 60"));
    }
    if !(cfg.k > 0.0 && cfg.z_max > 0.0) || cfg.points < 2 {
        return Err(Error::domain("need K > 0, z_max > 0 and at least two samples"));
    }
    // Poisson weights by recurrence.
    let mut weights = Vec::with_capacity(cfg.n_max + 1);
    let mut p = (-a2).exp();
    for n in 0..=cfg.n_max {
        if n > 0 {
            p *= a2 / n as f64;
        }
        weights.push(p);
    }
    let tail = (1.0 - weights.iter().sum::<f64>()).max(0.0);
    if tail > FOCK_TAIL {
        return Err(Error::Cutoff(format!("coherent mass {tail:e} beyond n_max = {}", cfg.n_max)));
    }
    let z: Vec<f64> = (0..cfg.points).map(|i| cfg.z_max * i as f64 / (cfg.points - 1) as f64).collect();
    let np = z.len();
    let (mut m_s, mut m_p, mut m_s2, mut m_p2) = (vec![0.0; np], vec![0.0; np], vec![0.0; np], vec![0.0; np]);
    let mut drift = 0f64;
    for (n, &w) in weights.iter().enumerate() {
        let d = n + 1;
        // dc_{j+1} += g_j c_j, dc_j -= g_j c_{j+1}, g_j = K sqrt(n - j) (j + 1)
        let g: Vec<f64> = (0..n).map(|j| cfg.k * ((n - j) as f64).sqrt() * (j + 1) as f64).collect();
        let gmax = g.iter().copied().fold(0.0, f64::max);
        let deriv = |c: &[f64], out: &mut [f64]| {
            out.iter_mut().for_each(|x| *x = 0.0);
            for j in 0..n {
                out[j + 1] += g[j] * c[j];
                out[j] -= g[j] * c[j + 1];
            }
        };
        let mut c = vec![0.0; d];
        c[0] = 1.0;
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        for (i, &zi) in z.iter().enumerate() {
            if i > 0 && gmax > 0.0 {
                let dz = zi - z[i - 1];
                let steps = (dz * gmax / FOCK_STEP).ceil().max(1.0) as usize;
                let h = dz / steps as f64;
                for _ in 0..steps {
                    deriv(&c, &mut k1);
                    for j in 0..d {
                        tmp[j] = c[j] + 0.5 * h * k1[j];
                    }
                    deriv(&tmp, &mut k2);
                    for j in 0..d {
                        tmp[j] = c[j] + 0.5 * h * k2[j];
                    }
                    deriv(&tmp, &mut k3);
                    for j in 0..d {
                        tmp[j] = c[j] + h * k3[j];
                    }
                    deriv(&tmp, &mut k4);
                    for j in 0..d {
                        c[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                    }
                }
            }
            let norm: f64 = c.iter().map(|x| x * x).sum();
            drift = drift.max((norm - 1.0).abs());
            for (j, cj) in c.iter().enumerate() {
                let pj = w * cj * cj;
                let (s, pp) = (j as f64, (n - j) as f64);
                m_s[i] += pj * s;
                m_s2[i] += pj * s * s;
                m_p[i] += pj * pp;
                m_p2[i] += pj * pp * pp;
            }
        }
    }
    let var = |m2: &[f64], m: &[f64]| m2.iter().zip(m).map(|(a, b)| a - b * b).collect::<Vec<f64>>();
    Ok(FockTrajectory {
        var_p: var(&m_p2, &m_p),
        var_s: var(&m_s2, &m_s),
        n_i: m_s.clone(),
        n_s: m_s,
        n_p: m_p,
        z,
        norm_drift: drift,
        tail,
    })
}

/// How far the generalized parametric approximation follows the exact
/// signal photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub first_max_z: f64,
    pub first_max: f64,
    /// First z where the exact value reaches half of its first maximum.
    pub half_z: f64,
    /// Largest relative deviation on (0, half_z].
    pub max_rel_error: f64,
}

pub fn approximation_validity(cfg: &FockConfig, exact: &FockTrajectory) -> Result<ValidityReport> {
    let n = &exact.n_s;
    let imax = (1..n.len() - 1)
        .find(|&i| n[i] >= n[i - 1] && n[i] > n[i + 1])
        .ok_or_else(|| Error::domain("no maximum of the exact photon number inside the z range"))?;
    let half = 0.5 * n[imax];
    let ih = n.iter().position(|&v| v >= half).unwrap_or(imax);
    let mut worst = 0f64;
    for i in 1..=ih {
        let approx = exit_weights(cfg.alpha, cfg.k, exact.z[i]).0;
        worst = worst.max((approx - n[i]).abs() / n[i]);
    }
    Ok(ValidityReport { first_max_z: exact.z[imax], first_max: n[imax], half_z: exact.z[ih], max_rel_error: worst })
}
