//! Twin beams from parametric down-conversion in the pump-depletion regime.
//!
//! The two-photon amplitude is split into spectral, radial and azimuthal
//! kernels. Their Schmidt decompositions give mode triplets, each of which
//! evolves on its own under a depleting classical pump. Observables are sums
//! over triplets of the exit Bogoliubov coefficients `U`, `V`.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod kernels;
pub mod observables;
pub mod oracles;
pub mod pump;
pub mod scenario;
pub mod schmidt;
pub mod sweep;
pub mod width;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
