//! Numerical laboratory for mean-zero random Fourier fields on the circle:
//! Gaussian and interpolated-Gibbs measures, spatial and space-time norms,
//! truncated KdV/mKdV flows, and Monte Carlo experiments that check measure
//! invariance, weak convergence to white noise, and Gaussian tail bounds.
//!
//! Conventions used throughout the crate:
//!
//! * The circle carries the normalized measure, i.e. `∫ u^p` always means
//!   the average `(1/2π) ∫_0^{2π} u^p dx`. Under this convention
//!   `‖f‖_{L²}² = Σ_{n≠0} |f̂(n)|²` and the white-noise characteristic
//!   functional is exactly `exp(-‖f‖²/2)` for unit-variance complex
//!   Gaussian coefficients.
//! * Fields are real and mean-zero; only the coefficients for `n ≥ 1` are
//!   stored and `û(-n) = conj(û(n))` is implied.
//! * The Japanese bracket is `⟨n⟩ = 1 + |n|`.
//! * A standard complex Gaussian is `g = (x + iy)/√2` with `x, y` unit
//!   normals, so `E|g|² = 1`.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod measures;
pub mod norms;
pub mod rng;
pub mod spectral;

pub use error::Error;
pub use field::{FourierField, TestFunction};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// `⟨n⟩ = 1 + |n|`.
#[inline]
pub fn bracket(n: i64) -> f64 {
    1.0 + (n.abs() as f64)
}
