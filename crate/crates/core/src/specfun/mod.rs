//! Special functions on the positive real axis.
//!
//! Everything here is a pure function of its arguments. The checked entry points
//! (`ln_gamma`, `digamma`, `bessel_j0`, ...) return [`crate::Error::Domain`] outside
//! their domain; the unchecked kernels [`gamma`], [`j0`], [`j1`] are meant for hot
//! loops whose callers already guarantee a valid argument.

mod bessel;
mod gamma_fn;
mod zeta_fn;

pub use bessel::{
    bessel_j0, bessel_j0_zero, bessel_j1, bessel_j1_max, bessel_j1_zero, j0, j1, j1_ratio,
    J1_ABS_MAX, SQRT_X_J1_SUP,
};
pub use gamma_fn::{digamma, gamma, gamma_upper, ln_gamma, trigamma};
pub use zeta_fn::zeta;

pub(crate) use bessel::zero_approx;

/// Euler–Mascheroni constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;
