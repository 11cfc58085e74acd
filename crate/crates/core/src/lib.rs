//! Normalized volumes of complex hyperplane sections of the complex `l_p` unit ball.
//!
//! For `a` a unit vector in `C^n` the normalized section volume is
//!
//! ```text
//! A_{n,p}(a) = vol_{2(n-1)}(a^perp ∩ B_p^n(C)) / vol_{2(n-1)}(B_p^{n-1}(C))
//! ```
//!
//! and depends only on the moduli `|a_j|`. Three independent routes are provided:
//!
//! * [`hankel`]: a deterministic product integral of the Hankel-type kernel `γ_p`
//!   with certified truncation and estimated quadrature error,
//! * [`montecarlo`]: a Rao–Blackwellized estimator of the probabilistic representation
//!   `Γ(1+2/p) E|Σ a_j R_j ξ_j|^{-2}`,
//! * [`analysis`]: closed forms (two nonzero coordinates, the diagonal limit) and the
//!   inequality suite around them.
//!
//! [`optimize`] searches for maximal-section directions on top of either engine.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference constants keep their published digits.
#![allow(clippy::excessive_precision)]

pub mod analysis;
pub mod direction;
mod error;
pub mod hankel;
pub mod montecarlo;
pub mod optimize;
mod pexp;
pub mod quad;
pub mod randkit;
pub mod specfun;

pub use direction::Direction;
pub use error::{Error, Result};
pub use hankel::{EngineKind, QuadSpec, VolumeMeta, VolumeResult};
pub use montecarlo::{McSpec, Strategy};
pub use pexp::PExponent;
