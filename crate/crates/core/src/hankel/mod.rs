//! Deterministic engine: the kernel `γ_p` and the product integral
//! `A_{n,p}(a) = Γ(1+2/p) · ½ ∫_0^∞ ∏_j γ_p(a_j s) s ds`.

mod envelope;
mod kernel;
mod volume;

use std::fmt;

use serde::Serialize;

pub use envelope::{
    kernel_envelope, tail_bound_outer, DecayEnvelope, PowerLaw, MAX_LAPLACIAN_POWER,
};
pub use kernel::{gamma_kernel, hankel_route, radial_route, KernelValue, RADIAL_ROUTE_ABOVE};
pub use volume::{section_volume_quadrature, QuadSpec, SMaxPolicy};

/// Which route produced a [`VolumeResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EngineKind {
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
    #[serde(rename = "closed_form")]
    ClosedForm,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Quadrature => "quadrature",
            EngineKind::MonteCarlo => "montecarlo",
            EngineKind::ClosedForm => "closed_form",
        })
    }
}

/// Engine-specific diagnostics; absent fields do not apply to the engine used.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VolumeMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A section volume with its error bound.
///
/// For quadrature the bound is the certified truncation plus estimated quadrature
/// error; for Monte Carlo it is three standard errors (the standard error itself is in
/// `meta.std_err`); closed forms carry 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeResult {
    pub value: f64,
    pub err_bound: f64,
    pub engine: EngineKind,
    pub meta: VolumeMeta,
}

impl VolumeResult {
    pub fn closed_form(value: f64, note: &str) -> Self {
        VolumeResult {
            value,
            err_bound: 0.0,
            engine: EngineKind::ClosedForm,
            meta: VolumeMeta {
                note: Some(note.to_string()),
                ..VolumeMeta::default()
            },
        }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.err_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.err_bound
    }
}
