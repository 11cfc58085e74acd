use std::cell::RefCell;
use std::f64::consts::PI;

use super::envelope::{tail_bound_with, DecayEnvelope};
use super::kernel::gamma_kernel;
use super::{EngineKind, VolumeMeta, VolumeResult};
use crate::quad::Adaptive;
use crate::{Direction, Error, PExponent, Result};

/// Outer truncation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SMaxPolicy {
    /// Smallest `s_max` (to a few percent) whose certified tail fits a quarter of the
    /// error budget.
    Automatic,
    Fixed(f64),
}

/// Quadrature configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Requested absolute error on `A`.
    pub tol_abs: f64,
    /// Absolute error per kernel evaluation.
    pub inner_tol: f64,
    /// Gauss–Legendre nodes per outer panel (the error estimate uses twice as many).
    pub panel_order: usize,
    pub s_max: SMaxPolicy,
    /// Outer panel budget.
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec::new(1e-8)
    }
}

impl QuadSpec {
    pub fn new(tol_abs: f64) -> Self {
        QuadSpec {
            tol_abs,
            inner_tol: (tol_abs * 1e-3).max(1e-15).min(tol_abs / 10.0),
            panel_order: 12,
            s_max: SMaxPolicy::Automatic,
            max_panels: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_abs > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "tol_abs = {} must be positive",
                self.tol_abs
            )));
        }
        if !(self.inner_tol > 0.0 && self.inner_tol <= self.tol_abs / 10.0) {
            return Err(Error::InvalidSpec(format!(
                "inner_tol = {} must lie in (0, tol_abs/10]",
                self.inner_tol
            )));
        }
        if self.panel_order < 8 {
            return Err(Error::InvalidSpec(format!(
                "panel_order = {} must be at least 8",
                self.panel_order
            )));
        }
        if let SMaxPolicy::Fixed(s) = self.s_max {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidSpec(format!("s_max = {s} must be positive")));
            }
        }
        Ok(())
    }
}

const S_MAX_CAP: f64 = 1e7;

fn automatic_s_max(env: &DecayEnvelope, groups: &[(f64, usize)], target: f64) -> Result<f64> {
    let tail = |s: f64| tail_bound_with(env, groups, s);
    let mut hi = 1.0;
    while tail(hi)? > target {
        hi *= 2.0;
        if hi > S_MAX_CAP {
            return Err(Error::NonConvergence(format!(
                "outer tail bound stays above {target:e} up to s = {S_MAX_CAP:e}"
            )));
        }
    }
    let mut lo = 0.5 * hi;
    if tail(lo)? <= target {
        return Ok(lo);
    }
    while hi / lo > 1.02 {
        let mid = (lo * hi).sqrt();
        if tail(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `A_{n,p}(a)` by the product integral.
///
/// Directions with at most one nonzero entry, and two nonzero entries at `p = ∞`
/// (where the integrand decays only like `s^{-2}`), are answered in closed form.
/// The error budget splits as: certified tail `<= tol/4`, estimated outer quadrature
/// error `<= tol/4`, and kernel errors propagated through the product.
pub fn section_volume_quadrature(
    p: PExponent,
    a: &Direction,
    spec: &QuadSpec,
) -> Result<VolumeResult> {
    spec.validate()?;
    let groups = a.groups();
    let nonzero = a.nonzero_count();
    if nonzero <= 1 {
        return Ok(VolumeResult::closed_form(
            1.0,
            "at most one nonzero coordinate",
        ));
    }
    if nonzero == 2 && p.is_infinite() {
        let b = a.nonzero()[0];
        return Ok(VolumeResult::closed_form(
            1.0 / (b * b),
            "two nonzero coordinates at p = inf",
        ));
    }

    let g2 = p.gamma_factor();
    // Budget on the raw integral ∫ s ∏γ ds.
    let tol_i = spec.tol_abs * 2.0 / g2;
    let env = DecayEnvelope::new(p)?;
    let s_max = match spec.s_max {
        SMaxPolicy::Fixed(s) => s,
        SMaxPolicy::Automatic => automatic_s_max(&env, &groups, 0.25 * tol_i)?,
    };
    let tail = tail_bound_with(&env, &groups, s_max)?;

    let a_max = groups[0].0;
    let width = PI / a_max;
    let steps = (s_max / width).ceil().max(1.0) as usize;
    let mut pts: Vec<f64> = (0..steps).map(|i| i as f64 * width).collect();
    pts.push(s_max);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut integrand = |s: f64| -> (f64, f64) {
        let mut prod = 1.0;
        let mut bound = 1.0;
        let mut spread = 0.0;
        for &(aj, m) in &groups {
            let k = match gamma_kernel(p, aj * s, spec.inner_tol) {
                Ok(k) => k,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return (0.0, 0.0);
                }
            };
            let mi = m as i32;
            prod *= k.value.powi(mi);
            let b = k.value.abs() + k.err_bound;
            bound *= b.powi(mi);
            if b > 0.0 {
                spread += m as f64 * k.err_bound / b;
            }
        }
        (s * prod, s * spread * bound)
    };
    let ad = Adaptive::new(spec.panel_order).with_max_panels(spec.max_panels);
    let (q, propagated) = ad.integrate_pieces_aux(&pts, 0.25 * tol_i, &mut integrand);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let half = 0.5 * g2;
    let value = half * q.value;
    let err_bound = half * (tail + q.error + propagated);
    if !q.converged || !(err_bound <= spec.tol_abs) {
        return Err(Error::NonConvergence(format!(
            "quadrature reached error {err_bound:e} (tail {tail:e}, panels {}) against tol {:e}",
            q.panels, spec.tol_abs
        )));
    }
    Ok(VolumeResult {
        value,
        err_bound,
        engine: EngineKind::Quadrature,
        meta: VolumeMeta {
            panels: Some(q.panels),
            s_max: Some(s_max),
            tail_bound: Some(half * tail),
            ..VolumeMeta::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn gaussian_case_is_one() {
        // γ_2 is Gaussian, so A_{n,2}(a) = 1 for every a.
        let spec = QuadSpec::new(1e-9);
        for a in [
            vec![1.0, 1.0, 1.0],
            vec![0.8, 0.4, 0.3, 0.1],
            vec![3.0, 1.0],
        ] {
            let d = Direction::new(&a).unwrap();
            let r = section_volume_quadrature(fin(2.0), &d, &spec).unwrap();
            assert!(
                (r.value - 1.0).abs() <= r.err_bound + 1e-12,
                "{a:?}: {}",
                r.value
            );
            assert!(r.err_bound <= 1e-9);
        }
    }

    #[test]
    fn ball_direction_closed_form() {
        let spec = QuadSpec::new(1e-8);
        let d = Direction::diagonal(2, 3).unwrap();
        for p in [3.0, 4.0] {
            let r = section_volume_quadrature(fin(p), &d, &spec).unwrap();
            let want = 2f64.powf(1.0 - 2.0 / p);
            assert!(
                (r.value - want).abs() <= 2.0 * spec.tol_abs,
                "p={p}: {}",
                r.value
            );
        }
        let r = section_volume_quadrature(PExponent::Infinity, &d, &spec).unwrap();
        assert_eq!(r.engine, EngineKind::ClosedForm);
        assert!((r.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        let mut s = QuadSpec::new(1e-6);
        s.panel_order = 4;
        assert!(s.validate().is_err());
        let mut s = QuadSpec::new(1e-6);
        s.inner_tol = 1e-6;
        assert!(s.validate().is_err());
    }
}
