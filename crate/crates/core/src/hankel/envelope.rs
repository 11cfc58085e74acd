//! Pointwise decay bounds for `|γ_p|` and the outer tail bound built from them.
//!
//! [`DecayEnvelope`] is a lower envelope `min_i C_i x^{-e_i}` of power laws, each a
//! proven bound on `|γ_p(x)|`:
//!
//! * `1` (`|J_0| <= 1`),
//! * `2 M g(p) / x` with `M` bounding `|J_1|` and `g(p) = Γ(1+1/p)/Γ(1+2/p) = E R^{-1}`,
//! * `2 K E R^{-3/2} x^{-3/2}` with `K` bounding `√x |J_1(x)|`,
//! * `C_k x^{-2k-θ_k}` from `H[f](s) = (-1)^k s^{-2k} H[Δ^k f](s)` and
//!   `|J_0(x)| <= (2/(πx))^θ` for `θ ∈ [0, 1/2]`, valid while `Δ^{k-1} e^{-r^p}`
//!   vanishes at the origin and `r^{1-θ} Δ^k e^{-r^p}` is integrable there. Every `k`
//!   qualifies for even integer `p`, with `θ_k = 1/2`.
//!
//! Products of such envelopes integrate in closed form piece by piece, which makes
//! [`tail_bound_outer`] a rigorous bound rather than an estimate.

use std::f64::consts::PI;

use crate::quad::Adaptive;
use crate::specfun::{gamma, gamma_upper, J1_ABS_MAX, SQRT_X_J1_SUP};
use crate::{Direction, Error, PExponent, Result};

/// Highest Laplacian power used by [`DecayEnvelope`].
pub const MAX_LAPLACIAN_POWER: usize = 8;

/// `min(1, 2 M g(p) / s)`: the `1/s` envelope of `|γ_p(s)|` (`g(∞) = 1`).
pub fn kernel_envelope(p: PExponent, s: f64) -> f64 {
    (2.0 * J1_ABS_MAX * lemma_g(p) / s).min(1.0)
}

fn lemma_g(p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => 1.0,
        PExponent::Finite(q) => gamma(1.0 + 1.0 / q) / gamma(1.0 + 2.0 / q),
    }
}

/// A power law `x ↦ exp(ln_c) x^{-e}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub ln_c: f64,
    pub e: f64,
}

impl PowerLaw {
    fn at(&self, x: f64) -> f64 {
        (self.ln_c - self.e * x.ln()).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayEnvelope {
    terms: Vec<PowerLaw>,
}

impl DecayEnvelope {
    pub fn new(p: PExponent) -> Result<Self> {
        let mut terms = vec![
            PowerLaw { ln_c: 0.0, e: 0.0 },
            PowerLaw {
                ln_c: (2.0 * J1_ABS_MAX * lemma_g(p)).ln(),
                e: 1.0,
            },
        ];
        let inv_r32 = match p {
            PExponent::Infinity => 1.0,
            PExponent::Finite(q) => gamma(1.0 + 0.5 / q) / gamma(1.0 + 2.0 / q),
        };
        terms.push(PowerLaw {
            ln_c: (2.0 * SQRT_X_J1_SUP * inv_r32).ln(),
            e: 1.5,
        });
        if let PExponent::Finite(q) = p {
            for k in 1..=laplacian_power_limit(q) {
                let theta = bessel_decay_power(q, k);
                let pref = 2.0 / p.gamma_factor() * (2.0 / PI).powf(theta) / q;
                let m = laplacian_moment(q, k, theta)?;
                if m > 0.0 && m.is_finite() {
                    terms.push(PowerLaw {
                        ln_c: (pref * m).ln(),
                        e: 2.0 * k as f64 + theta,
                    });
                }
            }
        }
        Ok(DecayEnvelope { terms })
    }

    pub fn terms(&self) -> &[PowerLaw] {
        &self.terms
    }

    /// The bound at `x > 0`.
    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.at(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Fastest available decay exponent.
    pub fn max_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.e).fold(0.0, f64::max)
    }
}

fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as u64).is_multiple_of(2)
}

fn laplacian_power_limit(p: f64) -> usize {
    if is_even_integer(p) {
        return MAX_LAPLACIAN_POWER;
    }
    (1..=MAX_LAPLACIAN_POWER)
        .take_while(|&k| 2.0 * (k as f64 - 1.0) < p)
        .last()
        .unwrap_or(0)
}

// θ_k < p - 2k + 2 keeps r^{p-2k+1-θ} integrable at the origin.
fn bessel_decay_power(p: f64, k: usize) -> f64 {
    if is_even_integer(p) {
        0.5
    } else {
        (0.75 * (p - 2.0 * k as f64 + 2.0)).min(0.5)
    }
}

/// Coefficients `c_i` with `Δ^k e^{-r^p} = e^{-w} Σ_i c_i w^{i - 2k/p}`, `w = r^p`.
pub(crate) fn laplacian_coefficients(p: f64, k: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    let mut beta = 0.0;
    // θ = r d/dr = p w d/dw; Δ = r^{-2} θ².
    let theta = |c: &[f64], beta: f64| {
        let mut out = vec![0.0; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            out[i] += p * (beta + i as f64) * ci;
            out[i + 1] -= p * ci;
        }
        out
    };
    for _ in 0..k {
        c = theta(&c, beta);
        c = theta(&c, beta);
        beta -= 2.0 / p;
    }
    if is_even_integer(p) {
        // Δ^k e^{-r^p} is smooth: negative powers of r cancel exactly.
        for (i, ci) in c.iter_mut().enumerate() {
            if p * (i as f64) < 2.0 * k as f64 {
                *ci = 0.0;
            }
        }
    }
    c
}

// ∫_0^∞ |P_k(w)| w^{(2 - θ - 2k)/p - 1} e^{-w} dw, slightly inflated; requires the
// exponent after removing the lowest power of `w` to exceed -1.
fn laplacian_moment(p: f64, k: usize, theta: f64) -> Result<f64> {
    let full = laplacian_coefficients(p, k);
    // Factor out the lowest power present: P(w) = w^{i0} Σ c_i w^i.
    let i0 = full.iter().position(|&x| x != 0.0).unwrap_or(0);
    let c = full[i0..].to_vec();
    let g = (2.0 - theta - 2.0 * k as f64) / p - 1.0 + i0 as f64;
    let poly = |w: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * w + ci);
    let ad = Adaptive::new(12);
    let scale: f64 = c.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    let tol = 1e-10 * scale;

    // [0, 1] with t = w^{g+1}.
    let a = g + 1.0;
    let head = ad.integrate(0.0, 1.0, tol, &mut |t: f64| {
        let w = t.powf(1.0 / a);
        poly(w).abs() * (-w).exp() / a
    });
    const W_END: f64 = 200.0;
    let pts: Vec<f64> = (0..=((W_END - 1.0) / 4.0) as usize)
        .map(|i| 1.0 + 4.0 * i as f64)
        .chain([W_END])
        .collect();
    let body = ad.integrate_pieces(&pts, tol, &mut |w: f64| {
        poly(w).abs() * (g * w.ln() - w).exp()
    });
    let mut tail = 0.0;
    for (i, ci) in c.iter().enumerate() {
        if *ci != 0.0 {
            tail += ci.abs() * gamma_upper(i as f64 + g + 1.0, W_END)?;
        }
    }
    if !head.converged || !body.converged {
        return Err(Error::NonConvergence(format!(
            "Laplacian moment k = {k} at p = {p}"
        )));
    }
    Ok((head.value + body.value) * (1.0 + 1e-8) + head.error + body.error + tail)
}

/// Rigorous upper bound on `∫_{s_max}^∞ s ∏_j |γ_p(a_j s)| ds`.
///
/// Returns a dimension error when the envelope product does not decay fast enough
/// for the integral to converge.
pub fn tail_bound_outer(p: PExponent, a: &Direction, s_max: f64) -> Result<f64> {
    let env = DecayEnvelope::new(p)?;
    tail_bound_with(&env, &a.groups(), s_max)
}

pub(crate) fn tail_bound_with(
    env: &DecayEnvelope,
    groups: &[(f64, usize)],
    s_max: f64,
) -> Result<f64> {
    if !(s_max > 0.0) {
        return Err(Error::domain("tail_bound_outer", s_max, "s_max > 0"));
    }
    let decay: f64 = groups.iter().map(|&(_, m)| m as f64).sum::<f64>() * env.max_exponent();
    if decay <= 2.0 {
        return Err(Error::Dimension(format!(
            "envelope product decays like s^-{decay}; the outer tail diverges"
        )));
    }
    // Per group: power laws in s, C a^{-e} s^{-e}.
    let laws: Vec<Vec<PowerLaw>> = groups
        .iter()
        .map(|&(a, _)| {
            env.terms
                .iter()
                .map(|t| PowerLaw {
                    ln_c: t.ln_c - t.e * a.ln(),
                    e: t.e,
                })
                .collect()
        })
        .collect();
    let mut cuts = vec![s_max];
    for ls in &laws {
        for (i, u) in ls.iter().enumerate() {
            for v in &ls[i + 1..] {
                if u.e != v.e {
                    let x = ((u.ln_c - v.ln_c) / (u.e - v.e)).exp();
                    if x > s_max && x.is_finite() {
                        cuts.push(x);
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let piece = |probe: f64| {
        let mut ln_c = 0.0;
        let mut e = 0.0;
        for (ls, &(_, m)) in laws.iter().zip(groups) {
            let best = ls
                .iter()
                .min_by(|x, y| x.at(probe).total_cmp(&y.at(probe)))
                .expect("nonempty envelope");
            ln_c += m as f64 * best.ln_c;
            e += m as f64 * best.e;
        }
        (ln_c, e)
    };
    let mut total = 0.0;
    for (i, &t1) in cuts.iter().enumerate() {
        let t2 = cuts.get(i + 1).copied();
        let probe = match t2 {
            Some(t2) => (t1 * t2).sqrt(),
            None => 2.0 * t1,
        };
        let (ln_c, e) = piece(probe);
        total += power_integral(ln_c, e, t1, t2);
    }
    if total.is_nan() || total.is_infinite() {
        return Err(Error::Dimension(
            "envelope product tail integral diverges".into(),
        ));
    }
    Ok(total)
}

// ∫_{t1}^{t2} C s^{1-E} ds, t2 = None meaning ∞.
fn power_integral(ln_c: f64, e: f64, t1: f64, t2: Option<f64>) -> f64 {
    let k = 2.0 - e;
    match t2 {
        None if k >= 0.0 => f64::INFINITY,
        None => (ln_c + k * t1.ln()).exp() / -k,
        Some(t2) if k == 0.0 => ln_c.exp() * (t2 / t1).ln(),
        Some(t2) if k < 0.0 => (ln_c + k * t1.ln()).exp() / -k * -(k * (t2 / t1).ln()).exp_m1(),
        Some(t2) => (ln_c + k * t2.ln()).exp() / k * -(k * (t1 / t2).ln()).exp_m1(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::kernel::gamma_kernel;

    fn fin(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn one_over_s_envelope_values() {
        for p in [fin(2.0), fin(9.0), PExponent::Infinity] {
            assert_eq!(kernel_envelope(p, 0.5), 1.0);
            assert_eq!(kernel_envelope(p, 1.0), 1.0);
        }
        assert!(kernel_envelope(fin(9.0), 2.0) <= 1.2077 / 2.0);
        let g4 = gamma(1.25) / gamma(1.5);
        assert!((kernel_envelope(fin(4.0), 10.0) - 1.1638 * g4 / 10.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_gaussian() {
        // Δ e^{-r²} = (4r² - 4) e^{-r²}; Δ² e^{-r²} = (16r⁴ - 64r² + 32) e^{-r²}.
        assert_eq!(laplacian_coefficients(2.0, 1), vec![0.0, -4.0, 4.0]);
        let c = laplacian_coefficients(2.0, 2);
        let want = [0.0, 0.0, 32.0, -64.0, 16.0];
        assert_eq!(c.len(), want.len());
        for (x, y) in c.iter().zip(want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_coefficients_match_finite_differences() {
        // Radial Laplacian g'' + g'/r by central differences.
        for (p, k) in [(3.0, 1), (5.5, 2), (9.0, 3)] {
            let c0 = laplacian_coefficients(p, k - 1);
            let c1 = laplacian_coefficients(p, k);
            let eval = |c: &[f64], j: usize, r: f64| {
                let w = r.powf(p);
                let beta = -2.0 * j as f64 / p;
                (-w).exp()
                    * c.iter()
                        .enumerate()
                        .map(|(i, ci)| ci * w.powf(beta + i as f64))
                        .sum::<f64>()
            };
            for r in [0.6, 0.9, 1.0, 1.1, 1.4] {
                let h = 1e-4;
                let g = |x: f64| eval(&c0, k - 1, x);
                let lap = (g(r + h) - 2.0 * g(r) + g(r - h)) / (h * h)
                    + (g(r + h) - g(r - h)) / (2.0 * h * r);
                let direct = eval(&c1, k, r);
                assert!(
                    (lap - direct).abs() < 1e-4 * (1.0 + direct.abs()),
                    "p={p} k={k} r={r}"
                );
            }
        }
    }

    #[test]
    fn envelope_dominates_kernel() {
        let ps = [1.0, 2.0, 2.1, 2.5, 3.0, 4.0, 9.0, 26.0, 140.0];
        for p in ps.iter().map(|&p| fin(p)).chain([PExponent::Infinity]) {
            let env = DecayEnvelope::new(p).unwrap();
            for i in 1..=400 {
                let s = 0.25 * i as f64;
                let k = gamma_kernel(p, s, 1e-12).unwrap();
                let v = k.value.abs() - k.err_bound;
                assert!(kernel_envelope(p, s) >= v, "1/s envelope p={p} s={s}");
                assert!(
                    env.eval(s) >= v,
                    "decay envelope p={p} s={s}: {} < {v}",
                    env.eval(s)
                );
            }
        }
    }

    #[test]
    fn fractional_powers_gain_an_extra_laplacian() {
        let env = DecayEnvelope::new(fin(2.5)).unwrap();
        assert!((env.max_exponent() - 4.375).abs() < 1e-12);
        let env = DecayEnvelope::new(fin(3.0)).unwrap();
        assert!((env.max_exponent() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_reproduces_three_coordinate_budget() {
        for n in 3..=30 {
            let a = Direction::diagonal(n, n).unwrap();
            let nf = n as f64;
            let t = tail_bound_outer(fin(9.0), &a, (2.0 * nf).sqrt()).unwrap();
            let budget = 2.0 * nf / (nf - 2.0) * (1.2077f64 / 2f64.sqrt()).powi(n as i32);
            assert!(t <= budget, "n = {n}: {t} > {budget}");
        }
    }

    #[test]
    fn tail_bound_decreases() {
        let a = Direction::new(&[0.8, 0.4, 0.2f64.sqrt()]).unwrap();
        for p in [fin(3.0), fin(4.0), fin(140.0), PExponent::Infinity] {
            let mut prev = f64::INFINITY;
            for s in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
                let t = tail_bound_outer(p, &a, s).unwrap();
                assert!(t < prev, "p={p} s={s}");
                prev = t;
            }
        }
    }

    #[test]
    fn tail_bound_matches_envelope_quadrature() {
        let a = Direction::new(&[0.8, 0.4, 0.2f64.sqrt()]).unwrap();
        let p = fin(4.0);
        let env = DecayEnvelope::new(p).unwrap();
        let t = tail_bound_outer(p, &a, 10.0).unwrap();
        let f = |s: f64| {
            s * a
                .nonzero()
                .iter()
                .map(|&x| env.eval(x * s))
                .product::<f64>()
        };
        // Log-spaced pieces on [10, 1e4] plus the exact power tail beyond.
        let pts: Vec<f64> = (0..=300)
            .map(|i| 10.0 * 1000f64.powf(i as f64 / 300.0))
            .collect();
        let ad = Adaptive::new(20);
        let body = ad.integrate_pieces(&pts, 1e-16, &mut |s| f(s));
        let far = tail_bound_outer(p, &a, 1e4).unwrap();
        let oracle = body.value + far;
        assert!(
            (t - oracle).abs() < 1e-9 * oracle.max(1e-30),
            "{t} vs {oracle}"
        );
    }

    #[test]
    fn single_coordinate_at_infinity_diverges() {
        let a = Direction::diagonal(1, 3).unwrap();
        assert!(tail_bound_outer(PExponent::Infinity, &a, 10.0).is_err());
        assert!(tail_bound_outer(fin(140.0), &a, 10.0).unwrap().is_finite());
        // Two coordinates at p = ∞ decay like s^{-2}: finite but slow.
        let b = Direction::diagonal(2, 3).unwrap();
        let t = tail_bound_outer(PExponent::Infinity, &b, 1e3).unwrap();
        assert!(t > 1e-4 && t.is_finite());
    }
}
