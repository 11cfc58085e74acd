//! The kernel `γ_p(s) = (2/Γ(1+2/p)) ∫_0^∞ J_0(sr) e^{-r^p} r dr`.
//!
//! Two independent routes:
//!
//! * the Hankel route integrates `J_0(sr) e^{-r^p} r` between zeros of `J_0(s·)` up to a
//!   cutoff whose tail is certified by the incomplete gamma function;
//! * the radial route integrates `j_1(sr)` against the density of the radial law,
//!   `γ_p(s) = E j_1(sR)` (one integration by parts), which stays well conditioned
//!   when the density concentrates near `r = 1` for large `p`.
//!
//! [`gamma_kernel`] uses the Hankel route for `p <= 16` and the radial route above.

use crate::quad::Adaptive;
use crate::specfun::{gamma_upper, j0, j1_ratio, zero_approx};
use crate::{Error, PExponent, Result};

/// `p` at or below which [`gamma_kernel`] uses the Hankel route.
pub const RADIAL_ROUTE_ABOVE: f64 = 16.0;

const KERNEL_ORDER: usize = 10;

/// A kernel value with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub err_bound: f64,
}

/// `γ_p(s)` to absolute accuracy `inner_tol`.
pub fn gamma_kernel(p: PExponent, s: f64, inner_tol: f64) -> Result<KernelValue> {
    check(s, inner_tol)?;
    match p {
        PExponent::Infinity => Ok(exact(j1_ratio(s))),
        PExponent::Finite(_) if s == 0.0 => Ok(exact(1.0)),
        PExponent::Finite(q) if q <= RADIAL_ROUTE_ABOVE => hankel_route(q, s, inner_tol),
        PExponent::Finite(q) => radial_route(q, s, inner_tol),
    }
}

fn exact(value: f64) -> KernelValue {
    KernelValue {
        value,
        err_bound: 0.0,
    }
}

fn check(s: f64, inner_tol: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("gamma_kernel", s, "s >= 0"));
    }
    if !(inner_tol > 0.0) {
        return Err(Error::domain("gamma_kernel", inner_tol, "inner_tol > 0"));
    }
    Ok(())
}

// Smallest x (searched geometrically) with tail(x) <= target, starting from `x0`.
fn cutoff(x0: f64, target: f64, tail: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x = x0.max(1e-3);
    let mut t = tail(x);
    while t > target {
        x *= 1.1;
        t = tail(x);
    }
    (x, t)
}

fn level_points(p: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    const W_LEVELS: [f64; 20] = [
        0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.3, 1.7, 2.2, 3.0, 4.0, 6.0, 9.0, 14.0, 20.0,
        30.0, 45.0, 70.0,
    ];
    out.extend(
        W_LEVELS
            .iter()
            .map(|w| w.powf(1.0 / p))
            .filter(|&r| r > lo && r < hi),
    );
}

fn zero_points(nu_one: bool, s: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    // Zeros z_k/s with lo < z_k/s < hi; the k-th zero exceeds (k - 1/4)π.
    let first = ((lo * s / std::f64::consts::PI) - 1.0).floor().max(1.0) as usize;
    let mut k = first;
    loop {
        let r = zero_approx(nu_one, k) / s;
        if r >= hi {
            break;
        }
        if r > lo {
            out.push(r);
        }
        k += 1;
    }
}

fn finish(mut points: Vec<f64>) -> Vec<f64> {
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Hankel route: panels between zeros of `r -> J_0(sr)` on `[0, r_max]`, plus the
/// certified tail `(2/Γ(1+2/p)) (1/p) Γ(2/p, r_max^p)`.
pub fn hankel_route(p: f64, s: f64, inner_tol: f64) -> Result<KernelValue> {
    let pe = PExponent::new(p)?;
    check(s, inner_tol)?;
    if pe.is_infinite() {
        return Ok(exact(j1_ratio(s)));
    }
    let g2 = pe.gamma_factor();
    let pref = 2.0 / g2;
    let tail_of = |x: f64| pref / p * gamma_upper(2.0 / p, x).unwrap_or(f64::INFINITY);
    let x0 = (4.0 / (g2 * inner_tol)).ln();
    let (x, tail) = cutoff(x0, 0.5 * inner_tol, tail_of);
    let r_max = x.powf(1.0 / p);

    let mut pts = vec![0.0, r_max];
    level_points(p, 0.0, r_max, &mut pts);
    if s > 0.0 {
        zero_points(false, s, 0.0, r_max, &mut pts);
    }
    let pts = finish(pts);
    let ad = Adaptive::new(KERNEL_ORDER);
    let q = ad.integrate_pieces(&pts, 0.5 * inner_tol / pref, &mut |r: f64| {
        j0(s * r) * (-r.powf(p)).exp() * r
    });
    if !q.converged {
        return Err(Error::NonConvergence(format!(
            "γ_p kernel (Hankel route) at p = {p}, s = {s}"
        )));
    }
    Ok(KernelValue {
        value: pref * q.value,
        err_bound: pref * q.error + tail,
    })
}

/// Radial route: `∫ j_1(sr) ρ_p(r) dr` over `[r_lo, r_hi]` with
/// `ρ_p(r) = (p / Γ(1+2/p)) r^{p+1} e^{-r^p}`; both truncated masses are certified
/// (`|j_1| <= 1`).
pub fn radial_route(p: f64, s: f64, inner_tol: f64) -> Result<KernelValue> {
    let pe = PExponent::new(p)?;
    check(s, inner_tol)?;
    if pe.is_infinite() {
        return Ok(exact(j1_ratio(s)));
    }
    let g2 = pe.gamma_factor();
    let c = p / g2;
    // Mass below r_lo is at most c r_lo^{p+2} / (p+2).
    let r_lo = (0.25 * inner_tol * (p + 2.0) / c).powf(1.0 / (p + 2.0));
    let low_mass = c * r_lo.powf(p + 2.0) / (p + 2.0);
    let tail_of = |x: f64| gamma_upper(1.0 + 2.0 / p, x).unwrap_or(f64::INFINITY) / g2;
    let (x, high_mass) = cutoff((4.0 / inner_tol).ln(), 0.25 * inner_tol, tail_of);
    let r_hi = x.powf(1.0 / p);

    let mut pts = vec![r_lo, r_hi];
    level_points(p, r_lo, r_hi, &mut pts);
    if s > 0.0 {
        zero_points(true, s, r_lo, r_hi, &mut pts);
    }
    let pts = finish(pts);
    let ad = Adaptive::new(KERNEL_ORDER);
    let q = ad.integrate_pieces(&pts, 0.5 * inner_tol, &mut |r: f64| {
        j1_ratio(s * r) * c * ((p + 1.0) * r.ln() - r.powf(p)).exp()
    });
    if !q.converged {
        return Err(Error::NonConvergence(format!(
            "γ_p kernel (radial route) at p = {p}, s = {s}"
        )));
    }
    Ok(KernelValue {
        value: q.value,
        err_bound: q.error + low_mass + high_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::j1;

    fn fin(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn value_at_origin_is_one() {
        for p in [1.0, 2.0, 4.0, 9.0, 140.0] {
            let k = gamma_kernel(fin(p), 0.0, 1e-12).unwrap();
            assert_eq!(k.value, 1.0);
            for route in [hankel_route, radial_route] {
                let v = route(p, 0.0, 1e-12).unwrap();
                assert!((v.value - 1.0).abs() <= v.err_bound + 1e-13, "p = {p}");
            }
        }
        let k = gamma_kernel(PExponent::Infinity, 2.0, 1e-12).unwrap();
        assert_eq!(k.value, j1(2.0));
        assert!(gamma_kernel(fin(3.0), -1.0, 1e-12).is_err());
    }

    #[test]
    fn gaussian_and_laplace_closed_forms() {
        // γ_2(s) = e^{-s²/4}; γ_1(s) = (1 + s²)^{-3/2}.
        for i in 0..60 {
            let s = 0.25 * i as f64;
            for route in [hankel_route, radial_route] {
                let g = route(2.0, s, 1e-12).unwrap();
                assert!((g.value - (-s * s / 4.0).exp()).abs() < 1e-11, "p=2 s={s}");
                let g = route(1.0, s, 1e-12).unwrap();
                assert!(
                    (g.value - (1.0 + s * s).powf(-1.5)).abs() < 1e-11,
                    "p=1 s={s}"
                );
                assert!(g.err_bound <= 1e-12);
            }
        }
    }

    #[test]
    fn trapezoid_oracle_at_p4() {
        // Composite trapezoid on [0, 6] with 10⁶ panels; e^{-6⁴} is negligible.
        let n = 1_000_000;
        let h = 6.0 / n as f64;
        let f = |r: f64| j0(r) * (-r.powi(4)).exp() * r;
        let mut acc = 0.5 * (f(0.0) + f(6.0));
        for i in 1..n {
            acc += f(i as f64 * h);
        }
        let oracle = 2.0 / crate::specfun::gamma(1.5) * acc * h;
        let k = gamma_kernel(fin(4.0), 1.0, 1e-12).unwrap();
        assert!((k.value - oracle).abs() < 1e-10, "{} vs {oracle}", k.value);
    }

    #[test]
    fn routes_agree() {
        for p in [1.5, 3.0, 4.0, 9.0, 16.0, 26.265, 140.0] {
            for i in 0..80 {
                let s = 0.7 * i as f64 + 0.1;
                let a = hankel_route(p, s, 1e-11).unwrap();
                let b = radial_route(p, s, 1e-11).unwrap();
                assert!(
                    (a.value - b.value).abs() <= a.err_bound + b.err_bound + 1e-12,
                    "p={p} s={s}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn bounded_by_one() {
        let ps = [1.0, 2.0, 3.0, 4.0, 9.0, 26.0, 140.0];
        for p in ps.iter().map(|&p| fin(p)).chain([PExponent::Infinity]) {
            for i in 0..=200 {
                let s = 0.25 * i as f64;
                let k = gamma_kernel(p, s, 1e-10).unwrap();
                assert!(k.value.abs() <= 1.0 + k.err_bound, "p={p} s={s}");
            }
        }
    }
}
