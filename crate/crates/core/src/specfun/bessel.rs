//! Bessel functions `J_0`, `J_1` of real argument and their positive zeros.
//!
//! Three regimes: the power series for `x < 8` (cancellation stays below about
//! `1e-14`), Miller's backward recurrence normalized by `J_0 + 2 Σ J_{2k} = 1` on
//! `[8, 20)`, and the Hankel asymptotic expansion for `x >= 20`, where the smallest
//! term of the divergent series is far below `f64` resolution.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use crate::{Error, Result};

/// Upper bound on `max_{x >= 0} |J_1(x)|` (attained near `x ≈ 1.8412`).
pub const J1_ABS_MAX: f64 = 0.5819;

/// Upper bound on `sup_{x > 0} √x |J_1(x)|` (the supremum ≈ 0.82503 sits near `x ≈ 2.1`;
/// for `x >= 4` the bound `√(2/π) (1 - x^{-2})^{-1/4} <= 0.811` takes over).
pub const SQRT_X_J1_SUP: f64 = 0.8251;

const SERIES_BELOW: f64 = 8.0;
const ASYMPTOTIC_FROM: f64 = 20.0;

/// `J_0(|x|)`.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_BELOW {
        j0_series(x)
    } else if x < ASYMPTOTIC_FROM {
        miller(x).0
    } else {
        let (p, q) = hankel_pq(0.0, x);
        let (s, c) = x.sin_cos();
        (2.0 / (PI * x)).sqrt() * FRAC_1_SQRT_2 * (p * (c + s) - q * (s - c))
    }
}

/// `J_1(x)`, odd in `x`.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_BELOW {
        0.5 * ax * j1_over_half_x(ax)
    } else if ax < ASYMPTOTIC_FROM {
        miller(ax).1
    } else {
        let (p, q) = hankel_pq(1.0, ax);
        let (s, c) = ax.sin_cos();
        (2.0 / (PI * ax)).sqrt() * FRAC_1_SQRT_2 * (p * (s - c) + q * (s + c))
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `j_1(x) = 2 J_1(x) / x`, continuous at the origin with value 1.
pub fn j1_ratio(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_BELOW {
        j1_over_half_x(ax)
    } else {
        2.0 * j1(ax) / ax
    }
}

/// Checked `J_0` for `x >= 0`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j0", x, "x >= 0"));
    }
    Ok(j0(x))
}

/// Checked `J_1` for `x >= 0`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j1", x, "x >= 0"));
    }
    Ok(j1(x))
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * k);
        sum += term;
        if term.abs() < 1e-17 && k > q.sqrt() {
            return sum;
        }
    }
}

// Σ_k (-1)^k (x²/4)^k / (k! (k+1)!), so that J_1(x) = (x/2) · this.
fn j1_over_half_x(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-17 && k > q.sqrt() {
            return sum;
        }
    }
}

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, started well above the turning
// point, returning (J_0, J_1).
fn miller(x: f64) -> (f64, f64) {
    let mut top = (x + 36.0).floor() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1_raw = 0.0;
    for k in (1..=top).rev() {
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        let m = k - 1;
        if m == 1 {
            j1_raw = cur;
        }
        if m >= 2 && m % 2 == 0 {
            norm += 2.0 * cur;
        }
    }
    norm += cur;
    (cur / norm, j1_raw / norm)
}

// Hankel asymptotic factors P_ν(x), Q_ν(x).
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        let a = term.abs();
        if a > prev_abs {
            break;
        }
        prev_abs = a;
        // k = 1, 2, 3, 4, ... contributes +Q, -P, -Q, +P, ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if a < 1e-17 {
            break;
        }
    }
    (p, q)
}

// McMahon expansion for the k-th positive zero of J_ν.
fn mcmahon(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e.powi(5))
}

// Newton iteration kept inside a bracket; falls back to bisection when a step leaves it.
fn refine_root(f: impl Fn(f64) -> (f64, f64), guess: f64, mut lo: f64, mut hi: f64) -> f64 {
    let (flo, _) = f(lo);
    let mut x = guess;
    for _ in 0..100 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let mut nx = x - step;
        if !(nx > lo && nx < hi) {
            nx = 0.5 * (lo + hi);
        }
        if (nx - x).abs() <= 4.0 * f64::EPSILON * x {
            return nx;
        }
        x = nx;
    }
    x
}

fn zero_of(nu_one: bool, k: usize) -> f64 {
    let nu = if nu_one { 1.0 } else { 0.0 };
    let guess = mcmahon(nu, k);
    let f = |x: f64| {
        if nu_one {
            let (a, b) = (j1(x), j0(x));
            (a, b - a / x)
        } else {
            (j0(x), -j1(x))
        }
    };
    refine_root(f, guess, guess - 0.7, guess + 0.7)
}

const ZERO_TABLE_LEN: usize = 64;

fn zero_table(nu_one: bool) -> &'static [f64] {
    static J0_ZEROS: OnceLock<Vec<f64>> = OnceLock::new();
    static J1_ZEROS: OnceLock<Vec<f64>> = OnceLock::new();
    let cell = if nu_one { &J1_ZEROS } else { &J0_ZEROS };
    cell.get_or_init(|| (1..=ZERO_TABLE_LEN).map(|k| zero_of(nu_one, k)).collect())
}

/// The `k`-th positive zero of `J_0` (`k >= 1`), root-refined.
pub fn bessel_j0_zero(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("bessel_j0_zero", 0.0, "k >= 1"));
    }
    Ok(zero_approx(false, k))
}

/// The `k`-th positive zero of `J_1` (`k >= 1`, the zero at the origin not counted).
///
/// `j_{1,1} = 3.831_705_970...`; the occasionally quoted `3.812` is off in the second decimal.
pub fn bessel_j1_zero(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("bessel_j1_zero", 0.0, "k >= 1"));
    }
    Ok(zero_approx(true, k))
}

/// Table lookup for small `k`, McMahon beyond (absolute error below 1e-12 there).
pub(crate) fn zero_approx(nu_one: bool, k: usize) -> f64 {
    if k <= ZERO_TABLE_LEN {
        zero_table(nu_one)[k - 1]
    } else if nu_one {
        mcmahon(1.0, k)
    } else {
        mcmahon(0.0, k)
    }
}

/// Location and value of the absolute maximum of `J_1` on `[0, ∞)`, found as the first
/// zero of `J_1' = J_0 - J_1 / x`.
pub fn bessel_j1_max() -> (f64, f64) {
    let f = |x: f64| {
        let (a, b) = (j0(x), j1(x));
        let d = a - b / x;
        // (J_1')' = -J_1 - J_0/x + 2 J_1/x²
        (d, -b - a / x + 2.0 * b / (x * x))
    };
    let x0 = refine_root(f, 1.84, 1.0, 3.0);
    (x0, j1(x0))
}
