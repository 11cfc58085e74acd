use std::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum away from its pole.
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", x, "x > 0"));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `Γ(x)` for `x > 0`. Callers guarantee the domain; non-positive input yields NaN.
pub fn gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < 1.0 {
        return gamma(x + 1.0) / x;
    }
    ln_gamma_unchecked(x).exp()
}

// B_{2k} / (2k) for the digamma asymptotic series.
const DIGAMMA_TAIL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

// B_{2k} for the trigamma asymptotic series.
const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2_730.0,
    7.0 / 6.0,
];

const ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma `Ψ(x) = (ln Γ)'(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("digamma", x, "x > 0"));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_FROM {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_TAIL {
        series += c * pow;
        pow *= inv2;
    }
    Ok(shift + y.ln() - 0.5 / y - series)
}

/// Trigamma `Ψ'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("trigamma", x, "x > 0"));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < ASYMPTOTIC_FROM {
        shift += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv2 * inv;
    for b in BERNOULLI_EVEN {
        series += b * pow;
        pow *= inv2;
    }
    Ok(shift + inv + 0.5 * inv2 + series)
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ u^{s-1} e^{-u} du` (not regularized).
pub fn gamma_upper(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain("gamma_upper", s, "s > 0"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain("gamma_upper", x, "x >= 0"));
    }
    if x == 0.0 {
        return Ok(gamma(s));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        Ok(gamma(s) - lower_series(s, x))
    } else {
        Ok(upper_continued_fraction(s, x))
    }
}

// γ(s, x) = x^s e^{-x} Σ_n x^n / (s (s+1) ... (s+n)).
fn lower_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut k = s;
    for _ in 0..10_000 {
        k += 1.0;
        term *= x / k;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (s * x.ln() - x).exp()
}

// Modified Lentz evaluation of the Legendre continued fraction for Γ(s, x).
fn upper_continued_fraction(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * x.ln() - x).exp() * h
}
