use crate::{Error, Result};

// B_{2k} / (2k)!
const EM_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

const EM_CUT: u32 = 20;

/// Riemann zeta `ζ(α)` for real `α > 1`, by Euler–Maclaurin summation.
pub fn zeta(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::domain("zeta", alpha, "alpha > 1"));
    }
    let n = EM_CUT as f64;
    let mut sum = 0.0;
    for k in (1..EM_CUT).rev() {
        sum += (k as f64).powf(-alpha);
    }
    sum += n.powf(1.0 - alpha) / (alpha - 1.0) + 0.5 * n.powf(-alpha);
    // f^{(2k-1)}(N) for f(x) = x^{-α} carries the rising factorial α (α+1) ... (α+2k-2).
    let mut rising = alpha;
    let mut pow = n.powf(-alpha - 1.0);
    for (k, c) in EM_COEFFS.iter().enumerate() {
        sum += c * rising * pow;
        let m = 2.0 * k as f64 + 1.0;
        rising *= (alpha + m) * (alpha + m + 1.0);
        pow /= n * n;
    }
    Ok(sum)
}
