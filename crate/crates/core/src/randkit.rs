//! Seeded samplers for the radial law, the uniform law on `S^3` and the unit disc.
//!
//! [`RngStream`] wraps ChaCha8 keyed by `seed`, with `stream_id` selecting an
//! independent keystream via the cipher's stream counter. Identical `(seed, stream_id)`
//! pairs reproduce identical draws on every platform and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, PExponent, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// The law with density `t^{p+1} e^{-t^p} · p / Γ(1+2/p)` on `[0, ∞)`; point mass at 1
/// for `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLaw {
    pub p: PExponent,
}

impl RadialLaw {
    pub fn new(p: PExponent) -> Self {
        RadialLaw { p }
    }

    /// `E R^k = Γ(1+(k+2)/p) / Γ(1+2/p)`, finite for `k > -2 - p`.
    pub fn moment(&self, k: f64) -> f64 {
        use crate::specfun::gamma;
        match self.p {
            PExponent::Infinity => 1.0,
            PExponent::Finite(p) => gamma(1.0 + (k + 2.0) / p) / gamma(1.0 + 2.0 / p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere3Point(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    pub re: f64,
    pub im: f64,
}

impl DiscPoint {
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// One draw of `R`: `G^{1/p}` with `G ~ Gamma(1 + 2/p)`.
pub fn sample_radial(law: RadialLaw, stream: &mut RngStream) -> f64 {
    match law.p {
        PExponent::Infinity => 1.0,
        PExponent::Finite(p) => gamma_ge1(1.0 + 2.0 / p, stream).powf(1.0 / p),
    }
}

/// Normalized Gaussian 4-vector.
pub fn sample_sphere3(stream: &mut RngStream) -> Sphere3Point {
    loop {
        let v = [
            stream.normal(),
            stream.normal(),
            stream.normal(),
            stream.normal(),
        ];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return Sphere3Point(v.map(|x| x / n));
        }
    }
}

/// Radius–angle method: `|D| = √U`, angle uniform.
pub fn sample_disc(stream: &mut RngStream) -> DiscPoint {
    let r = stream.uniform().sqrt();
    let (s, c) = (std::f64::consts::TAU * stream.uniform()).sin_cos();
    DiscPoint {
        re: r * c,
        im: r * s,
    }
}

/// Unit-scale gamma draw.
pub fn sample_gamma(shape: f64, stream: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::domain("sample_gamma", shape, "shape > 0"));
    }
    if shape >= 1.0 {
        Ok(gamma_ge1(shape, stream))
    } else {
        // Gamma(k) = Gamma(k + 1) · U^{1/k}
        let g = gamma_ge1(shape + 1.0, stream);
        Ok(g * stream.uniform_open0().powf(1.0 / shape))
    }
}

// Marsaglia–Tsang squeeze for shape >= 1.
fn gamma_ge1(shape: f64, stream: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = stream.normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = stream.uniform_open0();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
