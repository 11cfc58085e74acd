//! Monte Carlo engine for `A_{n,p}(a) = Γ(1+2/p) E|Σ_j a_j R_j ξ_j|^{-2}`, with `R_j`
//! radial and `ξ_j` uniform on `S^3 ⊂ R^4`.
//!
//! The plain estimator `|Σ a_j R_j ξ_j|^{-2}` has infinite variance in `R^4`. The
//! Rao–Blackwell estimator integrates out `ξ_k` for the largest term `v = a_k R_k`:
//! `|x|^{-2}` is harmonic on `R^4 \ {0}`, so the sphere average of `|S + vξ|^{-2}` is
//! `1 / max(|S|, v)^2`, bounded by `v^{-2}`.
//!
//! Batch `b` draws from stream `b` of the seed, so results do not depend on the
//! number of threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::hankel::{EngineKind, VolumeMeta, VolumeResult};
use crate::randkit::{sample_radial, sample_sphere3, RadialLaw, RngStream};
use crate::specfun::gamma;
use crate::{Direction, Error, PExponent, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Plain,
    RaoBlackwell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Mean,
    MedianOfMeans,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    pub samples: u64,
    pub seed: u64,
    pub strategy: Strategy,
    pub batches: usize,
    pub aggregate: Aggregate,
}

impl McSpec {
    pub fn new(samples: u64, seed: u64) -> Self {
        McSpec {
            samples,
            seed,
            strategy: Strategy::RaoBlackwell,
            batches: 100.min(samples.max(1) as usize),
            aggregate: Aggregate::Mean,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.batches == 0 {
            return Err(Error::InvalidSpec(
                "samples and batches must be positive".into(),
            ));
        }
        if self.samples < self.batches as u64 {
            return Err(Error::InvalidSpec(format!(
                "samples = {} fewer than batches = {}",
                self.samples, self.batches
            )));
        }
        if self.batches < 2 {
            return Err(Error::InvalidSpec(
                "at least two batches are needed for a standard error".into(),
            ));
        }
        Ok(())
    }
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec::new(1_000_000, 0)
    }
}

/// Estimate of `E|Σ a_j R_j ξ_j|^{-2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub batch_values: Vec<f64>,
    pub samples_used: u64,
}

/// `E[|S + vξ|^{-2}]` for `|S| = u` and `ξ` uniform on `S^3`.
pub fn rao_blackwell_kernel(u: f64, v: f64) -> Result<f64> {
    if !(u >= 0.0 && v >= 0.0) || u == 0.0 && v == 0.0 {
        return Err(Error::domain(
            "rao_blackwell_kernel",
            u.max(v),
            "(u, v) != (0, 0)",
        ));
    }
    let m = u.max(v);
    Ok(1.0 / (m * m))
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    estimate: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    max_term: f64,
}

fn add_scaled(acc: &mut [f64; 4], c: f64, xi: [f64; 4]) {
    for (a, x) in acc.iter_mut().zip(xi) {
        *a += c * x;
    }
}

fn one_draw(
    law: RadialLaw,
    a: &[f64],
    strategy: Strategy,
    terms: &mut [f64],
    rng: &mut RngStream,
) -> Draw {
    let mut k = 0;
    for (j, &aj) in a.iter().enumerate() {
        terms[j] = aj * sample_radial(law, rng);
        if terms[j] > terms[k] {
            k = j;
        }
    }
    let max_term = terms[k];
    let mut sum = [0.0; 4];
    let estimate = match strategy {
        Strategy::RaoBlackwell => {
            for (j, &t) in terms.iter().enumerate() {
                if j != k {
                    add_scaled(&mut sum, t, sample_sphere3(rng).0);
                }
            }
            let m = sum.iter().map(|x| x * x).sum::<f64>().sqrt().max(max_term);
            1.0 / (m * m)
        }
        Strategy::Plain => {
            for &t in terms.iter() {
                add_scaled(&mut sum, t, sample_sphere3(rng).0);
            }
            1.0 / sum.iter().map(|x| x * x).sum::<f64>()
        }
    };
    Draw { estimate, max_term }
}

fn batch_sizes(spec: &McSpec) -> Vec<u64> {
    let b = spec.batches as u64;
    (0..b)
        .map(|i| (i + 1) * spec.samples / b - i * spec.samples / b)
        .collect()
}

fn run_batch(law: RadialLaw, a: &[f64], spec: &McSpec, index: usize, size: u64) -> f64 {
    let mut rng = RngStream::new(spec.seed, index as u64);
    let mut terms = vec![0.0; a.len()];
    let mut acc = 0.0;
    for _ in 0..size {
        acc += one_draw(law, a, spec.strategy, &mut terms, &mut rng).estimate;
    }
    acc / size as f64
}

fn aggregate(values: &[f64], how: Aggregate) -> (f64, f64) {
    let b = values.len() as f64;
    let mean = values.iter().sum::<f64>() / b;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (b - 1.0);
    let se = (var / b).sqrt();
    match how {
        Aggregate::Mean => (mean, se),
        Aggregate::MedianOfMeans => {
            let mut v = values.to_vec();
            v.sort_by(f64::total_cmp);
            let mid = v.len() / 2;
            let med = if v.len() % 2 == 1 {
                v[mid]
            } else {
                0.5 * (v[mid - 1] + v[mid])
            };
            // Asymptotic standard error of a sample median of normal batch means.
            (med, se * (std::f64::consts::PI / 2.0).sqrt())
        }
    }
}

/// Estimates `E|Σ a_j R_j ξ_j|^{-2}`; requires at least two nonzero entries.
pub fn expectation(p: PExponent, a: &Direction, spec: &McSpec) -> Result<McEstimate> {
    spec.validate()?;
    let nz = a.nonzero();
    if nz.len() < 2 {
        return Err(Error::Dimension(
            "the Monte Carlo representation needs two nonzero coordinates".into(),
        ));
    }
    let law = RadialLaw::new(p);
    let sizes = batch_sizes(spec);
    let batch_values: Vec<f64> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &size)| run_batch(law, nz, spec, i, size))
        .collect();
    let (value, std_err) = aggregate(&batch_values, spec.aggregate);
    Ok(McEstimate {
        value,
        std_err,
        batch_values,
        samples_used: spec.samples,
    })
}

/// `A_{n,p}(a)` by Monte Carlo; `err_bound` is three standard errors.
pub fn estimate_section_volume(p: PExponent, a: &Direction, spec: &McSpec) -> Result<VolumeResult> {
    spec.validate()?;
    if a.nonzero_count() < 2 {
        return Ok(VolumeResult::closed_form(
            1.0,
            "degenerate direction: at most one nonzero coordinate",
        ));
    }
    let est = expectation(p, a, spec)?;
    let g2 = p.gamma_factor();
    let std_err = g2 * est.std_err;
    Ok(VolumeResult {
        value: g2 * est.value,
        err_bound: 3.0 * std_err,
        engine: EngineKind::MonteCarlo,
        meta: VolumeMeta {
            samples: Some(est.samples_used),
            seed: Some(spec.seed),
            std_err: Some(std_err),
            ..VolumeMeta::default()
        },
    })
}

/// One row of the CLT experiment: `E|X_n|^{-2}` with `X_n = n^{-1/2} Σ R_j ξ_j`
/// against its Gaussian limit `C_p = 2Γ(1+2/p)/Γ(1+4/p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltRow {
    pub n: usize,
    pub estimate: f64,
    pub std_err: f64,
    pub target: f64,
}

pub fn clt_target(p: f64) -> f64 {
    2.0 * gamma(1.0 + 2.0 / p) / gamma(1.0 + 4.0 / p)
}

pub fn clt_experiment(p: PExponent, n_list: &[usize], spec: &McSpec) -> Result<Vec<CltRow>> {
    let PExponent::Finite(q) = p else {
        return Err(Error::domain("clt_experiment", f64::INFINITY, "finite p"));
    };
    let target = clt_target(q);
    n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::Dimension(format!("n = {n}: need n >= 2")));
            }
            let est = expectation(p, &Direction::diagonal(n, n)?, spec)?;
            Ok(CltRow {
                n,
                estimate: est.value,
                std_err: est.std_err,
                target,
            })
        })
        .collect()
}

/// Least-squares slope of `ln|estimate - target|` against `ln n`.
pub fn clt_slope(rows: &[CltRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.estimate - r.target).abs().ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Adaptive;
    use std::f64::consts::PI;

    fn fin(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    // (2/π) ∫_{-1}^{1} √(1-t²) / (u² + v² + 2uvt) dt with t = cos θ.
    fn kernel_oracle(u: f64, v: f64) -> f64 {
        let ad = Adaptive::new(15);
        let r = ad.integrate(0.0, PI, 1e-14, &mut |th: f64| {
            // u² + v² + 2uv cos θ = (u - v)² + 4uv cos²(θ/2), free of cancellation.
            let s = th.sin();
            let c = (0.5 * th).cos();
            s * s / ((u - v) * (u - v) + 4.0 * u * v * c * c)
        });
        2.0 / PI * r.value
    }

    #[test]
    fn kernel_matches_quadrature_oracle() {
        for i in 0..20 {
            for j in 0..20 {
                let u = 0.1 + 0.15 * i as f64;
                let v = 0.1 + 0.15 * j as f64;
                let k = rao_blackwell_kernel(u, v).unwrap();
                assert!((k - kernel_oracle(u, v)).abs() < 1e-10, "u={u} v={v}");
            }
        }
        assert_eq!(rao_blackwell_kernel(2.0, 1.0).unwrap(), 0.25);
        assert_eq!(rao_blackwell_kernel(3.0, 0.0).unwrap(), 1.0 / 9.0);
        assert!((kernel_oracle(1.0, 1.0) - 1.0).abs() < 1e-10);
        assert!(rao_blackwell_kernel(0.0, 0.0).is_err());
    }

    #[test]
    fn estimator_bounded_by_largest_term() {
        let a = Direction::diagonal(3, 3).unwrap();
        let law = RadialLaw::new(fin(4.0));
        let mut rng = RngStream::new(3, 0);
        let mut terms = vec![0.0; 3];
        for _ in 0..100_000 {
            let d = one_draw(
                law,
                a.entries(),
                Strategy::RaoBlackwell,
                &mut terms,
                &mut rng,
            );
            assert!(d.estimate <= 1.0 / (d.max_term * d.max_term));
        }
    }

    #[test]
    fn known_values() {
        let spec = McSpec::new(1_000_000, 1);
        let a2 = Direction::diagonal(2, 2).unwrap();
        let r = estimate_section_volume(PExponent::Infinity, &a2, &spec).unwrap();
        assert!((r.value - 2.0).abs() <= r.err_bound, "{r:?}");
        let r = estimate_section_volume(fin(4.0), &a2, &spec).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() <= r.err_bound, "{r:?}");
        let one = Direction::diagonal(1, 3).unwrap();
        let r = estimate_section_volume(fin(4.0), &one, &spec).unwrap();
        assert_eq!((r.value, r.engine), (1.0, EngineKind::ClosedForm));
    }

    #[test]
    fn strategies_agree_and_rao_blackwell_reduces_variance() {
        let a = Direction::diagonal(3, 3).unwrap();
        let spec = McSpec::new(1_000_000, 2);
        let rb = expectation(fin(4.0), &a, &spec).unwrap();
        let plain = expectation(fin(4.0), &a, &spec.with_strategy(Strategy::Plain)).unwrap();
        let combined = (rb.std_err.powi(2) + plain.std_err.powi(2)).sqrt();
        assert!((rb.value - plain.value).abs() <= 4.0 * combined);
        assert!(rb.std_err < plain.std_err);
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let a = Direction::new(&[0.7, 0.5, 0.4, 0.3]).unwrap();
        let spec = McSpec::new(40_000, 9);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let x = one.install(|| expectation(fin(3.0), &a, &spec).unwrap());
        let y = four.install(|| expectation(fin(3.0), &a, &spec).unwrap());
        assert_eq!(x.value.to_bits(), y.value.to_bits());
        assert_eq!(x.batch_values, y.batch_values);
    }

    #[test]
    fn median_of_means_and_validation() {
        let a = Direction::diagonal(3, 3).unwrap();
        let mut spec = McSpec::new(200_000, 4);
        spec.aggregate = Aggregate::MedianOfMeans;
        let e = expectation(fin(4.0), &a, &spec).unwrap();
        let mut sorted = e.batch_values.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(e.value, 0.5 * (sorted[49] + sorted[50]));
        assert!(McSpec {
            batches: 10,
            ..McSpec::new(5, 0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn clt_table_shape() {
        assert!((clt_target(4.0) - PI.sqrt()).abs() < 1e-14);
        let rows = clt_experiment(fin(4.0), &[2, 4], &McSpec::new(10_000, 0)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(clt_experiment(PExponent::Infinity, &[2], &McSpec::new(10_000, 0)).is_err());
        let synthetic: Vec<CltRow> = [4usize, 16, 64]
            .iter()
            .map(|&n| CltRow {
                n,
                estimate: 1.0 + 0.5 / (n as f64).sqrt(),
                std_err: 0.0,
                target: 1.0,
            })
            .collect();
        assert!((clt_slope(&synthetic) + 0.5).abs() < 1e-12);
    }
}
