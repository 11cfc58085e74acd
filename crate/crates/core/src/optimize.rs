//! Derivative-free search for maximal-section directions.
//!
//! Nelder–Mead runs on unconstrained `y ∈ R^n` mapped to the sphere by
//! `a = |y| / ‖y‖`, so simplex weights `w = a²` always lie on the probability simplex.
//! Starts: `a^(2)` (zero padded), `a^(n)`, and random points drawn from the seed.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{section_volume, Method};
use crate::hankel::{QuadSpec, VolumeResult};
use crate::montecarlo::McSpec;
use crate::randkit::RngStream;
use crate::{Direction, Error, PExponent, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub method: Method,
    /// Total objective evaluations, shared evenly across starts.
    pub budget: usize,
    /// Simplex diameter in `w` at convergence; engines run at `tol / 4`.
    pub tol: f64,
    pub seed: u64,
    pub random_starts: usize,
    /// Monte Carlo sample count per evaluation (common random numbers across evaluations).
    pub samples: u64,
}

impl OptConfig {
    pub fn new(method: Method, budget: usize, tol: f64, seed: u64) -> Self {
        OptConfig {
            method,
            budget,
            tol,
            seed,
            random_starts: 2,
            samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptReport {
    pub best: Direction,
    pub best_value: VolumeResult,
    pub iterations: usize,
    pub evaluations: usize,
    /// Strictly improving values only.
    pub trace: Vec<TracePoint>,
    pub converged: bool,
}

struct Objective<'a> {
    p: PExponent,
    cfg: &'a OptConfig,
    quad: QuadSpec,
    mc: McSpec,
    evaluations: usize,
}

impl Objective<'_> {
    fn eval(&mut self, y: &[f64]) -> (f64, Option<(Direction, VolumeResult)>) {
        self.evaluations += 1;
        let Ok(d) = Direction::new(y) else {
            return (f64::NEG_INFINITY, None);
        };
        match section_volume(self.p, &d, self.cfg.method, &self.quad, &self.mc) {
            Ok(r) if r.value.is_finite() => (r.value, Some((d, r))),
            _ => (f64::NEG_INFINITY, None),
        }
    }
}

fn weights(y: &[f64]) -> Vec<f64> {
    let s: f64 = y.iter().map(|x| x * x).sum();
    y.iter().map(|x| x * x / s).collect()
}

fn diameter_in_w(simplex: &[Vec<f64>]) -> f64 {
    let ws: Vec<Vec<f64>> = simplex.iter().map(|y| weights(y)).collect();
    let mut d: f64 = 0.0;
    for (i, u) in ws.iter().enumerate() {
        for v in &ws[i + 1..] {
            let e = u
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(e);
        }
    }
    d
}

struct Tracker {
    best: Option<(Direction, VolumeResult)>,
    best_value: f64,
    trace: Vec<TracePoint>,
}

impl Tracker {
    fn record(&mut self, value: f64, hit: Option<(Direction, VolumeResult)>, iteration: usize) {
        if value > self.best_value {
            self.best_value = value;
            self.best = hit;
            self.trace.push(TracePoint { iteration, value });
        }
    }

    fn engine_ok(&self, tol: f64) -> bool {
        self.best
            .as_ref()
            .is_some_and(|(_, r)| r.err_bound <= tol / 4.0)
    }
}

struct StartResult {
    best: Option<(Direction, VolumeResult)>,
    trace: Vec<TracePoint>,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

fn nelder_mead(obj: &mut Objective, start: &[f64], budget: usize) -> StartResult {
    let n = start.len();
    let step = 0.15;
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += if v[i] >= 0.0 { step } else { -step };
        simplex.push(v);
    }
    let mut tr = Tracker {
        best: None,
        best_value: f64::NEG_INFINITY,
        trace: Vec::new(),
    };
    let mut iterations = 0;
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    for v in &simplex {
        let (f, hit) = obj.eval(v);
        tr.record(f, hit, 0);
        values.push(f);
    }
    let mut converged = false;

    while obj.evaluations < budget {
        // Descending by value: simplex[0] best, simplex[n] worst.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if diameter_in_w(&simplex) < obj.cfg.tol && tr.engine_ok(obj.cfg.tol) {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let (fr, hr) = obj.eval(&xr);
        tr.record(fr, hr, iterations);
        if fr > values[0] {
            let xe = along(2.0);
            let (fe, he) = obj.eval(&xe);
            tr.record(fe, he, iterations);
            if fe > fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr > values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr > values[n] {
            let xc = along(0.5);
            let (fc, hc) = obj.eval(&xc);
            tr.record(fc, hc, iterations);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let (fc, hc) = obj.eval(&xc);
            tr.record(fc, hc, iterations);
            (xc, fc)
        };
        if fc > values[n].max(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..=n {
            let v: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            let (f, h) = obj.eval(&v);
            tr.record(f, h, iterations);
            simplex[i] = v;
            values[i] = f;
            if obj.evaluations >= budget {
                break;
            }
        }
    }
    StartResult {
        best: tr.best,
        trace: tr.trace,
        iterations,
        evaluations: obj.evaluations,
        converged,
    }
}

fn starts(n: usize, cfg: &OptConfig) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![Direction::diagonal(2.min(n), n)?.entries().to_vec()];
    if n > 2 {
        out.push(Direction::diagonal(n, n)?.entries().to_vec());
    }
    for k in 0..cfg.random_starts {
        let mut rng = RngStream::new(cfg.seed, 1 + k as u64);
        let y: Vec<f64> = (0..n).map(|_| rng.normal().abs()).collect();
        out.push(Direction::new(&y)?.entries().to_vec());
    }
    Ok(out)
}

/// Multi-start Nelder–Mead maximization of `a -> A_{n,p}(a)`.
///
/// `converged` holds when some start reached a simplex diameter below `tol` in `w`
/// with engine error at most `tol/4` at its best point, within its share of the budget.
pub fn maximize_direction(p: PExponent, n: usize, cfg: &OptConfig) -> Result<OptReport> {
    if n < 2 {
        return Err(Error::Dimension(format!("n = {n}: need n >= 2")));
    }
    if n > 64 {
        return Err(Error::Dimension(format!(
            "n = {n}: optimization is limited to n <= 64"
        )));
    }
    if !(cfg.tol > 0.0) || cfg.budget == 0 {
        return Err(Error::InvalidSpec("tol and budget must be positive".into()));
    }
    if cfg.method == Method::ClosedForm && n > 2 {
        return Err(Error::InvalidSpec("closed forms cover n = 2 only".into()));
    }
    let starts = starts(n, cfg)?;
    let share = (cfg.budget / starts.len()).max(n + 2);
    let quad = QuadSpec::new(cfg.tol / 4.0);
    let mut mc = McSpec::new(cfg.samples, cfg.seed);
    mc.batches = mc.batches.max(2);
    let results: Vec<StartResult> = starts
        .par_iter()
        .map(|s| {
            let mut obj = Objective {
                p,
                cfg,
                quad,
                mc,
                evaluations: 0,
            };
            nelder_mead(&mut obj, s, share)
        })
        .collect();

    let mut trace = Vec::new();
    let mut offset = 0;
    let mut running = f64::NEG_INFINITY;
    let mut winner: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        for t in &r.trace {
            if t.value > running {
                running = t.value;
                trace.push(TracePoint {
                    iteration: offset + t.iteration,
                    value: t.value,
                });
                winner = Some(i);
            }
        }
        offset += r.iterations + 1;
    }
    let w = winner.ok_or_else(|| {
        Error::NonConvergence("no start produced a finite objective value".into())
    })?;
    let (best, best_value) = results[w].best.clone().expect("winner has a best point");
    Ok(OptReport {
        best,
        best_value,
        iterations: results.iter().map(|r| r.iterations).sum(),
        evaluations: results.iter().map(|r| r.evaluations).sum(),
        trace,
        converged: results.iter().any(|r| r.converged),
    })
}

/// Canonical points `a = √w` of the `w`-simplex grid with spacing `resolution`, each
/// evaluated once (the objective is permutation invariant).
pub fn grid_search_simplex(
    p: PExponent,
    n: usize,
    resolution: f64,
    method: Method,
    quad: &QuadSpec,
    mc: &McSpec,
) -> Result<Vec<(Direction, f64)>> {
    if !(2..=3).contains(&n) {
        return Err(Error::Dimension(format!(
            "grid search supports n = 2 or 3, not {n}"
        )));
    }
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::InvalidSpec(format!(
            "resolution {resolution} must lie in (0, 0.5]"
        )));
    }
    let m = (1.0 / resolution).round() as usize;
    // Canonical points only: i >= j >= k (k = 0 for n = 2).
    let mut pts: Vec<[usize; 3]> = Vec::new();
    for i in 0..=m {
        for j in 0..=i.min(m - i) {
            let k = m - i - j;
            if (n == 2 && k == 0) || (n == 3 && k <= j) {
                pts.push([i, j, k]);
            }
        }
    }
    pts.par_iter()
        .map(|t| {
            let a: Vec<f64> = t[..n]
                .iter()
                .map(|&c| (c as f64 / m as f64).sqrt())
                .collect();
            let d = Direction::new(&a)?;
            let v = section_volume(p, &d, method, quad, mc)?.value;
            Ok((d, v))
        })
        .collect()
}
