//! Gauss–Legendre rules and a small adaptive integrator.

use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared, lazily built rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration: value and summed panel error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: 0.0,
        error: 0.0,
        panels: 0,
        converged: true,
    };

    pub fn add(&mut self, other: Integral) {
        self.value += other.value;
        self.error += other.error;
        self.panels += other.panels;
        self.converged &= other.converged;
    }
}

/// Globally adaptive order-doubling Gauss–Legendre.
///
/// Each panel is integrated with `order` and `2 * order` nodes; the finer value is kept
/// and `|fine - coarse|` is the panel error estimate. The panel with the largest
/// estimate is bisected until the summed estimate drops below `tol` or the panel
/// budget is spent.
#[derive(Debug, Clone)]
pub struct Adaptive {
    coarse: Arc<GaussLegendre>,
    fine: Arc<GaussLegendre>,
    pub max_panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    aux: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Adaptive {
    pub fn new(order: usize) -> Self {
        Adaptive {
            coarse: GaussLegendre::cached(order),
            fine: GaussLegendre::cached(2 * order),
            max_panels: 20_000,
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels.max(1);
        self
    }

    pub fn integrate(&self, a: f64, b: f64, tol: f64, f: &mut impl FnMut(f64) -> f64) -> Integral {
        self.integrate_pieces(&[a, b], tol, f)
    }

    /// Integrates over consecutive breakpoints `points[i]..points[i + 1]`; pieces with
    /// `points[i + 1] <= points[i]` are skipped.
    pub fn integrate_pieces(
        &self,
        points: &[f64],
        tol: f64,
        f: &mut impl FnMut(f64) -> f64,
    ) -> Integral {
        self.integrate_pieces_aux(points, tol, &mut |x| (f(x), 0.0))
            .0
    }

    /// As [`Adaptive::integrate_pieces`] for an integrand `x -> (f(x), g(x))`: `f`
    /// drives refinement, `g` is integrated on the final panels with the fine rule.
    pub fn integrate_pieces_aux(
        &self,
        points: &[f64],
        tol: f64,
        f: &mut impl FnMut(f64) -> (f64, f64),
    ) -> (Integral, f64) {
        let mut heap = BinaryHeap::new();
        let mut error = 0.0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                let p = self.panel(w[0], w[1], f);
                error += p.error;
                heap.push(p);
            }
        }
        let mut panels = heap.len();
        // Panels too narrow to bisect further; kept out of the refinement queue.
        let mut frozen: Vec<Panel> = Vec::new();
        while error > tol && panels < self.max_panels {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                frozen.push(worst);
                continue;
            }
            let l = self.panel(worst.a, mid, f);
            let r = self.panel(mid, worst.b, f);
            error += l.error + r.error - worst.error;
            heap.push(l);
            heap.push(r);
            panels += 1;
        }
        // Re-sum so the result carries no drift from the running updates.
        let (mut value, mut error, mut aux) = (0.0, 0.0, 0.0);
        for p in heap.iter().chain(frozen.iter()) {
            value += p.value;
            error += p.error;
            aux += p.aux;
        }
        let integral = Integral {
            value,
            error,
            panels,
            converged: error <= tol && value.is_finite(),
        };
        (integral, aux)
    }

    fn panel(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> (f64, f64)) -> Panel {
        let coarse = self.coarse.integrate(a, b, |x| f(x).0);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let (mut fine, mut aux) = (0.0, 0.0);
        for (x, w) in self.fine.nodes().iter().zip(self.fine.weights()) {
            let (v, g) = f(mid + half * x);
            fine += w * v;
            aux += w * g;
        }
        fine *= half;
        aux *= half;
        let error = (fine - coarse).abs();
        Panel {
            a,
            b,
            value: fine,
            error: if error.is_nan() { f64::INFINITY } else { error },
            aux,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 10, 20, 40] {
            let g = GaussLegendre::new(n);
            let sum: f64 = g.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n = {n}");
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let got = g.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n = {n}, deg = {deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let ad = Adaptive::new(10);
        let r = ad.integrate(0.0, 1.0, 1e-12, &mut |x: f64| x.sqrt());
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
        let r = ad.integrate_pieces(&[0.0, 1.0, 3.0, 2.0 * PI], 1e-12, &mut |x: f64| x.sin());
        assert!(r.value.abs() < 1e-12);
    }
}
