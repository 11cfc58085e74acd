//! Closed forms, the diagonal limit, the inequality suite and the crossing scanner.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::hankel::{section_volume_quadrature, QuadSpec, VolumeResult};
use crate::montecarlo::{estimate_section_volume, McSpec};
use crate::specfun::{digamma, gamma};
use crate::{Direction, Error, PExponent, Result};

/// Engine selector for [`section_volume`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

/// `A_{n,p}(a)` by the requested method.
///
/// Directions with one nonzero entry give 1. Two nonzero entries are answered in
/// closed form by [`Method::ClosedForm`] and whenever the ambient dimension is at most
/// 2; [`Method::ClosedForm`] has no answer for three or more nonzero entries.
pub fn section_volume(
    p: PExponent,
    a: &Direction,
    method: Method,
    quad: &QuadSpec,
    mc: &McSpec,
) -> Result<VolumeResult> {
    let nz = a.nonzero();
    if nz.len() <= 1 {
        return Ok(VolumeResult::closed_form(
            1.0,
            "at most one nonzero coordinate",
        ));
    }
    if nz.len() == 2 && (method == Method::ClosedForm || a.dim() <= 2) {
        return Ok(VolumeResult::closed_form(
            a2_general(p, nz[0], nz[1])?,
            "two nonzero coordinates",
        ));
    }
    match method {
        Method::Quadrature => section_volume_quadrature(p, a, quad),
        Method::MonteCarlo => estimate_section_volume(p, a, mc),
        Method::ClosedForm => Err(Error::InvalidSpec(format!(
            "no closed form with {} nonzero coordinates",
            nz.len()
        ))),
    }
}

/// `A(a^(2)) = 2^{1-2/p}`.
pub fn a2_closed_form(p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => 2.0,
        PExponent::Finite(q) => 2f64.powf(1.0 - 2.0 / q),
    }
}

/// `1 / ‖(b1, b2)‖_p²` for a unit vector `(b1, b2)`.
pub fn a2_general(p: PExponent, b1: f64, b2: f64) -> Result<f64> {
    if !(b1 >= 0.0 && b2 >= 0.0) || !((b1 * b1 + b2 * b2 - 1.0).abs() <= 1e-12) {
        return Err(Error::Normalization(format!(
            "({b1}, {b2}) is not a nonnegative unit vector"
        )));
    }
    if b1 == b2 {
        // A unit vector with equal entries is a^(2).
        return Ok(a2_closed_form(p));
    }
    Ok(match p {
        PExponent::Infinity => b1.max(b2).powi(-2),
        PExponent::Finite(q) => (b1.powf(q) + b2.powf(q)).powf(-2.0 / q),
    })
}

/// `lim_n A_{n,p}(a^(n)) = 2Γ(1+2/p)²/Γ(1+4/p)`.
pub fn limit_diagonal(p: PExponent) -> Result<f64> {
    match p {
        PExponent::Infinity => Ok(2.0),
        PExponent::Finite(q) if q > 1.0 => {
            let g2 = gamma(1.0 + 2.0 / q);
            Ok(2.0 * g2 * g2 / gamma(1.0 + 4.0 / q))
        }
        PExponent::Finite(q) => Err(Error::domain("limit_diagonal", q, "p > 1")),
    }
}

/// `f(p) = Γ(1+4/p)/Γ(1+2/p)`.
pub fn f_ratio(p: f64) -> f64 {
    gamma(1.0 + 4.0 / p) / gamma(1.0 + 2.0 / p)
}

/// `g(p) = Γ(1+1/p)/Γ(1+2/p)`.
pub fn g_ratio(p: f64) -> f64 {
    gamma(1.0 + 1.0 / p) / gamma(1.0 + 2.0 / p)
}

/// `h(p) = (2^{1/p} Γ(1+2/p))² / Γ(1+4/p)`, the ratio of the diagonal limit to `A(a^(2))`.
pub fn h_ratio(p: f64) -> f64 {
    let t = 2f64.powf(1.0 / p) * gamma(1.0 + 2.0 / p);
    t * t / gamma(1.0 + 4.0 / p)
}

/// `1 + 2ln2/p - (2π²/3 - 2(ln2)²)/p² + 4/p³`.
pub fn h_cubic_bound(p: f64) -> f64 {
    1.0 + 2.0 * LN_2 / p - (2.0 * PI * PI / 3.0 - 2.0 * LN_2 * LN_2) / (p * p) + 4.0 / (p * p * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

/// One evaluated inequality `lhs <relation> rhs`; `margin` is positive when it holds.
///
/// Rows with `required = false` are recorded for information and never count as
/// violations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ineq {
    pub name: String,
    pub case: String,
    pub p: f64,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub satisfied: bool,
    pub margin: f64,
    pub required: bool,
}

impl Ineq {
    pub fn new(name: &str, case: String, p: f64, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let margin = match relation {
            Relation::Ge | Relation::Gt => lhs - rhs,
            Relation::Le | Relation::Lt => rhs - lhs,
        };
        let satisfied = match relation {
            Relation::Ge | Relation::Le => margin >= 0.0,
            Relation::Gt | Relation::Lt => margin > 0.0,
        };
        Ineq {
            name: name.to_string(),
            case,
            p,
            lhs,
            relation,
            rhs,
            satisfied,
            margin,
            required: true,
        }
    }

    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }

    pub fn violated(&self) -> bool {
        self.required && !self.satisfied
    }
}

fn require(func: &'static str, p: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::domain(func, p, expected))
    }
}

/// `f(p) >= 24/25` for `p >= 4`.
pub fn lemma1_f(p: f64) -> Result<Ineq> {
    require("lemma1_f", p, p >= 4.0 && p.is_finite(), "4 <= p < inf")?;
    Ok(Ineq::new(
        "f_lower",
        String::new(),
        p,
        f_ratio(p),
        Relation::Ge,
        24.0 / 25.0,
    ))
}

/// Monotonicity of `g` for `p >= 7`, as the sign of
/// `g'(p) = g(p)/p² (2Ψ(1+2/p) - Ψ(1+1/p))`.
pub fn lemma1_g(p: f64) -> Result<Ineq> {
    require("lemma1_g", p, p >= 7.0 && p.is_finite(), "7 <= p < inf")?;
    let d = g_ratio(p) / (p * p) * (2.0 * digamma(1.0 + 2.0 / p)? - digamma(1.0 + 1.0 / p)?);
    Ok(Ineq::new(
        "g_derivative",
        String::new(),
        p,
        d,
        Relation::Le,
        0.0,
    ))
}

/// The stated values `g(7) < 1.0397` and `g(9) < 1.0377`, plus the sharper `g(7) < 1.0390`
/// (informational: the computed `g(7) ≈ 1.03967` does not satisfy it).
pub fn lemma1_g_values() -> Vec<Ineq> {
    vec![
        Ineq::new(
            "g_value",
            "g(7)".into(),
            7.0,
            g_ratio(7.0),
            Relation::Lt,
            1.0397,
        ),
        Ineq::new(
            "g_value",
            "g(7) sharper".into(),
            7.0,
            g_ratio(7.0),
            Relation::Lt,
            1.0390,
        )
        .informational(),
        Ineq::new(
            "g_value",
            "g(9)".into(),
            9.0,
            g_ratio(9.0),
            Relation::Lt,
            1.0377,
        ),
    ]
}

/// `h(p) > 1` for `p > 2`, and for `p >= 9` also `h(p) >= ` [`h_cubic_bound`]`(p)`.
pub fn lemma1_h(p: f64) -> Result<Vec<Ineq>> {
    require("lemma1_h", p, p > 2.0 && p.is_finite(), "2 < p < inf")?;
    let h = h_ratio(p);
    let mut out = vec![Ineq::new(
        "h_above_one",
        String::new(),
        p,
        h,
        Relation::Gt,
        1.0,
    )];
    if p >= 9.0 {
        out.push(Ineq::new(
            "h_cubic",
            String::new(),
            p,
            h,
            Relation::Ge,
            h_cubic_bound(p),
        ));
    }
    Ok(out)
}

fn tail_factor(n: usize) -> f64 {
    let nf = n as f64;
    1.0 - 4.0 / (3.0 * nf) - 0.5 * nf / (nf - 2.0) * 0.854f64.powi(n as i32)
}

fn check_fg(func: &'static str, p: f64, n: usize) -> Result<()> {
    require(func, p, p >= 9.0 && p.is_finite(), "9 <= p < inf")?;
    if n < 3 {
        return Err(Error::Dimension(format!(
            "{func}: n = {n} must be at least 3"
        )));
    }
    Ok(())
}

/// `F(p,n) = h(p) (1 - 4/(3n) - n/(2(n-2)) 0.854^n) > 1`.
pub fn sufficient_f(p: f64, n: usize) -> Result<Ineq> {
    check_fg("sufficient_F", p, n)?;
    Ok(Ineq::new(
        "F",
        format!("n={n}"),
        p,
        h_ratio(p) * tail_factor(n),
        Relation::Gt,
        1.0,
    ))
}

/// `G(p,n)`: `F` with `h` replaced by its cubic lower bound.
pub fn sufficient_g(p: f64, n: usize) -> Result<Ineq> {
    check_fg("sufficient_G", p, n)?;
    Ok(Ineq::new(
        "G",
        format!("n={n}"),
        p,
        h_cubic_bound(p) * tail_factor(n),
        Relation::Gt,
        1.0,
    ))
}

/// `|A_{n,p}(a) - A_{n,∞}(a)|` against `16/p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzGap {
    pub gap: f64,
    pub bound: f64,
    /// Combined error of the two volumes.
    pub err: f64,
    pub within: bool,
    pub finite_p: VolumeResult,
    pub infinite_p: VolumeResult,
}

fn volume_with_fallback(
    p: PExponent,
    a: &Direction,
    quad: &QuadSpec,
    mc: &McSpec,
) -> Result<VolumeResult> {
    match section_volume(p, a, Method::Quadrature, quad, mc) {
        Err(Error::NonConvergence(_)) => section_volume(p, a, Method::MonteCarlo, quad, mc),
        other => other,
    }
}

/// Quadrature for both sides (closed forms where they apply), Monte Carlo when the
/// quadrature does not converge. `within` requires `gap + err < 16/p`.
pub fn lipschitz_gap(p: f64, a: &Direction, quad: &QuadSpec, mc: &McSpec) -> Result<LipschitzGap> {
    require("lipschitz_gap", p, p > 8.0 && p.is_finite(), "8 < p < inf")?;
    let finite_p = volume_with_fallback(PExponent::new(p)?, a, quad, mc)?;
    let infinite_p = volume_with_fallback(PExponent::Infinity, a, quad, mc)?;
    let gap = (finite_p.value - infinite_p.value).abs();
    let err = finite_p.err_bound + infinite_p.err_bound;
    let bound = 16.0 / p;
    Ok(LipschitzGap {
        gap,
        bound,
        err,
        within: gap + err < bound,
        finite_p,
        infinite_p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

/// `A_{n,p}(a^(n))` against `A(a^(2)) = 2^{1-2/p}` at one `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingRow {
    pub n: usize,
    pub a_diag: VolumeResult,
    pub a_a2: f64,
    pub verdict: Verdict,
}

impl CrossingRow {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub p: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub per_n: Vec<CrossingRow>,
    pub first_n_holds: Option<usize>,
    /// Every examined `n >= first_n_holds` is certified.
    pub holds_for_all_tail: bool,
}

/// Certified comparison: `Holds` iff `value - err > A(a^(2))`, `Fails` iff
/// `value + err < A(a^(2))`, otherwise `Indeterminate`.
pub fn compare(a_diag: &VolumeResult, threshold: f64) -> Verdict {
    if a_diag.lower() > threshold {
        Verdict::Holds
    } else if a_diag.upper() < threshold {
        Verdict::Fails
    } else {
        Verdict::Indeterminate
    }
}

/// Scans `n = 3..=n_max`.
pub fn crossing_scan(p: f64, n_max: usize, quad: &QuadSpec) -> Result<CrossingReport> {
    crossing_scan_range(p, 3, n_max, quad)
}

pub fn crossing_scan_range(
    p: f64,
    n_min: usize,
    n_max: usize,
    quad: &QuadSpec,
) -> Result<CrossingReport> {
    require("crossing_scan", p, p > 2.0 && p.is_finite(), "2 < p < inf")?;
    if n_min < 3 || n_max < n_min {
        return Err(Error::Dimension(format!(
            "scan range {n_min}..={n_max} must start at 3 or above"
        )));
    }
    let pe = PExponent::new(p)?;
    let a_a2 = a2_closed_form(pe);
    let per_n: Vec<CrossingRow> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let a_diag = section_volume_quadrature(pe, &Direction::diagonal(n, n)?, quad)?;
            let verdict = compare(&a_diag, a_a2);
            Ok(CrossingRow {
                n,
                a_diag,
                a_a2,
                verdict,
            })
        })
        .collect::<Result<_>>()?;
    let first = per_n.iter().position(CrossingRow::holds);
    Ok(CrossingReport {
        p,
        n_min,
        n_max,
        first_n_holds: first.map(|i| per_n[i].n),
        holds_for_all_tail: first.is_some_and(|i| per_n[i..].iter().all(CrossingRow::holds)),
        per_n,
    })
}

/// Named breakpoints included in every inequality grid.
pub const BREAKPOINTS: [f64; 6] = [4.0, 7.0, 9.0, 13.78, 26.265, 140.0];

/// 400 log-spaced points on `[lo, hi]`, the integers in range, and the [`BREAKPOINTS`]
/// in range; sorted without duplicates.
pub fn p_grid(lo: f64, hi: f64) -> Vec<f64> {
    let m = 400;
    let mut g: Vec<f64> = (0..=m)
        .map(|i| lo * (hi / lo).powf(i as f64 / m as f64))
        .collect();
    g.extend((lo.ceil() as u64..=hi.floor() as u64).map(|k| k as f64));
    g.extend(BREAKPOINTS.iter().copied().filter(|&b| b >= lo && b <= hi));
    g.push(hi);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `f` on `[4, 1000]`, `g` monotone on `[7, 1000]` (derivative sign and consecutive
/// differences), the stated `g` values, `h > 1` on `(2, 1000]` and the cubic bound on
/// `[9, 1000]`.
pub fn lemma1_suite() -> Result<Vec<Ineq>> {
    let mut out = Vec::new();
    for p in p_grid(4.0, 1000.0) {
        out.push(lemma1_f(p)?);
    }
    let g_grid = p_grid(7.0, 1000.0);
    for p in &g_grid {
        out.push(lemma1_g(*p)?);
    }
    for w in g_grid.windows(2) {
        out.push(Ineq::new(
            "g_step",
            format!("g({}) vs g({})", w[0], w[1]),
            w[1],
            g_ratio(w[0]),
            Relation::Ge,
            g_ratio(w[1]),
        ));
    }
    out.extend(lemma1_g_values());
    for p in p_grid(2.0, 1000.0).into_iter().filter(|&p| p > 2.0) {
        out.extend(lemma1_h(p)?);
    }
    Ok(out)
}

/// `G(p, ⌈5p/2⌉) > 1` on `[9, 500]` and `G(p, ⌈p⌉) > 1` on `[140, 500]`.
pub fn sufficient_suite() -> Result<Vec<Ineq>> {
    let mut out = Vec::new();
    for p in p_grid(9.0, 500.0) {
        out.push(sufficient_g(p, (2.5 * p).ceil() as usize)?);
    }
    for p in p_grid(140.0, 500.0) {
        out.push(sufficient_g(p, p.ceil() as usize)?);
    }
    Ok(out)
}

/// Largest engine error accepted on either side of a Lipschitz row.
pub const LIPSCHITZ_ERR_MAX: f64 = 1e-4;

/// Lipschitz rows for `p ∈ {16, 32, 64}` and `a ∈ {a^(2), a^(3), a^(5)}` (each padded to
/// dimension 5).
pub fn lipschitz_suite(quad: &QuadSpec, mc: &McSpec) -> Result<Vec<Ineq>> {
    let mut out = Vec::new();
    for p in [16.0, 32.0, 64.0] {
        for k in [2, 3, 5] {
            let g = lipschitz_gap(p, &Direction::diagonal(k, 5)?, quad, mc)?;
            out.push(Ineq::new(
                "lipschitz",
                format!("a=a^({k})"),
                p,
                g.gap + g.err,
                Relation::Lt,
                g.bound,
            ));
            let worst = g.finite_p.err_bound.max(g.infinite_p.err_bound);
            out.push(Ineq::new(
                "lipschitz_err",
                format!("a=a^({k})"),
                p,
                worst,
                Relation::Le,
                LIPSCHITZ_ERR_MAX,
            ));
        }
    }
    Ok(out)
}
