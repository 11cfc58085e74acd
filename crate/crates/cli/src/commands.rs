use clap::{Args, Subcommand, ValueEnum};
use polyslice::analysis::{self, Ineq, Method};
use polyslice::hankel::gamma_kernel;
use polyslice::montecarlo::{clt_experiment, clt_slope};
use polyslice::optimize::{maximize_direction, OptConfig};
use polyslice::{Direction, McSpec, PExponent, QuadSpec, Result, VolumeResult};
use serde_json::{json, Value};

use crate::output::{headers, num, opt_num, p_cell, p_json, Report};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = crate::output::Format::Csv, global = true)]
    pub format: crate::output::Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output_path: Option<std::path::PathBuf>,
    /// Seed for every random stream.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Absolute error target (quadrature) or simplex diameter (optimize).
    #[arg(long, default_value_t = 1e-8, value_parser = positive_f64, global = true)]
    pub tol: f64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(2..), global = true)]
    pub samples: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Section volume A_{n,p}(a) for one direction.
    Volume(VolumeArgs),
    /// Table of the kernel gamma_p(s) on a uniform grid.
    Kernel(KernelArgs),
    /// Diagonal against a^(2) for n up to n-max.
    Crossing(CrossingArgs),
    /// Inequality suites; exits 1 on any violation.
    Verify(VerifyArgs),
    /// Convergence of E|X_n|^{-2} to its Gaussian limit.
    Clt(CltArgs),
    /// Multi-start search for a maximal-section direction.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Quad,
    Mc,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchEngine {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("direction").required(true).args(["a", "diag", "a2"]))]
pub struct VolumeArgs {
    /// Exponent p >= 1 or `inf`.
    #[arg(long, value_parser = parse_p)]
    pub p: PExponent,
    /// Comma-separated moduli; normalized to a unit vector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Main diagonal a^(n) in dimension n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub diag: Option<u64>,
    /// a^(2) zero padded to dimension n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub a2: Option<u64>,
    #[arg(long, value_enum)]
    pub engine: Engine,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_parser = parse_p)]
    pub p: PExponent,
    /// Last grid point (inclusive when hit exactly).
    #[arg(long, value_parser = nonnegative_f64)]
    pub s_max: f64,
    #[arg(long, value_parser = positive_f64)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CrossingArgs {
    /// Finite exponent p > 2.
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    Lipschitz,
    Sufficient,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lipschitz => "lipschitz",
            Suite::Sufficient => "sufficient",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Debug, Clone, Args)]
pub struct CltArgs {
    /// Finite exponent p >= 1.
    #[arg(long, value_parser = parse_p)]
    pub p: PExponent,
    /// Comma-separated dimensions, each at least 2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_parser = parse_p)]
    pub p: PExponent,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub engine: SearchEngine,
    /// Total objective evaluations across all starts.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

fn parse_p(s: &str) -> std::result::Result<PExponent, String> {
    s.parse::<PExponent>().map_err(|e| e.to_string())
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} must be positive and finite")),
        Err(e) => Err(e.to_string()),
    }
}

fn nonnegative_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} must be non-negative and finite")),
        Err(e) => Err(e.to_string()),
    }
}

/// A rendered report plus whether any asserted check failed.
pub struct Outcome {
    pub report: Report,
    pub failed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            failed: false,
        }
    }
}

pub fn run(cmd: &Command, c: &Common) -> Result<Outcome> {
    match cmd {
        Command::Volume(a) => volume(a, c).map(Into::into),
        Command::Kernel(a) => kernel(a, c).map(Into::into),
        Command::Crossing(a) => crossing(a, c).map(Into::into),
        Command::Verify(a) => verify(a, c),
        Command::Clt(a) => clt(a, c).map(Into::into),
        Command::Optimize(a) => optimize(a, c).map(Into::into),
    }
}

fn mc_spec(c: &Common) -> McSpec {
    McSpec::new(c.samples, c.seed)
}

fn a_spec(d: &Direction) -> String {
    d.entries()
        .iter()
        .map(|&x| num(x))
        .collect::<Vec<_>>()
        .join(";")
}

fn volume(args: &VolumeArgs, c: &Common) -> Result<Report> {
    let dir = match (&args.a, args.diag, args.a2) {
        (Some(a), _, _) => Direction::new(a)?,
        (_, Some(n), _) => Direction::diagonal(n as usize, n as usize)?,
        (_, _, Some(n)) => Direction::diagonal(2, n as usize)?,
        _ => unreachable!("clap enforces one direction flag"),
    };
    let method = match args.engine {
        Engine::Quad => Method::Quadrature,
        Engine::Mc => Method::MonteCarlo,
        Engine::Closed => Method::ClosedForm,
    };
    let r = analysis::section_volume(args.p, &dir, method, &QuadSpec::new(c.tol), &mc_spec(c))?;
    let row = vec![
        r.engine.to_string(),
        p_cell(args.p),
        dir.dim().to_string(),
        a_spec(&dir),
        num(r.value),
        num(r.err_bound),
        opt_num(r.meta.samples),
        opt_num(r.meta.seed),
    ];
    let json = json!({
        "command": "volume",
        "rows": [{
            "engine": r.engine,
            "p": p_json(args.p),
            "n": dir.dim(),
            "a_spec": a_spec(&dir),
            "value": r.value,
            "err_bound": r.err_bound,
            "samples": r.meta.samples,
            "seed": r.meta.seed,
            "meta": r.meta,
        }],
    });
    Ok(Report {
        header: headers::VOLUME,
        rows: vec![row],
        json,
    })
}

const KERNEL_MAX_ROWS: f64 = 1e6;

fn kernel(args: &KernelArgs, c: &Common) -> Result<Report> {
    let count = (args.s_max / args.step * (1.0 + 1e-12)).floor();
    if count >= KERNEL_MAX_ROWS {
        return Err(polyslice::Error::InvalidSpec(format!(
            "s-max / step = {count} exceeds {KERNEL_MAX_ROWS} rows"
        )));
    }
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for i in 0..=count as usize {
        let s = i as f64 * args.step;
        let k = gamma_kernel(args.p, s, c.tol)?;
        rows.push(vec![p_cell(args.p), num(s), num(k.value), num(k.err_bound)]);
        items.push(json!({"s": s, "gamma": k.value, "err_bound": k.err_bound}));
    }
    Ok(Report {
        header: headers::KERNEL,
        rows,
        json: json!({"command": "kernel", "p": p_json(args.p), "rows": items}),
    })
}

fn crossing(args: &CrossingArgs, c: &Common) -> Result<Report> {
    let rep = analysis::crossing_scan_range(args.p, args.n_min, args.n_max, &QuadSpec::new(c.tol))?;
    let rows = rep
        .per_n
        .iter()
        .map(|r| {
            vec![
                num(rep.p),
                r.n.to_string(),
                num(r.a_diag.value),
                num(r.a_diag.err_bound),
                num(r.a_a2),
                verdict_name(r.verdict).to_string(),
            ]
        })
        .collect();
    let items: Vec<Value> = rep
        .per_n
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "a_diag": r.a_diag.value,
                "err_bound": r.a_diag.err_bound,
                "a_a2": r.a_a2,
                "verdict": r.verdict,
            })
        })
        .collect();
    Ok(Report {
        header: headers::CROSSING,
        rows,
        json: json!({
            "command": "crossing",
            "p": rep.p,
            "n_min": rep.n_min,
            "n_max": rep.n_max,
            "first_n_holds": rep.first_n_holds,
            "holds_for_all_tail": rep.holds_for_all_tail,
            "rows": items,
        }),
    })
}

fn verdict_name(v: analysis::Verdict) -> &'static str {
    match v {
        analysis::Verdict::Holds => "holds",
        analysis::Verdict::Fails => "fails",
        analysis::Verdict::Indeterminate => "indeterminate",
    }
}

fn verify(args: &VerifyArgs, c: &Common) -> Result<Outcome> {
    let mut tagged: Vec<(&'static str, Ineq)> = Vec::new();
    let wants = |s: Suite| args.suite == s || args.suite == Suite::All;
    if wants(Suite::Lemma1) {
        tagged.extend(analysis::lemma1_suite()?.into_iter().map(|i| ("lemma1", i)));
    }
    if wants(Suite::Lipschitz) {
        let rows = analysis::lipschitz_suite(&QuadSpec::new(c.tol), &mc_spec(c))?;
        tagged.extend(rows.into_iter().map(|i| ("lipschitz", i)));
    }
    if wants(Suite::Sufficient) {
        tagged.extend(
            analysis::sufficient_suite()?
                .into_iter()
                .map(|i| ("sufficient", i)),
        );
    }
    let violations = tagged.iter().filter(|(_, i)| i.violated()).count();
    let rows = tagged
        .iter()
        .map(|(s, i)| {
            vec![
                s.to_string(),
                i.name.clone(),
                i.case.clone(),
                num(i.p),
                num(i.lhs),
                i.relation.symbol().to_string(),
                num(i.rhs),
                i.satisfied.to_string(),
                num(i.margin),
                i.required.to_string(),
            ]
        })
        .collect();
    let items: Vec<Value> = tagged
        .iter()
        .map(|(s, i)| {
            json!({
                "suite": s,
                "name": i.name,
                "case": i.case,
                "p": i.p,
                "lhs": i.lhs,
                "relation": i.relation.symbol(),
                "rhs": i.rhs,
                "satisfied": i.satisfied,
                "margin": i.margin,
                "required": i.required,
            })
        })
        .collect();
    Ok(Outcome {
        report: Report {
            header: headers::VERIFY,
            rows,
            json: json!({
                "command": "verify",
                "suite": args.suite.name(),
                "violations": violations,
                "rows": items,
            }),
        },
        failed: violations > 0,
    })
}

fn clt(args: &CltArgs, c: &Common) -> Result<Report> {
    let rows = clt_experiment(args.p, &args.n_list, &mc_spec(c))?;
    let slope = if rows.len() >= 2 {
        Some(clt_slope(&rows))
    } else {
        None
    };
    let table = rows
        .iter()
        .map(|r| {
            vec![
                p_cell(args.p),
                r.n.to_string(),
                num(r.estimate),
                num(r.std_err),
                num(r.target),
                num((r.estimate - r.target).abs()),
            ]
        })
        .collect();
    let items: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "estimate": r.estimate,
                "std_err": r.std_err,
                "target": r.target,
                "abs_dev": (r.estimate - r.target).abs(),
            })
        })
        .collect();
    Ok(Report {
        header: headers::CLT,
        rows: table,
        json: json!({
            "command": "clt",
            "p": p_json(args.p),
            "samples": c.samples,
            "seed": c.seed,
            "slope": slope,
            "rows": items,
        }),
    })
}

fn optimize(args: &OptimizeArgs, c: &Common) -> Result<Report> {
    let method = match args.engine {
        SearchEngine::Quad => Method::Quadrature,
        SearchEngine::Mc => Method::MonteCarlo,
    };
    let mut cfg = OptConfig::new(method, args.budget as usize, c.tol, c.seed);
    cfg.samples = c.samples;
    let rep = maximize_direction(args.p, args.n, &cfg)?;
    let v: &VolumeResult = &rep.best_value;
    let mut rows = vec![vec![
        "summary".to_string(),
        rep.iterations.to_string(),
        num(v.value),
        num(v.err_bound),
        a_spec(&rep.best),
        rep.converged.to_string(),
        rep.evaluations.to_string(),
    ]];
    rows.extend(rep.trace.iter().map(|t| {
        vec![
            "trace".to_string(),
            t.iteration.to_string(),
            num(t.value),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]
    }));
    Ok(Report {
        header: headers::OPTIMIZE,
        rows,
        json: json!({
            "command": "optimize",
            "p": p_json(args.p),
            "n": args.n,
            "engine": v.engine,
            "best": rep.best.entries(),
            "best_value": v.value,
            "err_bound": v.err_bound,
            "iterations": rep.iterations,
            "evaluations": rep.evaluations,
            "converged": rep.converged,
            "rows": rep.trace,
        }),
    })
}
