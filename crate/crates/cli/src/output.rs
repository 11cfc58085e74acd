use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use polyslice::PExponent;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Fixed CSV headers, one per subcommand. Mirrored in `schema/csv_headers.txt`.
pub mod headers {
    pub const VOLUME: &[&str] = &[
        "engine",
        "p",
        "n",
        "a_spec",
        "value",
        "err_bound",
        "samples",
        "seed",
    ];
    pub const KERNEL: &[&str] = &["p", "s", "gamma", "err_bound"];
    pub const CROSSING: &[&str] = &["p", "n", "a_diag", "err_bound", "a_a2", "verdict"];
    pub const VERIFY: &[&str] = &[
        "suite",
        "name",
        "case",
        "p",
        "lhs",
        "relation",
        "rhs",
        "satisfied",
        "margin",
        "required",
    ];
    pub const CLT: &[&str] = &["p", "n", "estimate", "std_err", "target", "abs_dev"];
    pub const OPTIMIZE: &[&str] = &[
        "row",
        "iteration",
        "value",
        "err_bound",
        "best",
        "converged",
        "evaluations",
    ];
}

/// A command result: the CSV table and the JSON document carry the same rows.
pub struct Report {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

/// Shortest decimal that parses back to the same `f64`; `inf`, `-inf` and `NaN`
/// for non-finite values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn p_cell(p: PExponent) -> String {
    match p {
        PExponent::Finite(q) => num(q),
        PExponent::Infinity => "inf".to_string(),
    }
}

pub fn p_json(p: PExponent) -> Value {
    match p {
        PExponent::Finite(q) => Value::from(q),
        PExponent::Infinity => Value::from("inf"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, std::f64::consts::SQRT_2, 1e-300, 2.0, 6.02e23, -3.5e-7] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(p_cell(PExponent::Infinity), "inf");
        assert_eq!(p_cell(PExponent::Finite(4.0)), "4.0");
    }

    #[test]
    fn csv_has_fixed_header_and_unix_newlines() {
        let r = Report {
            header: headers::KERNEL,
            rows: vec![vec!["4.0".into(), "0.0".into(), "1.0".into(), "0.0".into()]],
            json: Value::Null,
        };
        let s = String::from_utf8(r.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(s, "p,s,gamma,err_bound\n4.0,0.0,1.0,0.0\n");
    }
}
