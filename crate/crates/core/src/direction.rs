//! Canonical unit directions `a ∈ S^{n-1}`.
//!
//! Section volumes depend only on the multiset `{|a_j|}`, so a [`Direction`] stores
//! nonnegative moduli sorted in descending order with unit Euclidean norm.

use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

/// Tolerance on `|Σ a_j² - 1|` for inputs claimed to be unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Direction {
    entries: Vec<f64>,
}

impl Direction {
    /// Takes moduli, sorts them descending and rescales to unit norm.
    pub fn new(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension(
                "direction needs at least one entry".into(),
            ));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Normalization("non-finite direction entry".into()));
        }
        let mut m: Vec<f64> = entries.iter().map(|x| x.abs()).collect();
        let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Normalization("zero vector has no direction".into()));
        }
        m.iter_mut().for_each(|x| *x /= norm);
        m.sort_by(|a, b| b.total_cmp(a));
        Ok(Direction { entries: m })
    }

    /// Like [`Direction::new`] but rejects inputs that are not unit vectors.
    pub fn from_unit(entries: &[f64]) -> Result<Self> {
        let sq: f64 = entries.iter().map(|x| x * x).sum();
        if !((sq - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::Normalization(format!(
                "sum of squares {sq} differs from 1 by more than {UNIT_TOL:e}"
            )));
        }
        Self::new(entries)
    }

    /// Direction of the complex vector with the given real and imaginary parts.
    pub fn from_complex(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::Dimension(format!(
                "real part has {} entries, imaginary part {}",
                re.len(),
                im.len()
            )));
        }
        let moduli: Vec<f64> = re.iter().zip(im).map(|(x, y)| x.hypot(*y)).collect();
        Self::new(&moduli)
    }

    /// `a^(k)` padded with zeros to length `n`.
    pub fn diagonal(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Dimension(format!(
                "a^({k}) does not fit in dimension {n}"
            )));
        }
        let v = 1.0 / (k as f64).sqrt();
        let mut entries = vec![0.0; n];
        entries[..k].fill(v);
        Ok(Direction { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn nonzero(&self) -> &[f64] {
        let m = self.entries.iter().take_while(|&&x| x > 0.0).count();
        &self.entries[..m]
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero().len()
    }

    /// Distinct nonzero moduli with multiplicities, largest first.
    pub fn groups(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &x in self.nonzero() {
            match out.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// Simplex weights `w_j = a_j²`.
    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|x| x * x).collect()
    }

    /// Zero-pads to dimension `n` (no-op if already at least `n`).
    pub fn padded(&self, n: usize) -> Self {
        let mut entries = self.entries.clone();
        if entries.len() < n {
            entries.resize(n, 0.0);
        }
        Direction { entries }
    }

    /// Euclidean distance between two directions after padding to a common length.
    pub fn distance(&self, other: &Direction) -> f64 {
        let n = self.dim().max(other.dim());
        let (a, b) = (self.padded(n), other.padded(n));
        a.entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}
