//! Rational (reduced) homology ranks of a chain complex.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::sparse;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub degree: i64,
    /// `dim C_p`
    pub chain_rank: usize,
    /// `rank ∂_p`
    pub boundary_rank: usize,
    pub betti: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    /// Which complex this is, e.g. `Δ_{1,4}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub reduced: bool,
    /// Set when the complex has no cells at all; in reduced mode its only
    /// homology is in degree -1.
    pub empty_complex: bool,
    pub rows: Vec<BettiRow>,
    pub euler_characteristic: i64,
}

impl BettiTable {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn betti(&self, degree: i64) -> usize {
        self.rows.iter().find(|r| r.degree == degree).map_or(0, |r| r.betti)
    }

    /// Degrees with nonzero Betti number.
    pub fn support(&self) -> Vec<i64> {
        self.rows.iter().filter(|r| r.betti > 0).map(|r| r.degree).collect()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.betti).sum()
    }

    /// `Σ (-1)^p b_p`; agrees with `euler_characteristic` by construction.
    pub fn alternating_sum(&self) -> i64 {
        self.rows.iter().map(|r| sign(r.degree) * r.betti as i64).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("betti tables serialize")
    }
}

fn sign(p: i64) -> i64 {
    if p.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            writeln!(f, "{label}")?;
        }
        let b = if self.reduced { "reduced b" } else { "b" };
        writeln!(f, "{:>6}  {:>10}  {:>10}  {:>10}", "degree", "dim C_p", "rank d_p", b)?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6}  {:>10}  {:>10}  {:>10}",
                r.degree, r.chain_rank, r.boundary_rank, r.betti
            )?;
        }
        if self.empty_complex {
            writeln!(f, "(empty complex)")?;
        }
        write!(f, "euler characteristic: {}", self.euler_characteristic)
    }
}

/// Computes all Betti numbers, ranking the boundary matrices in parallel.
pub fn betti(complex: &ChainComplex) -> Result<BettiTable> {
    let ranks: Vec<usize> = complex.boundaries().par_iter().map(sparse::rank).collect();
    let bottom = complex.bottom_degree();
    let top = complex.top_degree().map_or(-1, |t| t as i64);
    let rank_of = |p: i64| -> usize {
        if p < 0 {
            0
        } else {
            ranks.get(p as usize).copied().unwrap_or(0)
        }
    };
    let mut rows = Vec::new();
    for p in bottom..=top {
        let dim = complex.dim(p);
        let cycles = dim
            .checked_sub(rank_of(p))
            .ok_or_else(|| Error::Integrity(format!("rank of the boundary in degree {p} exceeds the chain rank")))?;
        let betti = cycles
            .checked_sub(rank_of(p + 1))
            .ok_or_else(|| Error::Integrity(format!("negative Betti number in degree {p}")))?;
        rows.push(BettiRow {
            degree: p,
            chain_rank: dim,
            boundary_rank: rank_of(p),
            betti,
        });
    }
    let table = BettiTable {
        label: None,
        reduced: complex.is_reduced(),
        empty_complex: complex.is_empty(),
        euler_characteristic: complex.euler_characteristic(),
        rows,
    };
    if table.alternating_sum() != table.euler_characteristic {
        return Err(Error::Integrity(
            "Euler characteristic disagrees with the Betti numbers".into(),
        ));
    }
    Ok(table)
}
