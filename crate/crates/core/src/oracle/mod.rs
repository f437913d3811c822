//! Independent path to the free energy: the shifted Virasoro and `W^(3)`
//! constraints acting on `e^F`, an order-by-order solver, and the master equations.
//!
//! Only the exact-algebra layer is shared with the residue recursion.

mod free_energy;
mod master;
mod operator;
mod tpoly;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;

pub use free_energy::{key_of, residual_level, solve_f, TruncatedFreeEnergy};
pub use master::{master_equation_residual, project, residue_form_of_projection, MasterEquations};
pub use operator::{ExpCache, OpTerm, Operator};
pub use tpoly::{TMonomial, TPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("fractional power of u in residual monomial {monomial} of mode {mode}")]
    FractionalU { monomial: String, mode: u32 },
    #[error(
        "inconsistent constraints at level {level}, mode {mode}: monomial {monomial} \
         forced to {forced} but integrates to {integrated}"
    )]
    Inconsistent {
        level: u32,
        mode: u32,
        monomial: String,
        forced: String,
        integrated: String,
    },
    #[error("monomial {0} violates sum k = 6h - 6 + 3n")]
    Inhomogeneous(String),
    #[error("monomial {monomial} lies outside budget {budget}")]
    OutOfBudget { monomial: String, budget: u32 },
    #[error("not a canonical correlator: {0}")]
    NonCanonical(String),
    #[error("projection index must be 2 or 3, got {0}")]
    BadProjection(u8),
}

/// Which shifted constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Constraint {
    L,
    M,
}

impl Constraint {
    pub fn operator(self, k: i64, d: u32) -> Operator {
        match self {
            Constraint::L => Operator::l_hat(k, d),
            Constraint::M => Operator::m_hat(k, d),
        }
    }

    /// Mode `j` of the leading `-J_j` term.
    pub fn mode(self, k: i64) -> i64 {
        match self {
            Constraint::L => 2 * k + 3,
            Constraint::M => 2 * k + 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Constraint::L => "L^",
            Constraint::M => "M^",
        }
    }
}

/// `e^{-F} C_k e^F` restricted to residual levels `<= budget`.
pub fn constraint_residual(c: Constraint, k: i64, f: &TruncatedFreeEnergy) -> Result<TPoly, OracleError> {
    let mode = c.mode(k);
    if mode <= 0 {
        return Err(OracleError::NonCanonical(format!("{}_{k} has no leading mode", c.symbol())));
    }
    let d = f.max_index().max(f.poly().max_index());
    let op = c.operator(k, d);
    let budget = f.budget() as i64;
    let mut bad = None;
    let r = op.apply_exp(f.poly(), |m| match residual_level(m, mode as u32) {
        Ok(l) => l <= budget,
        Err(e) => {
            bad.get_or_insert(e);
            false
        }
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

pub fn apply_lhat(k: i64, f: &TruncatedFreeEnergy) -> Result<TPoly, OracleError> {
    constraint_residual(Constraint::L, k, f)
}

pub fn apply_mhat(k: i64, f: &TruncatedFreeEnergy) -> Result<TPoly, OracleError> {
    constraint_residual(Constraint::M, k, f)
}

/// One row of a residual report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualRow {
    pub operator: String,
    pub k: i64,
    /// Number of surviving terms.
    pub terms: usize,
    /// Largest `t`-degree among surviving terms, `None` when the residual vanishes.
    pub max_degree: Option<usize>,
}

impl ResidualRow {
    pub fn vanishes(&self) -> bool {
        self.terms == 0
    }
}

/// Residuals of `L^_k` and `M^_k` for `k` in `ks`.
pub fn residual_report(
    f: &TruncatedFreeEnergy,
    ks: impl IntoIterator<Item = i64> + Clone,
) -> Result<Vec<ResidualRow>, OracleError> {
    let mut rows = Vec::new();
    for c in [Constraint::L, Constraint::M] {
        for k in ks.clone() {
            let r = constraint_residual(c, k, f)?;
            rows.push(ResidualRow {
                operator: c.symbol().to_string(),
                k,
                terms: r.len(),
                max_degree: r.terms().map(|(m, _)| m.degree()).max(),
            });
        }
    }
    Ok(rows)
}

/// Plain-text table with one line per operator and `k`.
pub fn render_residual_table(rows: &[ResidualRow]) -> String {
    let mut out = String::from("operator  k  residual\n");
    for r in rows {
        let status = match r.max_degree {
            None => "0".to_string(),
            Some(d) => format!("{} terms, max degree {d}", r.terms),
        };
        let _ = writeln!(out, "{:<8}  {:>2}  {status}", r.operator, r.k);
    }
    out
}
