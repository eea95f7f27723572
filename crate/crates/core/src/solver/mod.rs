//! Linear solvers for the assembled (nonsymmetric) systems.

mod direct;
mod gmres;
mod ilu;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use direct::{solve_direct, DIRECT_RESIDUAL_LIMIT};
pub use gmres::{solve_iterative, GMRES_RESTART};
pub use ilu::Ilu0;

use crate::error::Result;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Direct,
    Gmres,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Direct => "direct",
            SolverKind::Gmres => "gmres",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct" => Ok(SolverKind::Direct),
            "gmres" => Ok(SolverKind::Gmres),
            other => Err(format!("unknown solver '{other}' (expected direct or gmres)")),
        }
    }
}

/// Solver selection plus the iterative controls (ignored by the direct solver).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub kind: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Direct,
            tol: 1e-10,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// `||Ax - b||_inf / ||b||_inf`.
    pub residual: f64,
    /// Inner GMRES iterations; 0 for the direct solver.
    pub iterations: usize,
    pub method: SolverKind,
}

pub fn solve(matrix: &CsrMatrix, rhs: &[f64], options: &SolverOptions) -> Result<SolveReport> {
    match options.kind {
        SolverKind::Direct => solve_direct(matrix, rhs),
        SolverKind::Gmres => solve_iterative(matrix, rhs, options.tol, options.max_iter),
    }
}
