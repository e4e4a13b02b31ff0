use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::canonical::Portfolio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Naive,
    Greedy,
    BranchAndBound,
    DpCosts,
    Fptas,
    SimulatedAnnealing,
    BruteForce,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Naive => "naive",
            Solver::Greedy => "greedy",
            Solver::BranchAndBound => "bnb",
            Solver::DpCosts => "dp",
            Solver::Fptas => "fptas",
            Solver::SimulatedAnnealing => "sa",
            Solver::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the caller may conclude about the returned value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Provably optimal.
    Exact,
    /// At least `(1 - epsilon)` times the optimum. `fixed_point_value` is the
    /// grid value the scheme certified (canonical scale); the exact value is
    /// never below it.
    Approximate {
        epsilon: f64,
        fixed_point_value: f64,
    },
    /// No guarantee.
    Heuristic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Branch-and-bound nodes expanded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    /// Annealing iterations or greedy steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    /// Dynamic-programming table entries filled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_cells: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solver: Solver,
    /// The returned portfolio, valued exactly on the canonical scale.
    pub portfolio: Portfolio,
    pub certificate: Certificate,
    pub stats: SolveStats,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn value(&self) -> f64 {
        self.portfolio.value
    }
}
