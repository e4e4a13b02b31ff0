//! Solvers for markets where application costs differ.
//!
//! The problem is NP-complete, so there is no nested structure to exploit.
//! Four approaches are provided: best-first branch-and-bound with a
//! continuous-knapsack bound, an exact DP over integral expenditures, a
//! fixed-point DP over valuations that gives a `(1 - eps)` guarantee, and
//! simulated annealing.

mod anneal;
mod bnb;
mod dp;
mod fptas;
mod lp;

pub use anneal::{ratio_greedy, simulated_annealing, SaParams};
pub use bnb::{
    branch_and_bound, BnbNode, BnbOutcome, BnbSnapshot, BranchAndBound, DEFAULT_BNB_CAP,
};
pub use dp::{dp_costs, DpCell, DpCosts, DpValueTable, DEFAULT_DP_MEMORY_BYTES};
pub use fptas::{fptas, CostTable, FixedPointScale, Fptas, DEFAULT_FPTAS_MAX_CELLS};
pub use lp::lp_upper_bound;
