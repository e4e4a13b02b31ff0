//! Solvers for the college application problem: choose a set of schools to
//! apply to, each with a utility `t`, an admission probability `f` and an
//! application cost `g`, so as to maximize the expected utility of the best
//! school that admits you, subject to a budget.
//!
//! Admissions are independent. With schools sorted by utility, the value of
//! a portfolio `X` is `sum_{j in X} f_j t_j prod_{i in X, i > j} (1 - f_i)`.
//!
//! ```
//! use collegeapp::{solve, Market, SolveOptions};
//!
//! let market = Market::homogeneous(&[70.0, 80.0, 90.0], &[0.4, 0.4, 0.3], 2);
//! let solution = solve(&market, &SolveOptions::default()).unwrap();
//! assert_eq!(solution.ids(), vec![1, 2]);
//! assert!((solution.value() - 49.4).abs() < 1e-9);
//! ```

pub mod bench;
mod canonical;
mod error;
pub mod heterogeneous;
pub mod homogeneous;
pub mod instances;
mod market;
mod oracle;
mod report;
mod solve;
mod whatif;

pub use canonical::{
    canonicalize, AttendanceDistribution, CanonicalMarket, EliminationResult, Portfolio,
};
pub use error::{Error, RefusalReason, Result};
pub use market::{path_error, read_market, write_market, Market, School};
pub use oracle::{
    brute_force, brute_force_filtered, brute_force_with_cap, DEFAULT_BRUTE_FORCE_CAP,
};
pub use report::{Certificate, SolveReport, SolveStats, Solver};
pub use solve::{
    solve, solve_canonical, solve_frontier, Algorithm, AttendanceEntry, AttendanceView,
    FrontierPoint, FrontierView, ReportView, Solution, SolveOptions,
};
pub use whatif::{what_if, ResidualView, WhatIf, WhatIfView};
