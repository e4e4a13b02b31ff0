//! One entry point over all solvers, plus serializable views of the results
//! in the market's own indexing (1-based input order) and utility scale.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, CanonicalMarket, Portfolio};
use crate::error::{Error, RefusalReason, Result};
use crate::heterogeneous::{branch_and_bound, dp_costs, fptas, simulated_annealing, SaParams};
use crate::homogeneous::{frontier, greedy_optimal, CandidateStore, Frontier};
use crate::market::Market;
use crate::report::{Certificate, SolveReport, SolveStats, Solver};

/// Solver selection. `Auto` uses greedy for unit costs, the cost DP for
/// integral costs, and the FPTAS otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Auto,
    Greedy,
    Bnb,
    Dp,
    Fptas,
    Sa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Auto,
        Algorithm::Greedy,
        Algorithm::Bnb,
        Algorithm::Dp,
        Algorithm::Fptas,
        Algorithm::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Greedy => "greedy",
            Algorithm::Bnb => "bnb",
            Algorithm::Dp => "dp",
            Algorithm::Fptas => "fptas",
            Algorithm::Sa => "sa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::invalid_at(
                    "algorithm",
                    format!("unknown algorithm {s:?}; expected auto, greedy, bnb, dp, fptas or sa"),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    /// FPTAS tolerance.
    pub epsilon: f64,
    pub sa: SaParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            algorithm: Algorithm::Auto,
            epsilon: 0.05,
            sa: SaParams::default(),
        }
    }
}

/// A solver run on the canonical form of a market.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub canonical: CanonicalMarket,
    pub report: SolveReport,
    /// Entry order (canonical positions) when the greedy solver ran.
    pub entry_order: Option<Vec<usize>>,
}

impl Solution {
    /// Value on the market's original utility scale.
    pub fn value(&self) -> f64 {
        self.report.value() + self.canonical.shift()
    }

    /// Input indices (0-based) of the chosen schools, ascending.
    pub fn ids(&self) -> Vec<usize> {
        self.report.portfolio.ids(&self.canonical)
    }
}

fn integral(x: f64) -> bool {
    x.fract() == 0.0
}

fn empty_report(solver: Solver) -> SolveReport {
    SolveReport {
        solver,
        portfolio: Portfolio::empty(),
        certificate: Certificate::Exact,
        stats: SolveStats::default(),
        wall_time: Duration::ZERO,
    }
}

fn resolve(market: &CanonicalMarket, algorithm: Algorithm) -> Algorithm {
    match algorithm {
        Algorithm::Auto if market.has_unit_costs() => Algorithm::Greedy,
        Algorithm::Auto if market.g().iter().all(|&g| integral(g)) && integral(market.budget()) => {
            Algorithm::Dp
        }
        Algorithm::Auto => Algorithm::Fptas,
        a => a,
    }
}

fn solver_of(algorithm: Algorithm) -> Solver {
    match algorithm {
        Algorithm::Auto | Algorithm::Greedy => Solver::Greedy,
        Algorithm::Bnb => Solver::BranchAndBound,
        Algorithm::Dp => Solver::DpCosts,
        Algorithm::Fptas => Solver::Fptas,
        Algorithm::Sa => Solver::SimulatedAnnealing,
    }
}

/// Runs the selected solver on an already canonical market.
pub fn solve_canonical(market: &CanonicalMarket, options: &SolveOptions) -> Result<Solution> {
    let algorithm = resolve(market, options.algorithm);
    // Validate parameters even when the market is trivial.
    match algorithm {
        Algorithm::Fptas if !(options.epsilon > 0.0 && options.epsilon < 1.0) => {
            return Err(Error::invalid_at(
                "epsilon",
                format!("tolerance must lie in (0, 1), got {}", options.epsilon),
            ));
        }
        Algorithm::Sa => options.sa.validate()?,
        _ => {}
    }
    if market.is_trivial() {
        return Ok(Solution {
            canonical: market.clone(),
            report: empty_report(solver_of(algorithm)),
            entry_order: (algorithm == Algorithm::Greedy).then(Vec::new),
        });
    }

    let mut entry_order = None;
    let report = match algorithm {
        Algorithm::Greedy => {
            if !market.has_unit_costs() {
                return Err(Error::refused(
                    RefusalReason::NotHomogeneous,
                    "greedy needs every application cost to equal 1; use dp, fptas or bnb",
                ));
            }
            let started = Instant::now();
            let h = (market.budget().floor() as usize).min(market.len());
            let front = greedy_optimal(market, h, CandidateStore::List)?;
            let portfolio = front.portfolio(h);
            entry_order = Some(front.order);
            SolveReport {
                solver: Solver::Greedy,
                portfolio,
                certificate: Certificate::Exact,
                stats: SolveStats {
                    iterations: Some(h as u64),
                    ..SolveStats::default()
                },
                wall_time: started.elapsed(),
            }
        }
        Algorithm::Bnb => branch_and_bound(market)?,
        Algorithm::Dp => match (options.algorithm, dp_costs(market)) {
            // Auto falls through to the FPTAS when the DP table is too large.
            (Algorithm::Auto, Err(e)) if e.refusal() == Some(RefusalReason::MemoryBudget) => {
                fptas(market, options.epsilon)?
            }
            (_, r) => r?,
        },
        Algorithm::Fptas => fptas(market, options.epsilon)?,
        Algorithm::Sa => simulated_annealing(market, &options.sa)?,
        Algorithm::Auto => unreachable!("auto is resolved above"),
    };
    Ok(Solution {
        canonical: market.clone(),
        report,
        entry_order,
    })
}

/// Validates, canonicalizes and solves.
pub fn solve(market: &Market, options: &SolveOptions) -> Result<Solution> {
    market.validate()?;
    solve_canonical(&canonicalize(market)?, options)
}

/// The nested frontier of a unit-cost market. The budget is ignored: every
/// useful school appears.
pub fn solve_frontier(market: &Market) -> Result<(CanonicalMarket, Frontier)> {
    market.validate()?;
    if let Some(i) = market.schools.iter().position(|s| s.g != 1.0) {
        return Err(Error::refused(
            RefusalReason::NotHomogeneous,
            format!(
                "the frontier needs unit application costs; school {} costs {}",
                i + 1,
                market.schools[i].g
            ),
        ));
    }
    let mut all = market.clone();
    all.budget = (market.len() as f64).max(1.0);
    let canonical = canonicalize(&all)?;
    let front = frontier(&canonical);
    Ok((canonical, front))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttendanceEntry {
    /// 1-based input index.
    pub school: usize,
    pub label: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttendanceView {
    /// Probability of attending no school.
    pub none: f64,
    pub schools: Vec<AttendanceEntry>,
}

/// A solve result in input indexing and the original utility scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportView {
    pub algorithm: String,
    /// 1-based input indices, ascending.
    pub portfolio: Vec<usize>,
    pub labels: Vec<String>,
    /// Expected utility including the outside option.
    pub value: f64,
    /// `value - t0`.
    pub canonical_value: f64,
    pub cost: f64,
    pub budget: f64,
    pub certificate: Certificate,
    pub attendance: AttendanceView,
    /// 1-based indices in the order greedy added them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_order: Option<Vec<usize>>,
    pub stats: SolveStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ReportView {
    /// `ids` are 0-based input indices; `canonical_value` is the portfolio's
    /// value with the outside option at zero.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        market: &Market,
        canonical: &CanonicalMarket,
        ids: &[usize],
        canonical_value: f64,
        report: &SolveReport,
        entry_order: Option<&[usize]>,
        with_time: bool,
    ) -> Result<Self> {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        let positions: Vec<usize> = ids
            .iter()
            .filter_map(|&i| canonical.position_of(i))
            .collect();
        let dist = canonical.attendance(&positions)?;
        let attendance = AttendanceView {
            none: dist.none(),
            schools: ids
                .iter()
                .map(|&i| AttendanceEntry {
                    school: i + 1,
                    label: market.name(i),
                    probability: canonical.position_of(i).map_or(0.0, |j| dist.school(j)),
                })
                .collect(),
        };
        Ok(ReportView {
            algorithm: report.solver.name().to_string(),
            portfolio: ids.iter().map(|i| i + 1).collect(),
            labels: ids.iter().map(|&i| market.name(i)).collect(),
            value: canonical_value + canonical.shift(),
            canonical_value,
            cost: market.cost(&ids),
            budget: market.budget,
            certificate: report.certificate,
            attendance,
            entry_order: entry_order
                .map(|order| order.iter().map(|&j| canonical.ids()[j] + 1).collect()),
            stats: report.stats,
            wall_time_ms: with_time.then_some(report.wall_time.as_secs_f64() * 1e3),
        })
    }

    pub fn from_solution(market: &Market, solution: &Solution, with_time: bool) -> Result<Self> {
        ReportView::assemble(
            market,
            &solution.canonical,
            &solution.ids(),
            solution.report.value(),
            &solution.report,
            solution.entry_order.as_deref(),
            with_time,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    /// Number of applications.
    pub h: usize,
    /// 1-based index of the school entering at this step.
    pub school: usize,
    pub label: String,
    /// Optimal value with `h` applications, original scale.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierView {
    /// 1-based indices in entry order.
    pub order: Vec<usize>,
    pub labels: Vec<String>,
    /// `values[h - 1]`: optimal value with `h` applications, original scale.
    pub values: Vec<f64>,
    pub points: Vec<FrontierPoint>,
}

impl FrontierView {
    pub fn new(market: &Market, canonical: &CanonicalMarket, front: &Frontier) -> Self {
        let shift = canonical.shift();
        let ids: Vec<usize> = front.order.iter().map(|&j| canonical.ids()[j]).collect();
        let values: Vec<f64> = front.values.iter().map(|v| v + shift).collect();
        let points = ids
            .iter()
            .zip(&values)
            .enumerate()
            .map(|(i, (&id, &value))| FrontierPoint {
                h: i + 1,
                school: id + 1,
                label: market.name(id),
                value,
            })
            .collect();
        FrontierView {
            order: ids.iter().map(|i| i + 1).collect(),
            labels: ids.iter().map(|&i| market.name(i)).collect(),
            values,
            points,
        }
    }
}
