//! Solving with some schools forced in or out.
//!
//! Forced-in schools are eliminated one by one (ascending utility), which
//! leaves a smaller market whose valuations, plus the accumulated offset,
//! equal valuations of portfolios containing all of them. That residual
//! market is solved with the remaining budget.

use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, fits, CanonicalMarket, EliminationResult};
use crate::error::{Error, RefusalReason, Result};
use crate::market::Market;
use crate::solve::{solve_canonical, ReportView, Solution, SolveOptions};

/// Outcome of a what-if query. Indices are 0-based input indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WhatIf {
    /// Full canonical market (locked-out schools removed).
    pub canonical: CanonicalMarket,
    /// `locked_in` together with the residual solution, ascending.
    pub members: Vec<usize>,
    /// Value of `members` with the outside option at zero.
    pub canonical_value: f64,
    /// Value secured by the locked-in schools.
    pub offset: f64,
    /// The residual market after elimination and its solution.
    pub residual: Solution,
}

impl WhatIf {
    /// Value on the original utility scale.
    pub fn value(&self) -> f64 {
        self.canonical_value + self.canonical.shift()
    }
}

fn check_ids(market: &Market, ids: &[usize], field: &str) -> Result<()> {
    for (k, &i) in ids.iter().enumerate() {
        if i >= market.len() {
            return Err(Error::invalid_at(
                format!("{field}[{k}]"),
                format!(
                    "school {} does not exist (market has {})",
                    i + 1,
                    market.len()
                ),
            ));
        }
    }
    Ok(())
}

pub fn what_if(
    market: &Market,
    locked_in: &[usize],
    locked_out: &[usize],
    options: &SolveOptions,
) -> Result<WhatIf> {
    market.validate()?;
    check_ids(market, locked_in, "locked_in")?;
    check_ids(market, locked_out, "locked_out")?;
    if let Some(&i) = locked_in.iter().find(|i| locked_out.contains(i)) {
        return Err(Error::invalid_at(
            "locked_in",
            format!("school {} is both locked in and locked out", i + 1),
        ));
    }
    let mut locked_in = locked_in.to_vec();
    locked_in.sort_unstable();
    locked_in.dedup();

    let committed = market.cost(&locked_in);
    if !fits(committed, market.budget) {
        return Err(Error::refused(
            RefusalReason::InfeasibleLocks,
            format!(
                "locked-in schools cost {committed}, more than the budget {}",
                market.budget
            ),
        ));
    }

    let canonical = canonicalize(market)?;
    let ids = canonical.ids().to_vec();
    let canonical = canonical.restrict(|j| !locked_out.contains(&ids[j]));

    // Schools that never help (t <= t0) are not in the canonical market;
    // they still spend budget.
    let mut eliminated = EliminationResult {
        reduced: canonical.clone(),
        offset: 0.0,
    };
    for j in 0..canonical.len() {
        let id = canonical.ids()[j];
        if locked_in.binary_search(&id).is_ok() {
            eliminated = eliminated.eliminate(id)?;
        }
    }

    let remaining = (market.budget - committed).max(0.0);
    let reduced = eliminated.reduced.with_budget(remaining);
    let residual_market =
        reduced.restrict(|j| reduced.t()[j] > 0.0 && fits(reduced.g()[j], remaining));
    let residual = solve_canonical(&residual_market, options)?;

    let mut members = locked_in;
    members.extend(residual.ids());
    members.sort_unstable();
    Ok(WhatIf {
        canonical,
        members,
        canonical_value: eliminated.offset + residual.report.value(),
        offset: eliminated.offset,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualView {
    pub budget: f64,
    /// 1-based indices of the schools still negotiable.
    pub schools: Vec<usize>,
    /// Their utilities after elimination (outside option at zero).
    pub utilities: Vec<f64>,
    pub offset: f64,
    /// Value of the residual solution on its own.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfView {
    #[serde(flatten)]
    pub report: ReportView,
    pub locked_in: Vec<usize>,
    pub locked_out: Vec<usize>,
    pub residual: ResidualView,
}

impl WhatIfView {
    /// `locked_in` and `locked_out` are echoed back 1-based.
    pub fn new(
        market: &Market,
        result: &WhatIf,
        locked_in: &[usize],
        locked_out: &[usize],
        with_time: bool,
    ) -> Result<Self> {
        let residual = &result.residual;
        let report = ReportView::assemble(
            market,
            &result.canonical,
            &result.members,
            result.canonical_value,
            &residual.report,
            None,
            with_time,
        )?;
        let one_based = |v: &[usize]| {
            let mut v: Vec<usize> = v.iter().map(|i| i + 1).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        Ok(WhatIfView {
            report,
            locked_in: one_based(locked_in),
            locked_out: one_based(locked_out),
            residual: ResidualView {
                budget: residual.canonical.budget(),
                schools: residual.canonical.ids().iter().map(|i| i + 1).collect(),
                utilities: residual.canonical.t().to_vec(),
                offset: result.offset,
                value: residual.report.value(),
            },
        })
    }
}
