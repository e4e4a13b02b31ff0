use std::time::Instant;

use crate::canonical::{CanonicalMarket, Portfolio};
use crate::error::{Error, RefusalReason, Result};
use crate::report::{Certificate, SolveReport, SolveStats, Solver};

/// Default ceiling on the value table, in bytes.
pub const DEFAULT_DP_MEMORY_BYTES: u64 = 1 << 30;

/// A table entry, with an explicit marker for negative budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DpCell {
    /// Spending below zero; absorbs every arithmetic step.
    Infeasible,
    Value(f64),
}

impl DpCell {
    /// Value of adding a school with probability `f` and utility `t` on top
    /// of this entry. `Infeasible` stays infeasible even when `1 - f = 0`.
    fn extend(self, f: f64, t: f64) -> DpCell {
        match self {
            DpCell::Infeasible => DpCell::Infeasible,
            DpCell::Value(v) => DpCell::Value((1.0 - f) * v + f * t),
        }
    }
}

/// `V[j, h]`: the best value using schools `0..j` (canonical positions)
/// without spending more than `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DpValueTable {
    schools: usize,
    budget: usize,
    values: Vec<f64>,
}

fn integral(x: f64) -> Option<usize> {
    (x.fract() == 0.0 && x >= 0.0 && x <= u32::MAX as f64).then_some(x as usize)
}

impl DpValueTable {
    pub fn build(market: &CanonicalMarket) -> Result<Self> {
        DpCosts::default().table(market)
    }

    /// Number of schools `m`; rows run `0..=m`.
    pub fn schools(&self) -> usize {
        self.schools
    }

    /// Integral budget `H`; columns run `0..=H`.
    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn cell(&self, j: usize, h: i64) -> DpCell {
        if h < 0 {
            DpCell::Infeasible
        } else {
            DpCell::Value(self.values[j * (self.budget + 1) + h as usize])
        }
    }

    /// `V[j, h]` for `h >= 0`.
    pub fn value(&self, j: usize, h: usize) -> f64 {
        self.values[j * (self.budget + 1) + h]
    }
}

/// Exact DP over integral expenditures.
#[derive(Debug, Clone, Copy)]
pub struct DpCosts {
    pub max_table_bytes: u64,
}

impl Default for DpCosts {
    fn default() -> Self {
        DpCosts {
            max_table_bytes: DEFAULT_DP_MEMORY_BYTES,
        }
    }
}

impl DpCosts {
    fn check(&self, market: &CanonicalMarket) -> Result<(Vec<usize>, usize)> {
        let budget = integral(market.budget()).ok_or_else(|| {
            Error::refused(
                RefusalReason::NonIntegerCosts,
                format!(
                    "dp needs an integral budget (got {}); use fptas instead",
                    market.budget()
                ),
            )
        })?;
        let mut costs = Vec::with_capacity(market.len());
        for (j, &g) in market.g().iter().enumerate() {
            let c = integral(g).ok_or_else(|| {
                Error::refused(
                    RefusalReason::NonIntegerCosts,
                    format!(
                        "dp needs integral application costs (school {} costs {g}); use fptas instead",
                        market.ids()[j] + 1
                    ),
                )
            })?;
            costs.push(c);
        }
        let bytes = (market.len() as u64 + 1) * (budget as u64 + 1) * 8;
        if bytes > self.max_table_bytes {
            return Err(Error::refused(
                RefusalReason::MemoryBudget,
                format!(
                    "dp table would need {bytes} bytes, above the {} byte limit; use fptas instead",
                    self.max_table_bytes
                ),
            ));
        }
        Ok((costs, budget))
    }

    pub fn table(&self, market: &CanonicalMarket) -> Result<DpValueTable> {
        let (costs, budget) = self.check(market)?;
        let m = market.len();
        let width = budget + 1;
        let mut table = DpValueTable {
            schools: m,
            budget,
            values: vec![0.0; (m + 1) * width],
        };
        let (t, f) = (market.t(), market.f());
        for j in 1..=m {
            let (fj, tj, gj) = (f[j - 1], t[j - 1], costs[j - 1] as i64);
            for h in 1..=budget {
                let skip = table.value(j - 1, h);
                let take = table.cell(j - 1, h as i64 - gj).extend(fj, tj);
                let best = match take {
                    DpCell::Value(v) if v > skip => v,
                    _ => skip,
                };
                table.values[j * width + h] = best;
            }
        }
        Ok(table)
    }

    pub fn solve(&self, market: &CanonicalMarket) -> Result<SolveReport> {
        let started = Instant::now();
        let table = self.table(market)?;
        let (costs, _) = self.check(market)?;
        let mut h = table.budget;
        let mut members = Vec::new();
        for j in (1..=table.schools).rev() {
            if table.value(j - 1, h) < table.value(j, h) {
                members.push(j - 1);
                h -= costs[j - 1];
            }
        }
        let portfolio = Portfolio::evaluate(market, &members)?;
        Ok(SolveReport {
            solver: Solver::DpCosts,
            portfolio,
            certificate: Certificate::Exact,
            stats: SolveStats {
                table_cells: Some(((table.schools + 1) * (table.budget + 1)) as u64),
                ..SolveStats::default()
            },
            wall_time: started.elapsed(),
        })
    }
}

/// Exact optimum for integral costs and budget.
pub fn dp_costs(market: &CanonicalMarket) -> Result<SolveReport> {
    DpCosts::default().solve(market)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::market::Market;

    #[test]
    fn non_nested_instance() {
        let solve = |h: f64| {
            let m = Market::from_columns(0.0, &[1.0, 1.0, 219.0], &[0.5; 3], &[1.0, 1.0, 3.0], h);
            dp_costs(&canonicalize(&m).unwrap())
                .unwrap()
                .portfolio
                .members
        };
        assert_eq!(solve(2.0), vec![0, 1]);
        assert_eq!(solve(3.0), vec![2]);
    }

    #[test]
    fn ratio_trap_optimum() {
        let m = canonicalize(&Market::from_columns(
            0.0,
            &[10.0, 2021.0],
            &[0.1, 0.1],
            &[1.0, 500.0],
            500.0,
        ))
        .unwrap();
        let r = dp_costs(&m).unwrap();
        assert_eq!(r.portfolio.members, vec![1]);
        assert!((r.value() - 202.1).abs() < 1e-9);
    }

    #[test]
    fn rejects_fractional_costs_naming_fptas() {
        let m = canonicalize(&Market::from_columns(0.0, &[1.0], &[0.5], &[1.5], 2.0)).unwrap();
        let err = dp_costs(&m).unwrap_err();
        assert_eq!(err.refusal(), Some(RefusalReason::NonIntegerCosts));
        assert!(err.to_string().contains("fptas"));

        let m = canonicalize(&Market::from_columns(0.0, &[1.0], &[0.5], &[1.0], 2.5)).unwrap();
        assert_eq!(
            dp_costs(&m).unwrap_err().refusal(),
            Some(RefusalReason::NonIntegerCosts)
        );
    }

    #[test]
    fn refuses_oversized_tables() {
        let m = canonicalize(&Market::from_columns(0.0, &[1.0], &[0.5], &[1.0], 1000.0)).unwrap();
        let dp = DpCosts {
            max_table_bytes: 1024,
        };
        assert_eq!(
            dp.solve(&m).unwrap_err().refusal(),
            Some(RefusalReason::MemoryBudget)
        );
    }

    #[test]
    fn certain_admission_after_infeasible_marker() {
        // f = 1 with a budget too small: (1 - f) * (-inf) must stay infeasible.
        let m = canonicalize(&Market::from_columns(
            0.0,
            &[1.0, 5.0],
            &[0.5, 1.0],
            &[1.0, 2.0],
            2.0,
        ))
        .unwrap();
        let table = DpValueTable::build(&m).unwrap();
        assert_eq!(table.value(2, 1), 0.5);
        assert_eq!(table.value(2, 2), 5.0);
        assert_eq!(table.cell(1, -1), DpCell::Infeasible);
    }
}
