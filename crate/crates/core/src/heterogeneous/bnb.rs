use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::canonical::{eliminated_utility, fits, CanonicalMarket, Portfolio};
use crate::error::{Error, RefusalReason, Result};
use crate::report::{Certificate, SolveReport, SolveStats, Solver};

use super::lp::lp_upper_bound;

pub const DEFAULT_BNB_CAP: usize = 35;

/// A search node: schools forced in (`inset`), forced out (`outset`), and
/// still open (`negotiable`), with the in-schools already eliminated from
/// the open schools' utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BnbNode {
    pub inset: Vec<usize>,
    pub outset: Vec<usize>,
    /// Ascending positions.
    pub negotiable: Vec<usize>,
    /// Transformed utility of each negotiable school, aligned with `negotiable`.
    pub tbar: Vec<f64>,
    /// Value secured by `inset`; equals its valuation.
    pub offset: f64,
    /// Budget left after paying for `inset`.
    pub residual: f64,
    /// Value of `inset` itself, a lower bound for the branch.
    pub lower: f64,
    /// Continuous-relaxation bound for every portfolio on the branch.
    pub upper: f64,
}

impl BnbNode {
    pub fn root(market: &CanonicalMarket) -> BnbNode {
        Self::assemble(
            market,
            Vec::new(),
            Vec::new(),
            (0..market.len()).collect(),
            market.t().to_vec(),
            0.0,
            market.budget(),
        )
    }

    /// Builds the node for an explicit partition, eliminating `inset` in
    /// ascending utility order. `negotiable` is everything else.
    pub fn from_partition(
        market: &CanonicalMarket,
        inset: &[usize],
        outset: &[usize],
    ) -> Result<BnbNode> {
        let m = market.len();
        let mut role = vec![0u8; m];
        for (set, tag) in [(inset, 1u8), (outset, 2u8)] {
            for &j in set {
                if j >= m {
                    return Err(Error::invalid(format!("school position {j} out of range")));
                }
                if role[j] != 0 {
                    return Err(Error::invalid(format!(
                        "school position {j} appears in both sets"
                    )));
                }
                role[j] = tag;
            }
        }
        let mut ins = inset.to_vec();
        ins.sort_unstable();
        if !fits(market.cost(&ins), market.budget()) {
            return Err(Error::invalid("forced-in schools exceed the budget"));
        }
        let mut outs = outset.to_vec();
        outs.sort_unstable();

        let mut open: Vec<usize> = (0..m).filter(|&j| role[j] != 2).collect();
        let mut tbar: Vec<f64> = open.iter().map(|&j| market.t()[j]).collect();
        let mut offset = 0.0;
        let mut residual = market.budget();
        for &k in &ins {
            let slot = open.binary_search(&k).expect("in-school is open");
            let (fk, tk) = (market.f()[k], tbar[slot]);
            offset += fk * tk;
            residual -= market.g()[k];
            open.remove(slot);
            tbar.remove(slot);
            for (t, &j) in tbar.iter_mut().zip(&open) {
                *t = eliminated_utility(*t, j, k, fk, tk);
            }
        }
        Ok(Self::assemble(
            market, ins, outs, open, tbar, offset, residual,
        ))
    }

    fn assemble(
        market: &CanonicalMarket,
        inset: Vec<usize>,
        outset: Vec<usize>,
        negotiable: Vec<usize>,
        tbar: Vec<f64>,
        offset: f64,
        residual: f64,
    ) -> BnbNode {
        let f: Vec<f64> = negotiable.iter().map(|&j| market.f()[j]).collect();
        let g: Vec<f64> = negotiable.iter().map(|&j| market.g()[j]).collect();
        let upper = lp_upper_bound(offset, &tbar, &f, &g, residual);
        BnbNode {
            inset,
            outset,
            negotiable,
            tbar,
            offset,
            residual,
            lower: offset,
            upper,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.negotiable.is_empty()
    }

    /// Zero children for a leaf; one (everything open moves out) when no
    /// open school is affordable; otherwise an in-child and an out-child on
    /// the affordable open school with the best `f_j tbar_j / g_j`, in that
    /// order.
    pub fn children(&self, market: &CanonicalMarket) -> Vec<BnbNode> {
        if self.is_leaf() {
            return Vec::new();
        }
        let (f, g) = (market.f(), market.g());
        let mut pick: Option<(usize, f64)> = None;
        for (slot, &j) in self.negotiable.iter().enumerate() {
            if !fits(g[j], self.residual) {
                continue;
            }
            let ratio = f[j] * self.tbar[slot] / g[j];
            if pick.is_none_or(|(_, best)| ratio > best) {
                pick = Some((slot, ratio));
            }
        }

        let Some((slot, _)) = pick else {
            let mut outset = self.outset.clone();
            outset.extend_from_slice(&self.negotiable);
            outset.sort_unstable();
            return vec![Self::assemble(
                market,
                self.inset.clone(),
                outset,
                Vec::new(),
                Vec::new(),
                self.offset,
                self.residual,
            )];
        };

        let k = self.negotiable[slot];
        let (fk, tk) = (f[k], self.tbar[slot]);
        let mut rest = self.negotiable.clone();
        rest.remove(slot);
        let mut rest_tbar = self.tbar.clone();
        rest_tbar.remove(slot);

        let in_tbar: Vec<f64> = rest_tbar
            .iter()
            .zip(&rest)
            .map(|(&t, &j)| eliminated_utility(t, j, k, fk, tk))
            .collect();
        let mut inset = self.inset.clone();
        let at = inset.partition_point(|&j| j < k);
        inset.insert(at, k);
        let with = Self::assemble(
            market,
            inset,
            self.outset.clone(),
            rest.clone(),
            in_tbar,
            self.offset + fk * tk,
            self.residual - g[k],
        );

        let mut outset = self.outset.clone();
        let at = outset.partition_point(|&j| j < k);
        outset.insert(at, k);
        let without = Self::assemble(
            market,
            self.inset.clone(),
            outset,
            rest,
            rest_tbar,
            self.offset,
            self.residual,
        );
        vec![with, without]
    }
}

/// State of the search after one node expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbSnapshot {
    pub incumbent: f64,
    /// Largest bound among open candidates, or `None` when none remain.
    pub best_open_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbOutcome {
    pub report: SolveReport,
    /// `(expansion count, new incumbent value)` at each improvement.
    pub incumbents: Vec<(u64, f64)>,
    /// Per-expansion snapshots, when requested.
    pub snapshots: Vec<BnbSnapshot>,
}

/// Best-first branch-and-bound.
#[derive(Debug, Clone, Copy)]
pub struct BranchAndBound {
    pub max_schools: usize,
    pub record_snapshots: bool,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        BranchAndBound {
            max_schools: DEFAULT_BNB_CAP,
            record_snapshots: false,
        }
    }
}

struct Candidate {
    node: BnbNode,
    seq: u64,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Highest bound first, then highest lower bound, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        self.node
            .upper
            .total_cmp(&other.node.upper)
            .then_with(|| self.node.lower.total_cmp(&other.node.lower))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl BranchAndBound {
    pub fn solve(&self, market: &CanonicalMarket) -> Result<BnbOutcome> {
        let m = market.len();
        if m > self.max_schools {
            return Err(Error::refused(
                RefusalReason::TooManySchools,
                format!(
                    "branch-and-bound is limited to {} schools (market has {m}); \
                     use dp for integer costs or fptas otherwise",
                    self.max_schools
                ),
            ));
        }
        let started = Instant::now();
        let mut incumbent = 0.0;
        let mut best: Vec<usize> = Vec::new();
        let mut incumbents = Vec::new();
        let mut snapshots = Vec::new();
        let mut expanded = 0u64;
        let mut seq = 0u64;

        let mut open = BinaryHeap::new();
        let root = BnbNode::root(market);
        if !root.is_leaf() {
            open.push(Candidate { node: root, seq });
        }

        while let Some(Candidate { node, .. }) = open.pop() {
            if node.upper <= incumbent {
                continue;
            }
            expanded += 1;
            for child in node.children(market) {
                if child.lower > incumbent {
                    incumbent = child.lower;
                    best.clone_from(&child.inset);
                    incumbents.push((expanded, incumbent));
                }
                if child.upper > incumbent && !child.is_leaf() {
                    seq += 1;
                    open.push(Candidate { node: child, seq });
                }
            }
            if self.record_snapshots {
                snapshots.push(BnbSnapshot {
                    incumbent,
                    best_open_bound: open.peek().map(|c| c.node.upper),
                });
            }
        }

        let portfolio = Portfolio::evaluate(market, &best)?;
        Ok(BnbOutcome {
            report: SolveReport {
                solver: Solver::BranchAndBound,
                portfolio,
                certificate: Certificate::Exact,
                stats: SolveStats {
                    nodes: Some(expanded),
                    ..SolveStats::default()
                },
                wall_time: started.elapsed(),
            },
            incumbents,
            snapshots,
        })
    }
}

/// Exact optimum by branch-and-bound with default settings.
pub fn branch_and_bound(market: &CanonicalMarket) -> Result<SolveReport> {
    BranchAndBound::default().solve(market).map(|o| o.report)
}
