//! Unit-cost markets with an application limit `h`.
//!
//! Optimal portfolios here are nested in `h`, so one greedy pass that adds
//! the school with the largest `f_j * t_j` and then rewrites the remaining
//! utilities with the elimination transform yields every optimum at once.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::canonical::{eliminated_utility, CanonicalMarket, Portfolio};
use crate::error::{Error, Result};

/// How the greedy pass stores its candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStore {
    /// Linear scan; the next entrant is found while updating utilities.
    List,
    /// Binary max-heap on `f_j * t_j`, drained and rebuilt every iteration.
    Heap,
}

/// Entry order of schools into the optimal portfolio and the value after
/// each entry. The optimal portfolio of size `h` is `order[..h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    /// Canonical positions in entry order.
    pub order: Vec<usize>,
    /// `values[i]` is the optimal value with `i + 1` applications.
    pub values: Vec<f64>,
}

impl Frontier {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The optimal portfolio with `h` applications.
    pub fn portfolio(&self, h: usize) -> Portfolio {
        let mut members = self.order[..h].to_vec();
        members.sort_unstable();
        let value = if h == 0 { 0.0 } else { self.values[h - 1] };
        Portfolio { members, value }
    }

    /// For each canonical position, the smallest `h` whose optimum includes it.
    pub fn priorities(&self, m: usize) -> Vec<Option<usize>> {
        let mut p = vec![None; m];
        for (i, &j) in self.order.iter().enumerate() {
            p[j] = Some(i + 1);
        }
        p
    }

    /// Marginal value of each additional application.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&v| {
                let d = v - prev;
                prev = v;
                d
            })
            .collect()
    }
}

fn check_limit(market: &CanonicalMarket, h: usize) -> Result<()> {
    if h == 0 || h > market.len() {
        return Err(Error::invalid_at(
            "h",
            format!(
                "application limit must lie in 1..={}, got {h}",
                market.len()
            ),
        ));
    }
    Ok(())
}

/// `a` beats `b` when its score is larger, or equal with a lower input index.
#[inline]
fn beats(score_a: f64, id_a: usize, score_b: f64, id_b: usize) -> bool {
    match score_a.total_cmp(&score_b) {
        Ordering::Greater => true,
        Ordering::Equal => id_a < id_b,
        Ordering::Less => false,
    }
}

/// The `h` schools with the largest `f_j * t_j`, ties to the lower input index.
pub fn naive_portfolio(market: &CanonicalMarket, h: usize) -> Result<Portfolio> {
    check_limit(market, h)?;
    let ids = market.ids();
    let score = |j: usize| market.f()[j] * market.t()[j];
    let mut order: Vec<usize> = (0..market.len()).collect();
    order.sort_by(|&a, &b| {
        score(b)
            .total_cmp(&score(a))
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    order.truncate(h);
    Portfolio::evaluate(market, &order)
}

/// Optimal nested portfolios up to size `h`.
pub fn greedy_optimal(
    market: &CanonicalMarket,
    h: usize,
    store: CandidateStore,
) -> Result<Frontier> {
    check_limit(market, h)?;
    Ok(match store {
        CandidateStore::List => greedy_list(market, h),
        CandidateStore::Heap => greedy_heap(market, h),
    })
}

/// The full nested family, `h = 1..=m`.
pub fn frontier(market: &CanonicalMarket) -> Frontier {
    if market.is_empty() {
        return Frontier {
            order: Vec::new(),
            values: Vec::new(),
        };
    }
    greedy_list(market, market.len())
}

fn greedy_list(market: &CanonicalMarket, h: usize) -> Frontier {
    let mut state = GreedyState::new(market);
    while state.order.len() < h {
        state.step();
    }
    Frontier {
        order: state.order,
        values: state.values,
    }
}

/// Step-by-step view of the list-based greedy pass.
#[derive(Debug, Clone)]
pub struct GreedyState<'a> {
    market: &'a CanonicalMarket,
    /// Remaining candidate positions, ascending.
    remaining: Vec<usize>,
    /// Current transformed utility of each position.
    tbar: Vec<f64>,
    /// Index into `remaining` of the next entrant.
    next: Option<usize>,
    order: Vec<usize>,
    values: Vec<f64>,
}

impl<'a> GreedyState<'a> {
    pub fn new(market: &'a CanonicalMarket) -> Self {
        let mut state = GreedyState {
            market,
            remaining: (0..market.len()).collect(),
            tbar: market.t().to_vec(),
            next: None,
            order: Vec::new(),
            values: Vec::new(),
        };
        state.next = state.argmax();
        state
    }

    fn score(&self, j: usize) -> f64 {
        self.market.f()[j] * self.tbar[j]
    }

    fn argmax(&self) -> Option<usize> {
        let ids = self.market.ids();
        let mut best: Option<usize> = None;
        for (slot, &j) in self.remaining.iter().enumerate() {
            let better = match best {
                None => true,
                Some(b) => {
                    let k = self.remaining[b];
                    beats(self.score(j), ids[j], self.score(k), ids[k])
                }
            };
            if better {
                best = Some(slot);
            }
        }
        best
    }

    /// `(position, f_j * tbar_j)` for every remaining candidate.
    pub fn candidate_scores(&self) -> Vec<(usize, f64)> {
        self.remaining.iter().map(|&j| (j, self.score(j))).collect()
    }

    /// Entry order so far.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Adds the next school; returns its position, or `None` when exhausted.
    pub fn step(&mut self) -> Option<usize> {
        let slot = self.next?;
        let k = self.remaining.remove(slot);
        let (fk, tk) = (self.market.f()[k], self.tbar[k]);
        let gain = fk * tk;
        let prev = self.values.last().copied().unwrap_or(0.0);
        self.order.push(k);
        self.values.push(prev + gain);

        let ids = self.market.ids();
        let mut best: Option<(usize, f64)> = None;
        for (s, &j) in self.remaining.iter().enumerate() {
            let t = eliminated_utility(self.tbar[j], j, k, fk, tk);
            self.tbar[j] = t;
            let score = self.market.f()[j] * t;
            let better = match best {
                None => true,
                Some((b, bs)) => beats(score, ids[j], bs, ids[self.remaining[b]]),
            };
            if better {
                best = Some((s, score));
            }
        }
        self.next = best.map(|(s, _)| s);
        Some(k)
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    score: f64,
    id: usize,
    pos: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn greedy_heap(market: &CanonicalMarket, h: usize) -> Frontier {
    let (t, f, ids) = (market.t(), market.f(), market.ids());
    let mut tbar = t.to_vec();
    let mut heap: BinaryHeap<HeapEntry> = (0..market.len())
        .map(|j| HeapEntry {
            score: f[j] * tbar[j],
            id: ids[j],
            pos: j,
        })
        .collect();
    let mut order = Vec::with_capacity(h);
    let mut values = Vec::with_capacity(h);
    let mut scratch = Vec::with_capacity(market.len());
    while order.len() < h {
        let top = heap.pop().expect("h <= m guarantees a candidate");
        let k = top.pos;
        let (fk, tk) = (f[k], tbar[k]);
        let prev = values.last().copied().unwrap_or(0.0);
        order.push(k);
        values.push(prev + fk * tk);

        scratch.clear();
        scratch.extend(heap.drain());
        for e in scratch.iter_mut() {
            let j = e.pos;
            tbar[j] = eliminated_utility(tbar[j], j, k, fk, tk);
            e.score = f[j] * tbar[j];
        }
        heap = BinaryHeap::from(std::mem::take(&mut scratch));
        scratch = Vec::with_capacity(heap.len());
    }
    Frontier { order, values }
}
