//! Canonical markets, portfolio valuation, and the elimination transform.
//!
//! Canonicalization drops schools that can never help (`f = 0`, `t <= t0`,
//! `g > H`), sorts the rest ascending by utility (stable, so equal
//! utilities keep input order and the later school counts as preferred),
//! and shifts utilities so the outside option is zero. Every solver in the
//! crate operates on the result. Positions `0..m` index the sorted schools;
//! [`CanonicalMarket::ids`] maps them back to input indices.

use crate::error::{Error, Result};
use crate::market::Market;

/// Relative slack used for every "fits in the budget" comparison.
pub(crate) const BUDGET_SLACK: f64 = 1e-12;

pub(crate) fn fits(cost: f64, budget: f64) -> bool {
    cost <= budget + BUDGET_SLACK * budget.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMarket {
    t: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    ids: Vec<usize>,
    budget: f64,
    shift: f64,
}

/// Reduces a raw market to canonical form.
///
/// Returns a market with zero schools (see [`CanonicalMarket::is_trivial`])
/// when nothing survives filtering; solvers answer those with the empty
/// portfolio.
pub fn canonicalize(market: &Market) -> Result<CanonicalMarket> {
    if !market.budget.is_finite() || market.budget <= 0.0 {
        return Err(Error::invalid_at(
            "budget",
            "must be a positive finite number",
        ));
    }
    if !market.t0.is_finite() {
        return Err(Error::invalid_at("t0", "must be a finite number"));
    }
    for (i, s) in market.schools.iter().enumerate() {
        if !s.t.is_finite() {
            return Err(Error::invalid_at(
                format!("schools[{i}].t"),
                "must be finite",
            ));
        }
        if !(s.f.is_finite() && (0.0..=1.0).contains(&s.f)) {
            return Err(Error::invalid_at(
                format!("schools[{i}].f"),
                "admission probability must lie in [0, 1]",
            ));
        }
        if !(s.g.is_finite() && s.g > 0.0) {
            return Err(Error::invalid_at(
                format!("schools[{i}].g"),
                "application cost must be positive",
            ));
        }
    }

    let mut keep: Vec<usize> = (0..market.schools.len())
        .filter(|&i| {
            let s = &market.schools[i];
            s.f > 0.0 && s.t > market.t0 && fits(s.g, market.budget)
        })
        .collect();
    // `sort_by` is stable: ties stay in input order.
    keep.sort_by(|&a, &b| market.schools[a].t.total_cmp(&market.schools[b].t));

    let shift = market.t0;
    Ok(CanonicalMarket {
        t: keep.iter().map(|&i| market.schools[i].t - shift).collect(),
        f: keep.iter().map(|&i| market.schools[i].f).collect(),
        g: keep.iter().map(|&i| market.schools[i].g).collect(),
        ids: keep,
        budget: market.budget,
        shift,
    })
}

impl CanonicalMarket {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// No school survived canonicalization.
    pub fn is_trivial(&self) -> bool {
        self.is_empty()
    }

    /// Shifted utilities, ascending.
    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Input index of the school at each position.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// The original `t0`; add it to canonical values to restore the input scale.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    pub fn cost(&self, members: &[usize]) -> f64 {
        members.iter().map(|&j| self.g[j]).sum()
    }

    /// All application costs equal one.
    pub fn has_unit_costs(&self) -> bool {
        self.g.iter().all(|&g| g == 1.0)
    }

    /// Same schools, different budget. Schools costing more than the new
    /// budget are kept; solvers never select them.
    pub fn with_budget(&self, budget: f64) -> CanonicalMarket {
        CanonicalMarket {
            budget,
            ..self.clone()
        }
    }

    /// Keeps the positions for which `keep` holds, in order.
    pub fn restrict(&self, mut keep: impl FnMut(usize) -> bool) -> CanonicalMarket {
        let pos: Vec<usize> = (0..self.len()).filter(|&j| keep(j)).collect();
        CanonicalMarket {
            t: pos.iter().map(|&j| self.t[j]).collect(),
            f: pos.iter().map(|&j| self.f[j]).collect(),
            g: pos.iter().map(|&j| self.g[j]).collect(),
            ids: pos.iter().map(|&j| self.ids[j]).collect(),
            budget: self.budget,
            shift: self.shift,
        }
    }

    /// Sum of `f_j t_j` over every school; bounds every portfolio value.
    pub fn expected_utility_sum(&self) -> f64 {
        self.t.iter().zip(&self.f).map(|(t, f)| t * f).sum()
    }

    fn sorted_members(&self, members: &[usize]) -> Result<Vec<usize>> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&last) = sorted.last() {
            if last >= self.len() {
                return Err(Error::invalid(format!(
                    "school position {last} out of range for a market of {} schools",
                    self.len()
                )));
            }
        }
        Ok(sorted)
    }

    /// Expected utility of the best admission among `members` (positions, in
    /// any order), on the canonical scale.
    pub fn valuate(&self, members: &[usize]) -> Result<f64> {
        let sorted = self.sorted_members(members)?;
        Ok(self.value_sorted(&sorted))
    }

    /// Valuation for members already sorted ascending and in range.
    pub(crate) fn value_sorted(&self, sorted: &[usize]) -> f64 {
        weighted_value(&self.t, &self.f, sorted)
    }

    /// Probability of ending up at each school, index 0 being "none".
    pub fn attendance(&self, members: &[usize]) -> Result<AttendanceDistribution> {
        let sorted = self.sorted_members(members)?;
        let mut p = vec![0.0; self.len() + 1];
        let mut reject_all_above = 1.0;
        for &j in sorted.iter().rev() {
            p[j + 1] = self.f[j] * reject_all_above;
            reject_all_above *= 1.0 - self.f[j];
        }
        p[0] = reject_all_above;
        Ok(AttendanceDistribution { p })
    }

    /// Mean minus `beta` times variance of the attained utility, computed as
    /// `v(X; tau) + beta * v(X; t)^2` with `tau_j = t_j - beta t_j^2`.
    pub fn valuate_variance_penalized(&self, members: &[usize], beta: f64) -> Result<f64> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::invalid_at(
                "beta",
                "variance penalty must be nonnegative",
            ));
        }
        let sorted = self.sorted_members(members)?;
        let tau: Vec<f64> = self.t.iter().map(|&t| t - beta * t * t).collect();
        let mean = self.value_sorted(&sorted);
        Ok(weighted_value(&tau, &self.f, &sorted) + beta * mean * mean)
    }

    /// Commits to the school with input index `id` and returns the market of
    /// the remaining schools whose valuations, plus the returned offset,
    /// reproduce valuations of portfolios containing `id`.
    pub fn eliminate(&self, id: usize) -> Result<EliminationResult> {
        EliminationResult {
            reduced: self.clone(),
            offset: 0.0,
        }
        .eliminate(id)
    }
}

/// Horner evaluation of `sum_j f_j u_j prod_{i > j} (1 - f_i)` over sorted
/// positions. `u` need not be monotone; the product follows position order.
pub(crate) fn weighted_value(u: &[f64], f: &[f64], sorted: &[usize]) -> f64 {
    sorted
        .iter()
        .fold(0.0, |acc, &j| (1.0 - f[j]) * acc + f[j] * u[j])
}

/// Updated utility of the school at position `j` once the school at
/// position `k` (utility `tk`, probability `fk`) is committed to.
#[inline]
pub(crate) fn eliminated_utility(tj: f64, j: usize, k: usize, fk: f64, tk: f64) -> f64 {
    if j < k {
        (1.0 - fk) * tj
    } else {
        tj - fk * tk
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttendanceDistribution {
    /// `p[0]` is the probability of attending no school; `p[j + 1]` that of
    /// attending the school at position `j`.
    pub p: Vec<f64>,
}

impl AttendanceDistribution {
    pub fn none(&self) -> f64 {
        self.p[0]
    }

    pub fn school(&self, position: usize) -> f64 {
        self.p[position + 1]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationResult {
    /// The market without the eliminated schools, utilities transformed.
    pub reduced: CanonicalMarket,
    /// Value already secured by the eliminated schools.
    pub offset: f64,
}

impl EliminationResult {
    /// Eliminates one more school, accumulating the offset.
    pub fn eliminate(&self, id: usize) -> Result<EliminationResult> {
        let m = &self.reduced;
        let k = m.position_of(id).ok_or_else(|| {
            Error::invalid(format!(
                "school {id} is not in this market (already eliminated or filtered out)"
            ))
        })?;
        let (fk, tk) = (m.f[k], m.t[k]);
        let mut t = Vec::with_capacity(m.len() - 1);
        for j in (0..m.len()).filter(|&j| j != k) {
            t.push(eliminated_utility(m.t[j], j, k, fk, tk));
        }
        let drop = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| x)
                .collect()
        };
        let mut ids = m.ids.clone();
        ids.remove(k);
        Ok(EliminationResult {
            reduced: CanonicalMarket {
                t,
                f: drop(&m.f),
                g: drop(&m.g),
                ids,
                budget: m.budget,
                shift: m.shift,
            },
            offset: self.offset + fk * tk,
        })
    }
}

/// A set of schools (canonical positions, ascending) with its valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    pub members: Vec<usize>,
    pub value: f64,
}

impl Portfolio {
    pub fn empty() -> Self {
        Portfolio {
            members: Vec::new(),
            value: 0.0,
        }
    }

    pub fn evaluate(market: &CanonicalMarket, members: &[usize]) -> Result<Portfolio> {
        let members = market.sorted_members(members)?;
        let value = market.value_sorted(&members);
        Ok(Portfolio { members, value })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.members.binary_search(&position).is_ok()
    }

    pub fn cost(&self, market: &CanonicalMarket) -> f64 {
        market.cost(&self.members)
    }

    /// Input indices of the members, ascending.
    pub fn ids(&self, market: &CanonicalMarket) -> Vec<usize> {
        let mut ids: Vec<usize> = self.members.iter().map(|&j| market.ids[j]).collect();
        ids.sort_unstable();
        ids
    }
}
