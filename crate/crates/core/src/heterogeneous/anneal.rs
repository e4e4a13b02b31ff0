use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::{fits, CanonicalMarket, Portfolio};
use crate::error::{Error, Result};
use crate::report::{Certificate, SolveReport, SolveStats, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    /// Initial temperature `T >= 0`. Zero means pure hill-climbing.
    pub temperature: f64,
    /// Factor `r` in `(0, 1]` applied to the temperature after each iteration.
    pub reduction: f64,
    pub iterations: u64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            temperature: 0.25,
            reduction: 1.0 / 16.0,
            iterations: 500,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::invalid_at(
                "sa.temperature",
                "must be a nonnegative finite number",
            ));
        }
        if !(self.reduction > 0.0 && self.reduction <= 1.0) {
            return Err(Error::invalid_at("sa.reduction", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Adds schools in descending `f t / g` order, skipping any that no longer fit.
pub fn ratio_greedy(market: &CanonicalMarket) -> Portfolio {
    let (t, f, g) = (market.t(), market.f(), market.g());
    let mut order: Vec<usize> = (0..market.len()).collect();
    order.sort_by(|&a, &b| {
        (f[b] * t[b] / g[b])
            .total_cmp(&(f[a] * t[a] / g[a]))
            .then(a.cmp(&b))
    });
    let mut spent = 0.0;
    let mut members = Vec::new();
    for j in order {
        if fits(spent + g[j], market.budget()) {
            spent += g[j];
            members.push(j);
        }
    }
    members.sort_unstable();
    let value = market.value_sorted(&members);
    Portfolio { members, value }
}

fn value_of(market: &CanonicalMarket, inside: &[bool]) -> f64 {
    let (t, f) = (market.t(), market.f());
    inside
        .iter()
        .enumerate()
        .filter(|(_, &x)| x)
        .fold(0.0, |acc, (j, _)| (1.0 - f[j]) * acc + f[j] * t[j])
}

fn take_random<R: Rng>(rng: &mut R, pool: &mut Vec<usize>) -> usize {
    let i = rng.random_range(0..pool.len());
    pool.swap_remove(i)
}

/// Simulated annealing from the ratio-greedy start. Deterministic in the seed.
pub fn simulated_annealing(market: &CanonicalMarket, params: &SaParams) -> Result<SolveReport> {
    params.validate()?;
    let started = Instant::now();
    let budget = market.budget();
    let g = market.g();
    let m = market.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let initial = ratio_greedy(market);
    let mut current = vec![false; m];
    for &j in &initial.members {
        current[j] = true;
    }
    let mut current_value = initial.value;
    let mut best = current.clone();
    let mut best_value = current_value;
    let mut temperature = params.temperature;

    for _ in 0..params.iterations {
        let mut next = current.clone();
        let mut original: Vec<usize> = (0..m).filter(|&j| current[j]).collect();
        let mut outside: Vec<usize> = (0..m).filter(|&j| !current[j]).collect();
        let mut spent: f64 = original.iter().map(|&j| g[j]).sum();
        let mut added = Vec::new();

        while fits(spent, budget) && !outside.is_empty() {
            let j = take_random(&mut rng, &mut outside);
            next[j] = true;
            spent += g[j];
            added.push(j);
        }
        while !fits(spent, budget) && !original.is_empty() {
            let j = take_random(&mut rng, &mut original);
            next[j] = false;
            spent -= g[j];
        }
        // Dropping every original member can leave the additions alone over
        // budget; shed additions until feasible.
        while !fits(spent, budget) {
            let j = take_random(&mut rng, &mut added);
            next[j] = false;
            spent -= g[j];
        }

        let next_value = value_of(market, &next);
        let delta = next_value - current_value;
        let accept = delta >= 0.0
            || (temperature > 0.0 && rng.random::<f64>() < (delta / temperature).exp());
        if accept {
            current = next;
            current_value = next_value;
            if current_value > best_value {
                best = current.clone();
                best_value = current_value;
            }
        }
        temperature *= params.reduction;
    }

    let members: Vec<usize> = (0..m).filter(|&j| best[j]).collect();
    Ok(SolveReport {
        solver: Solver::SimulatedAnnealing,
        portfolio: Portfolio::evaluate(market, &members)?,
        certificate: Certificate::Heuristic,
        stats: SolveStats {
            iterations: Some(params.iterations),
            ..SolveStats::default()
        },
        wall_time: started.elapsed(),
    })
}
