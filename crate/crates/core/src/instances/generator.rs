//! Random markets following the synthetic protocol used in the experiments.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, so a seed yields the same market on every
//! platform. Exponential draws use the inverse CDF `-scale * ln(1 - U)`
//! rather than a sampler whose algorithm might change between releases.
//! Per school, values are drawn in the order `t`, `Q`, `g`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{Market, School};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    /// `g = 1`, budget `floor(m / 2)` (at least 1).
    Homogeneous,
    /// `g` uniform on `{5, ..., 10}`, budget `floor(sum g / 2)`.
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub m: usize,
    pub cost_mode: CostMode,
    pub seed: u64,
    /// Mean of the exponential utility draw.
    pub utility_scale: f64,
}

impl GeneratorConfig {
    pub fn new(m: usize, cost_mode: CostMode, seed: u64) -> Self {
        GeneratorConfig {
            m,
            cost_mode,
            seed,
            utility_scale: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSchool {
    /// The exponential draw before rounding up.
    pub raw_t: f64,
    pub school: School,
}

/// Draws one school. `t = ceil(Exp(scale))` (a draw of exactly zero becomes
/// 1), `f = 1 / (t + 10 Q)` with `Q ~ U[0, 1)`.
pub fn sample_school<R: Rng + ?Sized>(rng: &mut R, scale: f64, mode: CostMode) -> SampledSchool {
    let u: f64 = rng.random();
    let raw_t = -scale * (1.0 - u).ln();
    let t = raw_t.ceil().max(1.0);
    let q: f64 = rng.random();
    let f = 1.0 / (t + 10.0 * q);
    let g = match mode {
        CostMode::Homogeneous => 1.0,
        CostMode::Heterogeneous => rng.random_range(5..=10) as f64,
    };
    SampledSchool {
        raw_t,
        school: School::new(t, f, g),
    }
}

pub fn generate_market(config: &GeneratorConfig) -> Result<Market> {
    if config.m == 0 {
        return Err(Error::invalid_at("m", "market size must be at least 1"));
    }
    if !(config.utility_scale.is_finite() && config.utility_scale > 0.0) {
        return Err(Error::invalid_at("utility_scale", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let schools: Vec<School> = (0..config.m)
        .map(|_| sample_school(&mut rng, config.utility_scale, config.cost_mode).school)
        .collect();
    let budget = match config.cost_mode {
        CostMode::Homogeneous => (config.m / 2).max(1) as f64,
        CostMode::Heterogeneous => (schools.iter().map(|s| s.g).sum::<f64>() / 2.0).floor(),
    };
    Ok(Market::new(0.0, budget, schools))
}
