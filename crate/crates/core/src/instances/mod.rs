//! Synthetic markets, the knapsack reduction, and market file I/O.

mod generator;
mod knapsack;

pub use crate::market::{read_market, write_market};
pub use generator::{generate_market, sample_school, CostMode, GeneratorConfig, SampledSchool};
pub use knapsack::{
    knapsack_to_market, read_knapsack, write_knapsack, KnapsackInstance, Reduction,
};
