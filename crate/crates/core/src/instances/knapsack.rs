//! Reduction from 0-1 knapsack to the college application problem.
//!
//! Every school gets the same tiny admission probability `delta = 1/D` with
//! `D = m * sum(u)`, utility `t_j = u_j * D` (so `f_j t_j = u_j`), cost `w_j`
//! and budget `W`. For nonempty `X` the valuation then satisfies
//! `sum_X u - 1 < v(X) <= sum_X u`, so rounding up recovers the knapsack value.
//! Valuations on the knapsack side are computed in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{path_error, Market, School};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackInstance {
    pub u: Vec<u64>,
    pub w: Vec<u64>,
    #[serde(rename = "W")]
    pub capacity: u64,
    /// Target value of the decision form.
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
}

impl KnapsackInstance {
    pub fn new(u: Vec<u64>, w: Vec<u64>, capacity: u64) -> Self {
        KnapsackInstance {
            u,
            w,
            capacity,
            target: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.u.len() != self.w.len() {
            return Err(Error::invalid_at(
                "w",
                format!("{} weights for {} utilities", self.w.len(), self.u.len()),
            ));
        }
        if self.capacity == 0 {
            return Err(Error::invalid_at("W", "capacity must be positive"));
        }
        if let Some(j) = self.u.iter().position(|&u| u == 0) {
            return Err(Error::invalid_at(
                format!("u[{j}]"),
                "utilities must be positive",
            ));
        }
        if let Some(j) = self.w.iter().position(|&w| w == 0) {
            return Err(Error::invalid_at(
                format!("w[{j}]"),
                "weights must be positive",
            ));
        }
        Ok(())
    }

    /// Items that fit on their own, ascending by utility (stable).
    pub fn normalized_items(&self) -> Result<Vec<usize>> {
        self.validate()?;
        let mut items: Vec<usize> = (0..self.u.len())
            .filter(|&j| self.w[j] <= self.capacity)
            .collect();
        if items.is_empty() {
            return Err(Error::invalid("knapsack instance has no item that fits"));
        }
        items.sort_by_key(|&j| self.u[j]);
        Ok(items)
    }
}

/// The reduced market together with the data to map valuations back.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub market: Market,
    /// `D = m * sum(u)`; every admission probability is `1/D`.
    pub denominator: BigInt,
    /// Knapsack item behind each school, in market order.
    pub items: Vec<usize>,
    utilities: Vec<u64>,
}

impl Reduction {
    /// Exact `v(X)` for school indices `members` of the reduced market.
    pub fn exact_value(&self, members: &[usize]) -> BigRational {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let keep = BigRational::one() - BigRational::new(BigInt::one(), self.denominator.clone());
        sorted.iter().fold(BigRational::zero(), |acc, &j| {
            acc * &keep + BigRational::from_integer(BigInt::from(self.utilities[j]))
        })
    }

    /// `ceil(v(X))`, which equals the knapsack value of the same items.
    pub fn knapsack_value(&self, members: &[usize]) -> u64 {
        self.exact_value(members)
            .ceil()
            .to_integer()
            .to_u64()
            .expect("knapsack values fit in u64")
    }

    /// `sum u_j` over `members`.
    pub fn utility_sum(&self, members: &[usize]) -> u64 {
        members.iter().map(|&j| self.utilities[j]).sum()
    }
}

pub fn knapsack_to_market(kp: &KnapsackInstance) -> Result<Reduction> {
    let items = kp.normalized_items()?;
    let utilities: Vec<u64> = items.iter().map(|&j| kp.u[j]).collect();
    let total: BigInt = utilities.iter().map(|&u| BigInt::from(u)).sum();
    let denominator = BigInt::from(items.len()) * total;
    let d = denominator.to_f64().expect("denominator is finite");
    let schools = items
        .iter()
        .map(|&j| School::new(kp.u[j] as f64 * d, 1.0 / d, kp.w[j] as f64))
        .collect();
    Ok(Reduction {
        market: Market::new(0.0, kp.capacity as f64, schools),
        denominator,
        items,
        utilities,
    })
}

pub fn read_knapsack(json: &str) -> Result<KnapsackInstance> {
    let mut de = serde_json::Deserializer::from_str(json);
    let kp: KnapsackInstance = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
    de.end().map_err(|e| Error::invalid(e.to_string()))?;
    kp.validate()?;
    Ok(kp)
}

pub fn write_knapsack(kp: &KnapsackInstance) -> String {
    let mut s = serde_json::to_string(kp).expect("knapsack serialization cannot fail");
    s.push('\n');
    s
}
