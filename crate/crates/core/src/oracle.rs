//! Exhaustive enumeration, used as the reference answer in tests.

use crate::canonical::{fits, CanonicalMarket, Portfolio};
use crate::error::{Error, RefusalReason, Result};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// Best feasible portfolio by enumerating all `2^m` subsets.
///
/// Ties (within 1e-12 relative) go to the lexicographically smallest member
/// list. Refuses markets larger than [`DEFAULT_BRUTE_FORCE_CAP`].
pub fn brute_force(market: &CanonicalMarket) -> Result<Portfolio> {
    brute_force_with_cap(market, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap(market: &CanonicalMarket, cap: usize) -> Result<Portfolio> {
    brute_force_filtered(market, cap, |_| true)
}

/// Like [`brute_force`] but only over subsets whose bitmask passes `admit`.
pub fn brute_force_filtered(
    market: &CanonicalMarket,
    cap: usize,
    admit: impl Fn(u64) -> bool,
) -> Result<Portfolio> {
    let m = market.len();
    if m > cap || m >= 64 {
        return Err(Error::refused(
            RefusalReason::TooManySchools,
            format!("brute force is capped at {cap} schools; this market has {m}"),
        ));
    }
    let mut best: Option<Portfolio> = None;
    let mut members = Vec::with_capacity(m);
    for mask in 0u64..(1u64 << m) {
        if !admit(mask) {
            continue;
        }
        members.clear();
        members.extend((0..m).filter(|&j| mask >> j & 1 == 1));
        if !fits(market.cost(&members), market.budget()) {
            continue;
        }
        let value = market.value_sorted(&members);
        let better = match &best {
            None => true,
            Some(b) => {
                let tol = 1e-12 * b.value.abs().max(value.abs());
                value > b.value + tol || (value >= b.value - tol && members < b.members)
            }
        };
        if better {
            best = Some(Portfolio {
                members: members.clone(),
                value,
            });
        }
    }
    Ok(best.unwrap_or_else(Portfolio::empty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::market::Market;

    #[test]
    fn trio_cardinality_two() {
        let m = canonicalize(&Market::homogeneous(
            &[70.0, 80.0, 90.0],
            &[0.4, 0.4, 0.3],
            2,
        ))
        .unwrap();
        let best = brute_force(&m).unwrap();
        assert_eq!(best.members, vec![1, 2]);
        assert!((best.value - 49.4).abs() < 1e-12);
    }

    #[test]
    fn non_nested_optima() {
        let at = |h: f64| {
            let m = Market::from_columns(0.0, &[1.0, 1.0, 219.0], &[0.5; 3], &[1.0, 1.0, 3.0], h);
            brute_force(&canonicalize(&m).unwrap()).unwrap().members
        };
        assert_eq!(at(2.0), vec![0, 1]);
        assert_eq!(at(3.0), vec![2]);
    }

    #[test]
    fn single_affordable_school() {
        let m = Market::from_columns(0.0, &[3.0, 9.0], &[0.5, 0.5], &[1.0, 4.0], 2.0);
        let best = brute_force(&canonicalize(&m).unwrap()).unwrap();
        assert_eq!(best.members, vec![0]);
    }

    #[test]
    fn refuses_above_cap() {
        let m = Market::homogeneous(&[1.0; 5], &[0.5; 5], 2);
        let err = brute_force_with_cap(&canonicalize(&m).unwrap(), 4).unwrap_err();
        assert_eq!(err.refusal(), Some(RefusalReason::TooManySchools));
    }

    #[test]
    fn ties_prefer_lexicographically_smallest() {
        let m = canonicalize(&Market::homogeneous(&[2.0, 2.0, 2.0], &[0.5; 3], 1)).unwrap();
        assert_eq!(brute_force(&m).unwrap().members, vec![0]);
    }
}
