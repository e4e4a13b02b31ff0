#![allow(dead_code)]

pub mod suites;

use collegeapp::homogeneous::{frontier, naive_portfolio};
use collegeapp::{brute_force, canonicalize, CanonicalMarket, Market, School};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PLANETS_JSON: &str = include_str!("../../../../data/planets.json");
pub const NONNESTED_JSON: &str = include_str!("../../../../data/nonnested.json");
pub const LADDER_JSON: &str = include_str!("../../../../data/ladder.json");
pub const GOLDEN_SEED42_JSON: &str = include_str!("../../../../data/generated_seed42_m8.json");

pub const PLANETS_T: [f64; 8] = [200.0, 250.0, 300.0, 350.0, 400.0, 450.0, 500.0, 550.0];
pub const PLANETS_F: [f64; 8] = [0.39, 0.33, 0.24, 0.24, 0.05, 0.03, 0.10, 0.12];
pub const PLANETS_ORDER: [usize; 8] = [4, 2, 8, 1, 7, 3, 5, 6];
pub const PLANETS_V: [f64; 8] = [84.0, 146.7, 195.1, 230.0, 257.7, 281.5, 288.8, 294.1];
/// Exact frontier values; the printed table rounds the fifth to 257.7.
pub const PLANETS_EXACT: [f64; 8] = [
    84.0,
    146.7,
    195.096,
    230.047488,
    257.6427392,
    281.513441792,
    288.7777697024,
    294.106436611328,
];
pub const SECOND_ROUND_SCORES: [f64; 7] = [59.28, 62.7, 54.72, 15.8, 10.98, 41.6, 55.92];

pub fn planets() -> Market {
    Market::homogeneous(&PLANETS_T, &PLANETS_F, 8)
}

pub fn trio() -> Market {
    Market::homogeneous(&[70.0, 80.0, 90.0], &[0.4, 0.4, 0.3], 2)
}

pub fn nonnested(budget: f64) -> Market {
    Market::from_columns(0.0, &[1.0, 1.0, 219.0], &[0.5; 3], &[1.0, 1.0, 3.0], budget)
}

pub fn ratio_trap() -> Market {
    Market::from_columns(0.0, &[10.0, 2021.0], &[0.1, 0.1], &[1.0, 500.0], 500.0)
}

/// `m - 1` sure things worth `1/(m-1)` each at unit cost, and one long shot
/// worth `m - 1` with probability `1/(m-1)` costing the whole budget.
pub fn surrogate_gap(m: usize) -> Market {
    let k = (m - 1) as f64;
    let mut t = vec![1.0 / k; m - 1];
    let mut f = vec![1.0; m - 1];
    let mut g = vec![1.0; m - 1];
    t.push(k);
    f.push(1.0 / k);
    g.push(k);
    Market::from_columns(0.0, &t, &f, &g, k)
}

/// `h` sure schools with `t = 1`, then `f = eps^i`, `t = eps^-i`.
pub fn naive_worst_case(h: usize, eps: f64) -> Market {
    let mut t = vec![1.0; h];
    let mut f = vec![1.0; h];
    for i in 1..=h {
        let p = eps.powi(i as i32);
        f.push(p);
        t.push(1.0 / p);
    }
    Market::homogeneous(&t, &f, h)
}

pub fn canon(m: &Market) -> CanonicalMarket {
    canonicalize(m).expect("valid market")
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Seeded random market with integral utilities (so ties occur), `f` in
/// hundredths, and integral costs in `1..=10` (all 1 when `unit`).
pub fn seeded_market(rng: &mut ChaCha8Rng, max_m: usize, unit: bool) -> Market {
    let m = rng.random_range(1..=max_m);
    let schools: Vec<School> = (0..m)
        .map(|_| {
            let t = rng.random_range(1..=60) as f64;
            let f = rng.random_range(1..=100) as f64 / 100.0;
            let g = if unit {
                1.0
            } else {
                rng.random_range(1..=10) as f64
            };
            School::new(t, f, g)
        })
        .collect();
    let total: f64 = schools.iter().map(|s| s.g).sum();
    let budget = if unit {
        rng.random_range(1..=m) as f64
    } else {
        rng.random_range(1..=total as u64) as f64
    };
    Market::new(0.0, budget, schools)
}

/// Like [`seeded_market`] with real-valued costs and budget.
pub fn seeded_real_market(rng: &mut ChaCha8Rng, max_m: usize) -> Market {
    let m = rng.random_range(1..=max_m);
    let schools: Vec<School> = (0..m)
        .map(|_| {
            let t: f64 = rng.random_range(0.5..100.0);
            let f: f64 = rng.random_range(0.01..=1.0);
            let g: f64 = rng.random_range(0.5..10.0);
            School::new(t, f, g)
        })
        .collect();
    let total: f64 = schools.iter().map(|s| s.g).sum();
    let budget = rng.random_range(0.5..=total);
    Market::new(0.0, budget, schools)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- proptest strategies ----

fn school_strategy(unit: bool) -> impl Strategy<Value = School> {
    let g = if unit {
        Just(1.0).boxed()
    } else {
        (1u32..=10).prop_map(f64::from).boxed()
    };
    (1u32..=200, 1u32..=100, g).prop_map(|(t, f, g)| School::new(t as f64, f as f64 / 100.0, g))
}

/// Markets with every school affordable (budget = total cost), `t0 = 0`.
pub fn arb_market(max_m: usize, unit: bool) -> impl Strategy<Value = Market> {
    prop::collection::vec(school_strategy(unit), 1..=max_m).prop_map(|schools| {
        let total: f64 = schools.iter().map(|s| s.g).sum();
        Market::new(0.0, total, schools)
    })
}

/// A market and a subset mask over its canonical positions.
pub fn arb_market_and_mask(max_m: usize) -> impl Strategy<Value = (Market, u64)> {
    arb_market(max_m, false).prop_flat_map(|m| {
        let n = m.len();
        (Just(m), 0u64..(1u64 << n))
    })
}

pub fn members(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|&j| mask >> j & 1 == 1).collect()
}

// ---- property checks, shared by the proptest suites and the acceptance run ----

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `v(X + j) - v(X) >= v(X + j + k) - v(X + k)` for `j != k` outside `X`.
pub fn check_submodular(market: &Market, mask: u64, j: usize, k: usize) -> Check {
    let c = canon(market);
    let m = c.len();
    if m < 2 {
        return Ok(());
    }
    let (j, k) = (j % m, k % m);
    if j == k {
        return Ok(());
    }
    let x: Vec<usize> = members(mask, m)
        .into_iter()
        .filter(|&i| i != j && i != k)
        .collect();
    let with = |extra: &[usize]| {
        let mut s = x.clone();
        s.extend_from_slice(extra);
        c.valuate(&s).unwrap()
    };
    let lhs = with(&[j]) - with(&[]);
    let rhs = with(&[j, k]) - with(&[k]);
    ensure(lhs >= rhs - 1e-12 * with(&[j, k]).max(1.0), || {
        format!("submodularity: {lhs} < {rhs} for X={x:?}, j={j}, k={k}")
    })
}

/// `X` subset of `Y` implies `v(X) <= v(Y)`.
pub fn check_monotone(market: &Market, x_mask: u64, extra_mask: u64) -> Check {
    let c = canon(market);
    let m = c.len();
    let x = members(x_mask, m);
    let y = members(x_mask | extra_mask, m);
    let (vx, vy) = (c.valuate(&x).unwrap(), c.valuate(&y).unwrap());
    ensure(vx <= vy + 1e-12 * vy.max(1.0), || {
        format!("monotonicity: v({x:?})={vx} > v({y:?})={vy}")
    })
}

/// Shifting every utility and `t0` by `gamma` shifts every valuation by
/// `gamma` and leaves the optimal set unchanged.
pub fn check_shift_invariance(market: &Market, gamma: f64, mask: u64) -> Check {
    let mut shifted = market.clone();
    shifted.t0 -= gamma;
    for s in &mut shifted.schools {
        s.t -= gamma;
    }
    let x = members(mask, market.len());
    let (a, b) = (market.valuate(&x).unwrap(), shifted.valuate(&x).unwrap());
    ensure(rel_close(a - gamma, b, 1e-12), || {
        format!("shift: {a} - {gamma} != {b}")
    })?;
    let (ca, cb) = (canon(market), canon(&shifted));
    let (pa, pb) = (brute_force(&ca).unwrap(), brute_force(&cb).unwrap());
    ensure(pa.ids(&ca) == pb.ids(&cb), || {
        format!(
            "shift changed the optimum: {:?} vs {:?}",
            pa.ids(&ca),
            pb.ids(&cb)
        )
    })
}

/// `v(reduced, X) + offset = v(original, X + k)`.
pub fn check_elimination(market: &Market, k: usize, mask: u64) -> Check {
    let c = canon(market);
    let m = c.len();
    if m == 0 {
        return Ok(());
    }
    let kpos = k % m;
    let id = c.ids()[kpos];
    let r = c.eliminate(id).map_err(|e| e.to_string())?;
    let ids: Vec<usize> = members(mask, m)
        .into_iter()
        .filter(|&j| j != kpos)
        .map(|j| c.ids()[j])
        .collect();
    let reduced_pos: Vec<usize> = ids
        .iter()
        .map(|&i| r.reduced.position_of(i).unwrap())
        .collect();
    let mut full: Vec<usize> = ids.iter().map(|&i| c.position_of(i).unwrap()).collect();
    full.push(kpos);
    let lhs = r.reduced.valuate(&reduced_pos).unwrap() + r.offset;
    let rhs = c.valuate(&full).unwrap();
    ensure(rel_close(lhs, rhs, 1e-12), || {
        format!("elimination of {id}: {lhs} != {rhs}")
    })?;
    ensure(r.reduced.t().iter().all(|&t| t >= 0.0), || {
        "negative transformed utility".into()
    })?;
    ensure(r.reduced.t().windows(2).all(|w| w[0] <= w[1]), || {
        "elimination broke the utility order".into()
    })
}

/// Frontier increments are nonincreasing.
pub fn check_concave(market: &Market) -> Check {
    let c = canon(market);
    let inc = frontier(&c).increments();
    for w in inc.windows(2) {
        ensure(w[0] >= w[1] - 1e-9, || {
            format!("increments not concave: {w:?}")
        })?;
    }
    Ok(())
}

/// `v(naive_h) >= v(opt_h) / h` and `v(opt_h) <= sum over naive_h of f t`.
pub fn check_naive_bound(market: &Market, h: usize) -> Check {
    let c = canon(market);
    let m = c.len();
    if m == 0 {
        return Ok(());
    }
    let h = 1 + (h - 1) % m;
    let naive = naive_portfolio(&c, h).unwrap();
    let opt = frontier(&c).portfolio(h);
    ensure(naive.value >= opt.value / h as f64 - 1e-9, || {
        format!("naive {} below optimum {} / {h}", naive.value, opt.value)
    })?;
    let bound: f64 = naive.members.iter().map(|&j| c.f()[j] * c.t()[j]).sum();
    ensure(opt.value <= bound + 1e-9 * bound.max(1.0), || {
        format!(
            "optimum {} above naive expected-utility sum {bound}",
            opt.value
        )
    })
}

/// On the naive worst-case market, `v(naive) / v(opt)` is within 1% of `1/h`.
pub fn check_naive_worst_case(h: usize, eps: f64) -> Check {
    let c = canon(&naive_worst_case(h, eps));
    let naive = naive_portfolio(&c, h).unwrap();
    let opt = frontier(&c).portfolio(h);
    let ratio = naive.value / opt.value;
    let target = 1.0 / h as f64;
    ensure((ratio - target).abs() <= 0.01 * target, || {
        format!("h={h}: ratio {ratio} not within 1% of {target}")
    })
}
