//! Seeded batch checks against the brute-force oracle.

use collegeapp::heterogeneous::{
    branch_and_bound, dp_costs, fptas, ratio_greedy, simulated_annealing, BranchAndBound, SaParams,
};
use collegeapp::homogeneous::{frontier, naive_portfolio};
use collegeapp::instances::{knapsack_to_market, KnapsackInstance};
use collegeapp::{brute_force, brute_force_with_cap, canonicalize, Certificate};
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::Rng;

use super::*;

/// Cost DP, branch-and-bound and brute force agree on integral markets.
pub fn heterogeneous_oracle(seed: u64, count: usize, max_m: usize) -> Check {
    let mut r = rng(seed);
    for i in 0..count {
        let market = seeded_market(&mut r, max_m, false);
        let c = canon(&market);
        let exact = brute_force(&c).unwrap().value;
        let dp = dp_costs(&c).unwrap();
        let bnb = branch_and_bound(&c).unwrap();
        for (name, rep) in [("dp", &dp), ("bnb", &bnb)] {
            ensure(rel_close(rep.value(), exact, 1e-9), || {
                format!(
                    "instance {i}: {name} {} vs brute force {exact}",
                    rep.value()
                )
            })?;
            ensure(rep.portfolio.cost(&c) <= c.budget() + 1e-9, || {
                format!("instance {i}: {name} over budget")
            })?;
            ensure(
                rel_close(
                    rep.value(),
                    c.valuate(&rep.portfolio.members).unwrap(),
                    1e-12,
                ),
                || format!("instance {i}: {name} cached value differs from re-valuation"),
            )?;
        }
    }
    Ok(())
}

/// Every greedy prefix matches brute force under the matching cardinality limit.
pub fn homogeneous_oracle(seed: u64, count: usize, max_m: usize) -> Check {
    let mut r = rng(seed);
    for i in 0..count {
        let market = seeded_market(&mut r, max_m, true);
        let mut all = market.clone();
        all.budget = market.len() as f64;
        let c = canon(&all);
        let fr = frontier(&c);
        for h in 1..=c.len() {
            let exact = brute_force(&c.with_budget(h as f64)).unwrap().value;
            ensure(rel_close(fr.values[h - 1], exact, 1e-9), || {
                format!(
                    "instance {i}, h={h}: greedy {} vs brute force {exact}",
                    fr.values[h - 1]
                )
            })?;
        }
    }
    Ok(())
}

/// The FPTAS re-valuation is at least `(1 - eps)` times the optimum.
pub fn fptas_guarantee(seed: u64, count: usize, max_m: usize, eps: f64) -> Check {
    let mut r = rng(seed);
    for i in 0..count {
        let market = if i % 2 == 0 {
            seeded_market(&mut r, max_m, false)
        } else {
            seeded_real_market(&mut r, max_m)
        };
        let c = canon(&market);
        let exact = brute_force(&c).unwrap().value;
        let rep = fptas(&c, eps).unwrap();
        let value = c.valuate(&rep.portfolio.members).unwrap();
        ensure(value >= (1.0 - eps) * exact, || {
            format!("instance {i}: fptas({eps}) {value} < (1 - eps) * {exact}")
        })?;
        ensure(rep.portfolio.cost(&c) <= c.budget() * (1.0 + 1e-12), || {
            format!("instance {i}: fptas over budget")
        })?;
        if let Certificate::Approximate {
            fixed_point_value, ..
        } = rep.certificate
        {
            ensure(value >= fixed_point_value - 1e-9 * value.max(1.0), || {
                format!("instance {i}: exact {value} below fixed-point value {fixed_point_value}")
            })?;
        }
    }
    Ok(())
}

fn knapsack_brute_force(kp: &KnapsackInstance) -> u64 {
    let n = kp.u.len();
    (0u64..1 << n)
        .filter(|mask| {
            let w: u64 = (0..n)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| kp.w[j])
                .sum();
            w <= kp.capacity
        })
        .map(|mask| {
            (0..n)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| kp.u[j])
                .sum()
        })
        .max()
        .unwrap_or(0)
}

/// The reduced market's optimum rounds up to the knapsack optimum, and the
/// valuation sandwich `sum u - 1 < v(X) <= sum u` holds for sampled `X`.
pub fn knapsack_reduction(seed: u64, count: usize, max_m: usize) -> Check {
    let mut r = rng(seed);
    for i in 0..count {
        let n = r.random_range(1..=max_m);
        let u: Vec<u64> = (0..n).map(|_| r.random_range(1..=30)).collect();
        let w: Vec<u64> = (0..n).map(|_| r.random_range(1..=15)).collect();
        let capacity = r.random_range(*w.iter().min().unwrap()..=w.iter().sum::<u64>());
        let kp = KnapsackInstance::new(u, w, capacity);
        let red = knapsack_to_market(&kp).map_err(|e| e.to_string())?;
        let c = canon(&red.market);
        let best = dp_costs(&c).unwrap();
        let got = red.knapsack_value(&best.portfolio.ids(&c));
        let want = knapsack_brute_force(&kp);
        ensure(got == want, || {
            format!("instance {i}: ceil v(X*) = {got}, knapsack optimum {want}")
        })?;

        let m = red.market.len();
        let samples: Vec<u64> = if m <= 8 {
            (1..1u64 << m).collect()
        } else {
            (0..256).map(|_| r.random_range(1..1u64 << m)).collect()
        };
        for mask in samples {
            let x = members(mask, m);
            let v = red.exact_value(&x);
            let s = BigRational::from_u64(red.utility_sum(&x)).unwrap();
            let one = BigRational::from_u64(1).unwrap();
            ensure(&s - &one < v && v <= s, || {
                format!("instance {i}: sandwich fails for {x:?}")
            })?;
            // The float market agrees with the exact value.
            let vf = red.market.valuate(&x).unwrap();
            let ve = num_traits::ToPrimitive::to_f64(&red.exact_value(&x)).unwrap();
            ensure(rel_close(vf, ve, 1e-9), || {
                format!("instance {i}: float {vf} vs exact {ve}")
            })?;
        }
    }
    Ok(())
}

/// Small counterexamples to tempting shortcuts.
pub fn counterexamples() -> Check {
    // Non-nestedness with heterogeneous costs.
    let at = |h: f64| {
        let c = canon(&nonnested(h));
        let p = dp_costs(&c).unwrap().portfolio;
        (p.ids(&c), brute_force(&c).unwrap().ids(&c))
    };
    let (dp2, bf2) = at(2.0);
    let (dp3, bf3) = at(3.0);
    ensure(dp2 == vec![0, 1] && bf2 == vec![0, 1], || {
        format!("H=2 optimum {dp2:?}/{bf2:?}")
    })?;
    ensure(dp3 == vec![2] && bf3 == vec![2], || {
        format!("H=3 optimum {dp3:?}/{bf3:?}")
    })?;
    ensure(!dp2.iter().all(|j| dp3.contains(j)), || {
        "optimal sets unexpectedly nested".into()
    })?;

    // Greedy by ratio is trapped; the DP is not.
    let c = canon(&ratio_trap());
    let start = ratio_greedy(&c);
    ensure(start.ids(&c) == vec![0], || {
        format!("ratio greedy start {:?}", start.ids(&c))
    })?;
    let dp = dp_costs(&c).unwrap();
    ensure(dp.portfolio.ids(&c) == vec![1], || {
        format!("dp picks {:?}", dp.portfolio.ids(&c))
    })?;
    ensure((dp.value() - 202.1).abs() < 1e-9, || {
        format!("dp value {}", dp.value())
    })?;

    // The knapsack surrogate sum f t does not see the difference.
    for m in [3usize, 6, 10] {
        let c = canon(&surrogate_gap(m));
        let k = (m - 1) as f64;
        let sure: Vec<usize> = (0..m - 1).map(|i| c.position_of(i).unwrap()).collect();
        let surrogate: f64 = sure.iter().map(|&j| c.f()[j] * c.t()[j]).sum();
        let v_sure = c.valuate(&sure).unwrap();
        ensure((surrogate - 1.0).abs() < 1e-9, || {
            format!("m={m}: surrogate {surrogate}")
        })?;
        ensure((v_sure - 1.0 / k).abs() < 1e-12, || {
            format!("m={m}: v(Y) = {v_sure}")
        })?;
        let dp = dp_costs(&c).unwrap();
        ensure((dp.value() - 1.0).abs() < 1e-12, || {
            format!("m={m}: dp value {}", dp.value())
        })?;
        ensure(dp.portfolio.ids(&c) == vec![m - 1], || {
            format!("m={m}: dp picks {:?}", dp.portfolio.ids(&c))
        })?;
    }
    Ok(())
}

/// Incumbent never exceeds the optimum; the best remaining bound (or the
/// incumbent once nothing is open) never falls below it.
pub fn bnb_soundness(seed: u64, count: usize, max_m: usize) -> Check {
    let mut r = rng(seed);
    let solver = BranchAndBound {
        record_snapshots: true,
        ..BranchAndBound::default()
    };
    for i in 0..count {
        let market = seeded_market(&mut r, max_m, false);
        let c = canon(&market);
        let exact = brute_force(&c).unwrap().value;
        let out = solver.solve(&c).unwrap();
        let tol = 1e-9 * exact.max(1.0);
        for s in &out.snapshots {
            ensure(s.incumbent <= exact + tol, || {
                format!("instance {i}: incumbent above optimum")
            })?;
            let reach = s
                .best_open_bound
                .map_or(s.incumbent, |b| b.max(s.incumbent));
            ensure(reach >= exact - tol, || {
                format!("instance {i}: bounds {reach} below optimum {exact}")
            })?;
        }
        ensure(out.incumbents.windows(2).all(|w| w[0].1 < w[1].1), || {
            format!("instance {i}: incumbent trace not increasing")
        })?;
    }
    Ok(())
}

/// Brute force restricted to portfolios containing `lock_in` and avoiding `lock_out`.
pub fn constrained_optimum(market: &Market, lock_in: &[usize], lock_out: &[usize]) -> f64 {
    let c = canonicalize(market).unwrap();
    let pos = |ids: &[usize]| -> u64 {
        ids.iter()
            .filter_map(|&i| c.position_of(i))
            .fold(0, |acc, j| acc | 1 << j)
    };
    let (need, avoid) = (pos(lock_in), pos(lock_out));
    // Locked schools outside the canonical market still spend budget.
    let dead: f64 = lock_in
        .iter()
        .filter(|&&i| c.position_of(i).is_none())
        .map(|&i| market.schools[i].g)
        .sum();
    let c = c.with_budget(c.budget() - dead);
    let best =
        collegeapp::brute_force_filtered(&c, 20, |mask| mask & need == need && mask & avoid == 0)
            .unwrap();
    best.value + c.shift()
}

/// SA with the same seed returns the same result; different calls do not
/// interfere.
pub fn sa_deterministic(seed: u64, count: usize) -> Check {
    let mut r = rng(seed);
    for i in 0..count {
        let c = canon(&seeded_market(&mut r, 40, false));
        let p = SaParams {
            seed: i as u64,
            ..SaParams::default()
        };
        let a = simulated_annealing(&c, &p).unwrap();
        let b = simulated_annealing(&c, &p).unwrap();
        ensure(a.portfolio == b.portfolio, || {
            format!("instance {i}: SA not deterministic")
        })?;
        ensure(a.value() >= ratio_greedy(&c).value - 1e-12, || {
            format!("instance {i}: SA below its start")
        })?;
    }
    Ok(())
}

pub fn trio_golden() -> Check {
    let c = canon(&trio());
    let naive = naive_portfolio(&c, 2).unwrap();
    let opt = frontier(&c).portfolio(2);
    let bf = brute_force_with_cap(&c, 20).unwrap();
    ensure(naive.ids(&c) == vec![0, 1], || {
        format!("naive picks {:?}", naive.ids(&c))
    })?;
    ensure((naive.value - 48.8).abs() < 1e-9, || {
        format!("naive value {}", naive.value)
    })?;
    ensure(opt.ids(&c) == vec![1, 2], || {
        format!("optimum {:?}", opt.ids(&c))
    })?;
    ensure((opt.value - 49.4).abs() < 1e-9, || {
        format!("optimal value {}", opt.value)
    })?;
    ensure((bf.value - 49.4).abs() < 1e-9, || {
        format!("brute force {}", bf.value)
    })
}
