//! Timing and accuracy experiments on synthetic markets.
//!
//! Each timing cell generates `instances` markets, runs the solver `reps`
//! times on each and keeps the fastest run, then reports the mean and
//! sample standard deviation of those per-market minima. One untimed run
//! precedes every cell. Markets are canonicalized (sorted) before timing.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, CanonicalMarket};
use crate::error::{Error, Result};
use crate::heterogeneous::{branch_and_bound, dp_costs, fptas, simulated_annealing, SaParams};
use crate::homogeneous::{greedy_optimal, CandidateStore};
use crate::instances::{generate_market, CostMode, GeneratorConfig};

/// Largest market on which experiment 2 runs branch-and-bound.
pub const BNB_BENCH_LIMIT: usize = 32;

pub const CSV_HEADER: &str = "experiment,m,algorithm,params,mean_ms,std_ms,n";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub reps: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>) -> Self {
        BenchConfig {
            sizes,
            instances: 50,
            reps: 3,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::invalid_at("instances", "must be at least 1"));
        }
        if self.reps == 0 {
            return Err(Error::invalid_at("reps", "must be at least 1"));
        }
        if let Some(&m) = self.sizes.iter().find(|&&m| m == 0) {
            return Err(Error::invalid_at(
                "sizes",
                format!("market size {m} is not positive"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub experiment: u8,
    pub m: usize,
    pub algorithm: String,
    pub params: String,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub host: String,
    pub os: String,
    pub arch: String,
    pub profile: String,
    pub version: String,
}

impl Environment {
    pub fn current() -> Self {
        let host = std::env::var("HOSTNAME")
            .ok()
            .or_else(|| std::fs::read_to_string("/etc/hostname").ok())
            .map(|h| h.trim().to_string())
            .filter(|h| !h.is_empty())
            .unwrap_or_else(|| "unknown".into());
        Environment {
            host,
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            profile: if cfg!(debug_assertions) {
                "debug"
            } else {
                "optimized"
            }
            .into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub experiment: u8,
    pub rows: Vec<BenchRow>,
    pub environment: Environment,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }

    pub fn row(&self, m: usize, algorithm: &str, params: &str) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.m == m && r.algorithm == algorithm && r.params == params)
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("writing to memory cannot fail");
    }
    let bytes = w.into_inner().expect("flushing to memory cannot fail");
    let body = String::from_utf8(bytes).expect("csv output is utf-8");
    if rows.is_empty() {
        format!("{CSV_HEADER}\n")
    } else {
        body
    }
}

/// Mean and sample standard deviation (zero for a single sample).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn market_seed(seed: u64, m: usize, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((m as u64) << 20)
        .wrapping_add(k as u64)
}

fn markets(cfg: &BenchConfig, m: usize, mode: CostMode) -> Result<Vec<CanonicalMarket>> {
    (0..cfg.instances)
        .map(|k| {
            let market =
                generate_market(&GeneratorConfig::new(m, mode, market_seed(cfg.seed, m, k)))?;
            canonicalize(&market)
        })
        .collect()
}

/// Times `run` on every market; returns per-market best-of-`reps` in ms.
fn time_cell<F>(markets: &[CanonicalMarket], reps: usize, mut run: F) -> Result<Vec<f64>>
where
    F: FnMut(&CanonicalMarket) -> Result<()>,
{
    if let Some(first) = markets.first() {
        run(first)?;
    }
    let mut best = Vec::with_capacity(markets.len());
    for market in markets {
        let mut fastest = f64::INFINITY;
        for _ in 0..reps {
            let started = Instant::now();
            run(market)?;
            fastest = fastest.min(started.elapsed().as_secs_f64() * 1e3);
        }
        best.push(fastest);
    }
    Ok(best)
}

fn row(experiment: u8, m: usize, algorithm: &str, params: &str, times: &[f64]) -> BenchRow {
    let (mean_ms, std_ms) = mean_std(times);
    BenchRow {
        experiment,
        m,
        algorithm: algorithm.into(),
        params: params.into(),
        mean_ms,
        std_ms,
        n: times.len(),
    }
}

/// Unit costs, `h = floor(m / 2)`: greedy with a list against a heap.
pub fn experiment1(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &m in &cfg.sizes {
        let markets = markets(cfg, m, CostMode::Homogeneous)?;
        for (store, name) in [
            (CandidateStore::List, "list"),
            (CandidateStore::Heap, "heap"),
        ] {
            let times = time_cell(&markets, cfg.reps, |market| {
                let h = (market.budget() as usize).min(market.len());
                if h > 0 {
                    std::hint::black_box(greedy_optimal(market, h, store)?);
                }
                Ok(())
            })?;
            rows.push(row(1, m, "greedy", &format!("store={name}"), &times));
        }
    }
    Ok(BenchReport {
        experiment: 1,
        rows,
        environment: Environment::current(),
    })
}

/// Heterogeneous costs: branch-and-bound (small sizes), cost DP, FPTAS at
/// two tolerances.
pub fn experiment2(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &m in &cfg.sizes {
        let markets = markets(cfg, m, CostMode::Heterogeneous)?;
        if m <= BNB_BENCH_LIMIT {
            let times = time_cell(&markets, cfg.reps, |market| {
                std::hint::black_box(branch_and_bound(market)?);
                Ok(())
            })?;
            rows.push(row(2, m, "bnb", "", &times));
        }
        let times = time_cell(&markets, cfg.reps, |market| {
            std::hint::black_box(dp_costs(market)?);
            Ok(())
        })?;
        rows.push(row(2, m, "dp", "", &times));
        for eps in [0.5, 0.05] {
            let times = time_cell(&markets, cfg.reps, |market| {
                std::hint::black_box(fptas(market, eps)?);
                Ok(())
            })?;
            rows.push(row(2, m, "fptas", &format!("epsilon={eps}"), &times));
        }
    }
    Ok(BenchReport {
        experiment: 2,
        rows,
        environment: Environment::current(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment3Config {
    pub count: usize,
    /// Sizes are `floor(2^x)` with `x` uniform on `[min_log2, max_log2]`.
    pub min_log2: f64,
    pub max_log2: f64,
    pub sa: SaParams,
    pub seed: u64,
}

impl Default for Experiment3Config {
    fn default() -> Self {
        Experiment3Config {
            count: 500,
            min_log2: 3.0,
            max_log2: 11.0,
            sa: SaParams::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub m: usize,
    pub ratio: f64,
}

/// Annealing value over the exact cost-DP value on random markets.
pub fn experiment3(cfg: &Experiment3Config) -> Result<Vec<RatioPoint>> {
    if !(cfg.min_log2 >= 0.0 && cfg.min_log2 <= cfg.max_log2 && cfg.max_log2 < 32.0) {
        return Err(Error::invalid_at(
            "max_log2",
            "size range must satisfy 0 <= min <= max < 32",
        ));
    }
    cfg.sa.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lo = 2f64.powf(cfg.min_log2).floor() as usize;
    let hi = 2f64.powf(cfg.max_log2).floor() as usize;
    let mut points = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let x = cfg.min_log2 + (cfg.max_log2 - cfg.min_log2) * rng.random::<f64>();
        let m = (2f64.powf(x).floor() as usize).clamp(lo.max(1), hi.max(1));
        let seed: u64 = rng.random();
        let market = canonicalize(&generate_market(&GeneratorConfig::new(
            m,
            CostMode::Heterogeneous,
            seed,
        ))?)?;
        let exact = dp_costs(&market)?.value();
        let sa = simulated_annealing(&market, &SaParams { seed, ..cfg.sa })?.value();
        let ratio = if exact > 0.0 { sa / exact } else { 1.0 };
        points.push(RatioPoint { m, ratio });
    }
    Ok(points)
}

pub fn ratios_to_csv(points: &[RatioPoint]) -> String {
    let mut s = String::from("m,ratio\n");
    for p in points {
        s.push_str(&format!("{},{}\n", p.m, p.ratio));
    }
    s
}
