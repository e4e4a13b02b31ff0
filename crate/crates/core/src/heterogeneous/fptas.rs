//! Value-indexed DP on a binary fixed-point grid.
//!
//! `G[j, v]` is the cheapest way to reach fixed-point value `v` using the
//! first `j` schools. Values live on the grid `{0, u, 2u, ...}` with
//! `u = 2^-P` chosen so that `u <= eps * U / m^2`, `U = sum f_j t_j`;
//! that spacing is what bounds the rounding loss by `eps` times the optimum.
//! Grid values are stored as integers (multiples of `u`).

use std::time::Instant;

use crate::canonical::{fits, CanonicalMarket, Portfolio};
use crate::error::{Error, RefusalReason, Result};
use crate::report::{Certificate, SolveReport, SolveStats, Solver};

/// Default ceiling on table entries (`m * |grid|`).
pub const DEFAULT_FPTAS_MAX_CELLS: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointScale {
    /// Binary precision `P`; negative when utilities are large.
    pub precision: i32,
    /// Grid spacing `2^-P`.
    pub unit: f64,
    /// `U = sum f_j t_j`, an upper bound on every portfolio value.
    pub upper: f64,
    /// Largest grid index, `floor(U / unit)`.
    pub levels: u64,
}

impl FixedPointScale {
    pub fn new(market: &CanonicalMarket, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let m = market.len() as f64;
        let upper = market.expected_utility_sum();
        if market.is_empty() || upper <= 0.0 {
            return Ok(FixedPointScale {
                precision: 0,
                unit: 1.0,
                upper: upper.max(0.0),
                levels: 0,
            });
        }
        let target = epsilon * upper / (m * m);
        let mut precision = (-target.log2()).ceil() as i32;
        while 2f64.powi(-precision) > target {
            precision += 1;
        }
        let unit = 2f64.powi(-precision);
        let levels = (upper / unit).floor();
        if !levels.is_finite() || levels >= (1u64 << 52) as f64 {
            return Err(Error::refused(
                RefusalReason::GridOverflow,
                format!("fixed-point grid with {levels} levels does not fit; increase epsilon"),
            ));
        }
        Ok(FixedPointScale {
            precision,
            unit,
            upper,
            levels: levels as u64,
        })
    }

    /// Utility in grid units; exact, since the unit is a power of two.
    fn scaled(&self, t: f64) -> f64 {
        t / self.unit
    }

    /// Smallest epsilon whose grid keeps `m * (levels + 1)` within `max_cells`.
    fn epsilon_floor(&self, m: usize, max_cells: u64) -> f64 {
        let m = m.max(1) as f64;
        let max_levels = (max_cells as f64 / m - 1.0).max(1.0);
        let room = (max_levels / self.upper).log2().floor();
        m * m / (self.upper * 2f64.powf(room))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid_at(
            "epsilon",
            format!("tolerance must lie in (0, 1), got {epsilon}"),
        ));
    }
    Ok(())
}

/// Grid units the rest of the portfolio must still reach once school `j`
/// (scaled utility `t`, probability `f`) is counted towards value `v`.
/// Rounds the required drop down, so the true value is never below `v`.
#[inline]
fn remainder(v: u64, t: f64, f: f64) -> u64 {
    if f >= 1.0 {
        return 0;
    }
    let drop = (f / (1.0 - f) * (t - v as f64)).floor();
    if drop >= v as f64 {
        0
    } else {
        v - drop as u64
    }
}

/// Computes row `j` of `G` from row `j - 1`. `take[v]` records whether the
/// school is used at value `v`.
fn fill_row(prev: &[f64], row: &mut [f64], t: f64, f: f64, g: f64, mut take: impl FnMut(usize)) {
    row[0] = 0.0;
    for v in 1..row.len() {
        if t < v as f64 {
            row[v] = f64::INFINITY;
            continue;
        }
        let with = g + prev[remainder(v as u64, t, f) as usize];
        if with < prev[v] {
            row[v] = with;
            take(v);
        } else {
            row[v] = prev[v];
        }
    }
}

fn base_row(len: usize) -> Vec<f64> {
    let mut row = vec![f64::INFINITY; len];
    row[0] = 0.0;
    row
}

/// The full `G` table, for inspection on small instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    pub scale: FixedPointScale,
    rows: Vec<Vec<f64>>,
}

impl CostTable {
    pub fn build(market: &CanonicalMarket, epsilon: f64) -> Result<Self> {
        let scale = FixedPointScale::new(market, epsilon)?;
        let width = scale.levels as usize + 1;
        let mut rows = vec![base_row(width)];
        for j in 0..market.len() {
            let mut row = vec![0.0; width];
            fill_row(
                &rows[j],
                &mut row,
                scale.scaled(market.t()[j]),
                market.f()[j],
                market.g()[j],
                |_| {},
            );
            rows.push(row);
        }
        Ok(CostTable { scale, rows })
    }

    /// `G[j, v]` for `v` in grid units.
    pub fn cost(&self, j: usize, v: usize) -> f64 {
        self.rows[j][v]
    }

    pub fn schools(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.rows[0].len() - 1
    }
}

struct Bits {
    words: Vec<u64>,
    width: usize,
}

impl Bits {
    fn new(rows: usize, width: usize) -> Self {
        Bits {
            words: vec![0; (rows * width).div_ceil(64)],
            width,
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        let i = row * self.width + col;
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        let i = row * self.width + col;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}

/// `(1 - eps)`-approximation scheme.
#[derive(Debug, Clone, Copy)]
pub struct Fptas {
    pub max_cells: u64,
}

impl Default for Fptas {
    fn default() -> Self {
        Fptas {
            max_cells: DEFAULT_FPTAS_MAX_CELLS,
        }
    }
}

impl Fptas {
    pub fn solve(&self, market: &CanonicalMarket, epsilon: f64) -> Result<SolveReport> {
        let started = Instant::now();
        let scale = FixedPointScale::new(market, epsilon)?;
        let m = market.len();
        let width = scale.levels as usize + 1;
        let cells = m as u64 * width as u64;
        if cells > self.max_cells {
            return Err(Error::refused(
                RefusalReason::GridOverflow,
                format!(
                    "fptas grid needs {cells} entries, above the {} limit; use epsilon >= {:.3e}",
                    self.max_cells,
                    scale.epsilon_floor(m, self.max_cells)
                ),
            ));
        }

        // Rolling rows plus one membership bit per entry for backtracking.
        let mut bits = Bits::new(m, width);
        let mut prev = base_row(width);
        let mut row = vec![0.0; width];
        let scaled: Vec<f64> = market.t().iter().map(|&t| scale.scaled(t)).collect();
        for (j, &t) in scaled.iter().enumerate() {
            fill_row(&prev, &mut row, t, market.f()[j], market.g()[j], |v| {
                bits.set(j, v)
            });
            std::mem::swap(&mut prev, &mut row);
        }

        let budget = market.budget();
        let best = (0..width)
            .rev()
            .find(|&v| fits(prev[v], budget))
            .unwrap_or(0);

        let mut members = Vec::new();
        let mut v = best as u64;
        for j in (0..m).rev() {
            if v == 0 {
                break;
            }
            if bits.get(j, v as usize) {
                members.push(j);
                v = remainder(v, scaled[j], market.f()[j]);
            }
        }

        let portfolio = Portfolio::evaluate(market, &members)?;
        Ok(SolveReport {
            solver: Solver::Fptas,
            portfolio,
            certificate: Certificate::Approximate {
                epsilon,
                fixed_point_value: best as f64 * scale.unit,
            },
            stats: SolveStats {
                table_cells: Some(cells),
                ..SolveStats::default()
            },
            wall_time: started.elapsed(),
        })
    }
}

/// `(1 - eps)`-optimal portfolio with default limits.
pub fn fptas(market: &CanonicalMarket, epsilon: f64) -> Result<SolveReport> {
    Fptas::default().solve(market, epsilon)
}
