//! Monte-Carlo check that no worker gains by deviating from the prescribed
//! effort while the others comply.
//!
//! Draws are generated in fixed blocks, each from its own ChaCha stream, and
//! block statistics are reduced in block order. The result depends on the
//! seed only, never on how many threads ran.
//!
//! The deviator's own noise is integrated out exactly: given the other
//! workers' draws, the deviator's winning probability is a normal tail. Every grid point
//! reuses the same draws of the others.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contracts::{BonusScheme, CostFunction, EnvParams};
use crate::error::{Error, Result};
use crate::numerics::erfc;

const BLOCK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub draws: usize,
    pub seed: u64,
    pub deviation_grid: Vec<f64>,
    pub confidence_z: f64,
}

impl McConfig {
    /// Evenly spaced non-negative efforts `e_star + k step`, `|k step| <= half_width`.
    pub fn around(e_star: f64, half_width: f64, step: f64, draws: usize, seed: u64) -> Self {
        let m = (half_width / step).round() as i64;
        let deviation_grid = (-m..=m)
            .map(|k| if k == 0 { e_star } else { e_star + k as f64 * step })
            .filter(|&e| e >= 0.0)
            .collect();
        Self { draws, seed, deviation_grid, confidence_z: 3.0 }
    }

    pub fn validate(&self, e_star: f64) -> Result<()> {
        if self.draws < 100_000 {
            return Err(Error::InvalidArgument(format!("at least 1e5 draws required, got {}", self.draws)));
        }
        if !(self.confidence_z > 0.0) {
            return Err(Error::InvalidArgument("confidence_z must be positive".into()));
        }
        if self.deviation_grid.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::InvalidArgument("deviation grid must hold finite non-negative efforts".into()));
        }
        if !self.deviation_grid.contains(&e_star) {
            return Err(Error::InvalidArgument(format!("deviation grid must contain e* = {e_star}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McStatus {
    /// Empirical argmax within one grid step of e*.
    Confirmed,
    /// Argmax elsewhere, but not significantly better than e*.
    Inconclusive,
    /// Some effort beats e* by more than the confidence bound.
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub e_star: f64,
    pub grid: Vec<f64>,
    /// Expected bonus minus effort cost (salary omitted: it does not move the argmax).
    pub payoff: Vec<f64>,
    pub half_width: Vec<f64>,
    pub argmax_index: usize,
    pub argmax_effort: f64,
    /// Payoff at the argmax minus payoff at e*, with its paired half-width.
    pub gap: f64,
    pub gap_half_width: f64,
    pub status: McStatus,
}

struct BlockStats {
    count: usize,
    sum: Vec<f64>,
    // row-major g×g sums of products
    cross: Vec<f64>,
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Expected payoff curve of one deviating worker against `n - 1` workers at
/// `e_star`.
pub fn mc_best_response(
    scheme: &BonusScheme,
    e_star: f64,
    p: &EnvParams,
    c: &CostFunction,
    cfg: &McConfig,
) -> Result<McReport> {
    p.validate()?;
    c.validate()?;
    cfg.validate(e_star)?;
    if !(p.sigma > 0.0) {
        return Err(Error::InvalidArgument("Monte-Carlo check needs sigma > 0".into()));
    }
    let sigma = p.sigma;
    let others = (p.n - 1) as usize;
    let grid = &cfg.deviation_grid;
    let g = grid.len();
    let blocks = cfg.draws.div_ceil(BLOCK);

    let run_block = |b: usize| -> BlockStats {
        let mut rng = block_rng(cfg.seed, b);
        let count = BLOCK.min(cfg.draws - b * BLOCK);
        let mut sum = vec![0.0; g];
        let mut cross = vec![0.0; g * g];
        let mut v = vec![0.0; g];
        for _ in 0..count {
            match *scheme {
                BonusScheme::TournamentWithThreshold { threshold, prize } => {
                    let mut best = f64::NEG_INFINITY;
                    for _ in 0..others {
                        let z: f64 = rng.sample(StandardNormal);
                        best = best.max(e_star + sigma * z);
                    }
                    let bar = best.max(threshold);
                    for (vk, &e) in v.iter_mut().zip(grid) {
                        *vk = prize * upper_tail((bar - e) / sigma);
                    }
                }
                BonusScheme::EqualSplit { per_worker_bonus, team_trigger } => {
                    let mut rest = others as f64 * e_star;
                    for _ in 0..others {
                        let z: f64 = rng.sample(StandardNormal);
                        rest += sigma * z;
                    }
                    for (vk, &e) in v.iter_mut().zip(grid) {
                        *vk = per_worker_bonus * upper_tail((team_trigger - rest - e) / sigma);
                    }
                }
            }
            for j in 0..g {
                sum[j] += v[j];
                let row = &mut cross[j * g..(j + 1) * g];
                for k in 0..g {
                    row[k] += v[j] * v[k];
                }
            }
        }
        BlockStats { count, sum, cross }
    };

    let parts: Vec<BlockStats> = (0..blocks).into_par_iter().map(run_block).collect();
    let mut total = BlockStats { count: 0, sum: vec![0.0; g], cross: vec![0.0; g * g] };
    for part in parts {
        total.count += part.count;
        total.sum.iter_mut().zip(&part.sum).for_each(|(a, b)| *a += b);
        total.cross.iter_mut().zip(&part.cross).for_each(|(a, b)| *a += b);
    }

    let nd = total.count as f64;
    let mean: Vec<f64> = total.sum.iter().map(|s| s / nd).collect();
    let cov = |j: usize, k: usize| (total.cross[j * g + k] / nd - mean[j] * mean[k]) * nd / (nd - 1.0);
    let z = cfg.confidence_z;

    let payoff: Vec<f64> = (0..g).map(|k| mean[k] - c.c(grid[k])).collect();
    let half_width: Vec<f64> = (0..g).map(|k| z * (cov(k, k).max(0.0) / nd).sqrt()).collect();
    let argmax_index = (0..g)
        .max_by(|&a, &b| payoff[a].total_cmp(&payoff[b]))
        .expect("grid is non-empty");
    let reference = grid.iter().position(|&e| e == e_star).expect("validated");
    let gap = payoff[argmax_index] - payoff[reference];
    let var_gap = cov(argmax_index, argmax_index) - 2.0 * cov(argmax_index, reference) + cov(reference, reference);
    let gap_half_width = z * (var_gap.max(0.0) / nd).sqrt();

    let step = grid_step(grid);
    let status = if (grid[argmax_index] - e_star).abs() <= step * (1.0 + 1e-9) {
        McStatus::Confirmed
    } else if gap <= gap_half_width {
        McStatus::Inconclusive
    } else {
        McStatus::Rejected
    };

    Ok(McReport {
        e_star,
        grid: grid.clone(),
        payoff,
        half_width,
        argmax_index,
        argmax_effort: grid[argmax_index],
        gap,
        gap_half_width,
        status,
    })
}

fn grid_step(grid: &[f64]) -> f64 {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(f64::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McFrequency {
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
}

/// Empirical frequency with which all `n` workers fall more than `eta`
/// standard deviations below effort, next to `erfc(eta/√2)^n / 2^n`.
pub fn mc_destruction_frequency(n: u32, eta: f64, draws: usize, seed: u64) -> Result<McFrequency> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be non-negative, got {eta}")));
    }
    if draws < 2 {
        return Err(Error::InvalidArgument("need at least two draws".into()));
    }
    let blocks = draws.div_ceil(BLOCK);
    let hits: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(draws - b * BLOCK);
            let mut hits = 0u64;
            for _ in 0..count {
                let mut all_below = true;
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    all_below &= z < -eta;
                }
                hits += all_below as u64;
            }
            hits
        })
        .collect();
    let estimate = hits.iter().sum::<u64>() as f64 / draws as f64;
    let expected = upper_tail(eta).powi(n as i32);
    let std_error = (expected * (1.0 - expected) / draws as f64).sqrt();
    Ok(McFrequency { estimate, std_error, expected })
}
