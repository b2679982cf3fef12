//! Update cost of the recursive estimator against refitting a batch one.

use std::time::Instant;

use serde::Serialize;

use super::zoo::ZooId;
use crate::asymptotics::{optimal_order, Method, TheoryConstants};
use crate::error::{domain, Result};
use crate::estimators::{BatchEstimator, BatchKind, DensityEstimate, EvalGrid, RecursiveEstimator};
use crate::schedules::{optimal_order_schedule, StepsizeSchedule};

/// Number of consecutive blocks the timed arrivals are split into.
pub const BENCH_BLOCKS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub n_initial: usize,
    pub n_additional: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub recursive_total_secs: f64,
    pub batch_total_secs: f64,
    pub recursive_per_arrival_secs: f64,
    pub batch_per_arrival_secs: f64,
    /// Median per-arrival time within each block of arrivals.
    pub recursive_block_medians: Vec<f64>,
    pub batch_block_medians: Vec<f64>,
    /// Largest over smallest recursive block median.
    pub recursive_flatness: f64,
}

fn block_medians(times: &[f64]) -> Vec<f64> {
    let size = times.len().div_ceil(BENCH_BLOCKS).max(1);
    times
        .chunks(size)
        .map(|c| {
            let mut c = c.to_vec();
            c.sort_by(f64::total_cmp);
            c[c.len() / 2]
        })
        .collect()
}

/// Streams `n_additional` observations from density (a) after a warm start
/// of `n_initial`. Each arrival is (i) one recursive update on a grid of
/// `grid_size` equispaced points and (ii) a Vitale refit from scratch on all
/// data so far, evaluated on the same points. Both use MISE-optimal orders.
pub fn bench_update(n_initial: usize, n_additional: usize, grid_size: usize, seed: u64) -> Result<BenchReport> {
    if n_additional == 0 || grid_size == 0 {
        return Err(domain("bench needs at least one arrival and one grid point"));
    }
    let truth = ZooId::A.density();
    let tc = TheoryConstants::compute(&truth)?;
    let stepsize = StepsizeSchedule::r1();
    let orders = optimal_order_schedule(&tc, &stepsize)?;
    let points: Vec<f64> = (0..grid_size).map(|i| (i as f64 + 0.5) / grid_size as f64).collect();
    let grid = std::sync::Arc::new(EvalGrid::custom(points.clone())?);
    let data = truth.draw_n(n_initial + n_additional, seed);

    let mut rec = RecursiveEstimator::with_grid(grid, stepsize, orders);
    rec.update_all(&data[..n_initial])?;
    let mut rec_times = Vec::with_capacity(n_additional);
    let mut batch_times = Vec::with_capacity(n_additional);
    let mut sink = 0.0;
    for n in n_initial + 1..=n_initial + n_additional {
        let t = Instant::now();
        rec.update(data[n - 1])?;
        rec_times.push(t.elapsed().as_secs_f64());

        let t = Instant::now();
        let m = optimal_order(&tc, &Method::Batch(BatchKind::Vitale), n)?;
        let est = BatchEstimator::from_values(BatchKind::Vitale, m, &data[..n])?;
        sink += points.iter().map(|&x| est.eval(x)).sum::<f64>();
        batch_times.push(t.elapsed().as_secs_f64());
    }
    std::hint::black_box(sink);

    let recursive_block_medians = block_medians(&rec_times);
    let lo = recursive_block_medians.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = recursive_block_medians.iter().cloned().fold(0.0, f64::max);
    let recursive_total_secs: f64 = rec_times.iter().sum();
    let batch_total_secs: f64 = batch_times.iter().sum();
    Ok(BenchReport {
        n_initial,
        n_additional,
        grid_size,
        seed,
        recursive_total_secs,
        batch_total_secs,
        recursive_per_arrival_secs: recursive_total_secs / n_additional as f64,
        batch_per_arrival_secs: batch_total_secs / n_additional as f64,
        recursive_block_medians,
        batch_block_medians: block_medians(&batch_times),
        recursive_flatness: if lo > 0.0 { hi / lo } else { f64::INFINITY },
    })
}
