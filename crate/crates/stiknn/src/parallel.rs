//! Multi-threaded matrix assembly.
//!
//! Rows of the output are independent: every cell sums its per-test terms in
//! test order inside [`StiPlan::fill_row`], so the result is bit-identical to
//! the sequential path for any thread count.

use rayon::prelude::*;
use rayon::ThreadPool;
use stiknn_core::analysis::{k_sweep_from, KSweep};
use stiknn_core::{Dataset, InteractionMatrix, KnnConfig, Metric, StiPlan};

use crate::error::{Error, Result};

/// Builds a pool with `threads` workers (`0` lets rayon decide).
pub fn pool(threads: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

pub fn assemble_in(pool: &ThreadPool, plan: &StiPlan) -> Result<InteractionMatrix> {
    let n = plan.n();
    let mut values = vec![0.0; n * n];
    pool.install(|| {
        values
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| plan.fill_row(i, row));
    });
    Ok(plan.finish(values)?)
}

pub fn sti_knn_parallel(
    train: &Dataset,
    test: &Dataset,
    config: &KnnConfig,
    threads: usize,
) -> Result<InteractionMatrix> {
    let plan = StiPlan::new(train, test, config)?;
    assemble_in(&pool(threads)?, &plan)
}

pub fn k_sweep_parallel(
    train: &Dataset,
    test: &Dataset,
    ks: &[usize],
    metric: Metric,
    threads: usize,
) -> Result<(KSweep, Vec<InteractionMatrix>)> {
    let pool = pool(threads)?;
    let matrices = ks
        .iter()
        .map(|&k| {
            let plan = StiPlan::new(train, test, &KnnConfig::new(k).with_metric(metric))?;
            assemble_in(&pool, &plan)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((k_sweep_from(ks, &matrices)?, matrices))
}
