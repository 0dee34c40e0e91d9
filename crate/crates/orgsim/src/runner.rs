//! Parallel execution of experiment replicates.

use orgsim_core::experiment::{jobs, run_replicate};
use orgsim_core::{ExperimentConfig, ExperimentResults};
use rayon::prelude::*;

/// Environment variable capping replicate parallelism.
pub const THREADS_ENV: &str = "ORGSIM_THREADS";

/// Worker count from `ORGSIM_THREADS`, or `None` for machine parallelism.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every replicate of every sweep point on a pool of `threads` workers
/// (machine parallelism when `None`). Results do not depend on the pool size.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> orgsim_core::Result<ExperimentResults> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let work = jobs(config);
    let outcomes = pool.install(|| {
        work.par_iter()
            .map(|(point, replicate)| run_replicate(config, point, *replicate))
            .collect::<orgsim_core::Result<Vec<_>>>()
    })?;
    ExperimentResults::collect(config, outcomes)
}
