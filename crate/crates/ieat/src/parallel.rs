//! Thread-pool execution. Work is split into fixed-size chunks whose integer
//! counts are summed, so results do not depend on the number of workers.

use ieat_core::permutation::Counts;
use ieat_core::specificity::{check_arguments, specificity_trial};
use ieat_core::{
    run_test, EmbeddingTable, PermutationExecutor, RunOptions, Sequential,
    SpecificityReport, StimulusManifest, TestResult, TestSpec,
};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::{Error, Result};

pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    /// `threads == 0` uses one worker per available core.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs every spec, possibly concurrently; results stay in spec order.
    pub fn run_battery(
        &self,
        battery: &[TestSpec],
        manifest: &StimulusManifest,
        table: &EmbeddingTable,
        options: &RunOptions,
    ) -> Vec<ieat_core::Result<TestResult>> {
        self.pool.install(|| {
            battery
                .par_iter()
                .map(|spec| run_test(spec, manifest, table, options, self))
                .collect()
        })
    }

    /// Same report as [`ieat_core::specificity_eval`], with trials spread
    /// over the pool.
    pub fn specificity_eval(
        &self,
        pool: &[Vec<f64>],
        sizes: [usize; 4],
        trials: usize,
        alphas: &[f64],
        seed: u64,
        options: &RunOptions,
    ) -> ieat_core::Result<SpecificityReport> {
        check_arguments(pool.len(), sizes, trials, alphas)?;
        let p_values = self.pool.install(|| {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| specificity_trial(pool, sizes, t, seed, options, &Sequential))
                .collect::<ieat_core::Result<Vec<f64>>>()
        })?;
        Ok(SpecificityReport::from_p_values(&p_values, alphas, seed))
    }
}

impl PermutationExecutor for Parallel {
    fn sum_chunks(&self, chunks: u64, chunk: &(dyn Fn(u64) -> Counts + Sync)) -> Counts {
        self.pool
            .install(|| (0..chunks).into_par_iter().map(chunk).sum())
    }
}
