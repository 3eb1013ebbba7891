//! False-positive calibration by random re-partitioning.
//!
//! The pooled vectors of a test are shuffled and sliced back into sets of the
//! original sizes, destroying any real association. The fraction of such
//! trials reported significant at level `alpha` estimates the false-positive
//! rate at that level.

use alloc::vec::Vec;

use crate::association::test_statistic;
use crate::battery::RunOptions;
use crate::embedding::CategorySet;
use crate::permutation::{p_value_with, PermutationExecutor};
use crate::rng::{derive_seed, shuffle, CounterRng};
use crate::{Error, Result};

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecificityReport {
    pub trials: usize,
    pub seed: u64,
    /// `(alpha, false-positive rate)` in the order the alphas were given.
    pub thresholds: Vec<(f64, f64)>,
}

impl SpecificityReport {
    /// Tallies `p < alpha` over per-trial p-values.
    pub fn from_p_values(p_values: &[f64], alphas: &[f64], seed: u64) -> Self {
        let trials = p_values.len();
        let thresholds = alphas
            .iter()
            .map(|&alpha| {
                let hits = p_values.iter().filter(|&&p| p < alpha).count();
                (alpha, hits as f64 / trials as f64)
            })
            .collect();
        Self {
            trials,
            seed,
            thresholds,
        }
    }
}

/// Checks trial count, alphas and pool size before any work is done.
pub fn check_arguments(
    pool_len: usize,
    sizes: [usize; 4],
    trials: usize,
    alphas: &[f64],
) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            trials,
            minimum: MIN_TRIALS,
        });
    }
    if let Some(&bad) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::InvalidAlpha(bad));
    }
    let needed: usize = sizes.iter().sum();
    if pool_len < needed {
        return Err(Error::InsufficientPool {
            available: pool_len,
            needed,
        });
    }
    if sizes.contains(&0) {
        return Err(Error::EmptySet("re-partitioned set"));
    }
    Ok(())
}

/// p-value of one random re-partition of `pool` into sets of `sizes`
/// (`[|X|, |Y|, |A|, |B|]`).
pub fn specificity_trial<E: PermutationExecutor + ?Sized>(
    pool: &[Vec<f64>],
    sizes: [usize; 4],
    trial: u64,
    seed: u64,
    options: &RunOptions,
    exec: &E,
) -> Result<f64> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    shuffle(&mut CounterRng::new(seed).stream(trial), &mut order);

    let mut sets = Vec::with_capacity(4);
    let mut start = 0;
    for (label, size) in ["X'", "Y'", "A'", "B'"].into_iter().zip(sizes) {
        let vectors = order[start..start + size]
            .iter()
            .map(|&i| pool[i].clone())
            .collect();
        sets.push(CategorySet::new(label, vectors)?);
        start += size;
    }
    let (_, profile) = test_statistic(&sets[0], &sets[1], &sets[2], &sets[3])?;
    let p = p_value_with(
        exec,
        &profile,
        options.exact_limit,
        options.mc_samples,
        derive_seed(seed, trial),
        options.tie_policy,
    )?;
    Ok(p.p)
}

/// Runs `trials` random re-partitions and reports the false-positive rate at
/// each alpha.
pub fn specificity_eval<E: PermutationExecutor + ?Sized>(
    pool: &[Vec<f64>],
    sizes: [usize; 4],
    trials: usize,
    alphas: &[f64],
    seed: u64,
    options: &RunOptions,
    exec: &E,
) -> Result<SpecificityReport> {
    check_arguments(pool.len(), sizes, trials, alphas)?;
    let p_values = (0..trials as u64)
        .map(|t| specificity_trial(pool, sizes, t, seed, options, exec))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpecificityReport::from_p_values(&p_values, alphas, seed))
}
