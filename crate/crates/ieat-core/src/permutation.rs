//! One-sided permutation p-values over equal-size relabelings of `X ∪ Y`.
//!
//! A partition is an assignment of `n` of the `2n` elements to `X_i`; there are
//! `C(2n, n)` of them, the observed assignment included. With the s-values
//! cached in an [`AssociationProfile`], the statistic of a partition is
//! `2 * (sum over X_i) - total`, so walking the partitions in revolving-door
//! order costs one addition and one subtraction per partition.
//!
//! Work is cut into fixed chunks (rank ranges for exact enumeration, draw
//! ranges for Monte-Carlo) whose integer counts are summed. How the chunks are
//! scheduled is left to a [`PermutationExecutor`]; the counts, and therefore the
//! p-value, never depend on it.

use core::fmt;
use core::ops::{Add, Range};
use core::str::FromStr;

use alloc::string::String;
use alloc::vec::Vec;

use crate::association::AssociationProfile;
use crate::combinatorics::{binomial, RevolvingDoor};
use crate::rng::{partial_shuffle, CounterRng};
use crate::{Error, Result};

pub const DEFAULT_EXACT_LIMIT: u64 = 10_000_000;
pub const DEFAULT_MC_SAMPLES: u64 = 100_000;
pub const MIN_MC_SAMPLES: u64 = 1_000;

/// Ranks per exact chunk. The running sum is recomputed at every chunk start.
pub const EXACT_CHUNK: u64 = 4_096;
/// Draws per Monte-Carlo chunk.
pub const MC_CHUNK: u64 = 1_024;

const TIE_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Whether partitions tying the observed statistic count toward `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TiePolicy {
    /// `p = Pr[s_i > s]`.
    #[default]
    Strict,
    /// `p = Pr[s_i >= s]`.
    Inclusive,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::Strict => "strict",
            TiePolicy::Inclusive => "inclusive",
        }
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "strict" => Ok(TiePolicy::Strict),
            "inclusive" => Ok(TiePolicy::Inclusive),
            other => Err(alloc::format!("unknown tie policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValueMethod {
    Exact {
        partitions: u64,
    },
    MonteCarlo {
        samples: u64,
        seed: u64,
        /// 95% normal-approximation half-width.
        ci_halfwidth: f64,
    },
}

impl PValueMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PValueMethod::Exact { .. } => "exact",
            PValueMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValueResult {
    pub p: f64,
    pub method: PValueMethod,
    pub greater_count: u64,
    pub tie_count: u64,
    pub tie_policy: TiePolicy,
}

impl PValueResult {
    fn new(counts: Counts, method: PValueMethod, tie_policy: TiePolicy) -> Self {
        let mut r = Self {
            p: 0.0,
            method,
            greater_count: counts.greater,
            tie_count: counts.ties,
            tie_policy,
        };
        r.p = r.numerator() as f64 / r.denominator() as f64;
        if let PValueMethod::MonteCarlo {
            samples,
            ref mut ci_halfwidth,
            ..
        } = r.method
        {
            *ci_halfwidth = 1.96 * libm::sqrt(r.p * (1.0 - r.p) / samples as f64);
        }
        r
    }

    /// Partitions (exact) or draws (Monte-Carlo) compared.
    pub fn denominator(&self) -> u64 {
        match self.method {
            PValueMethod::Exact { partitions } => partitions,
            PValueMethod::MonteCarlo { samples, .. } => samples,
        }
    }

    /// Count in the numerator of `p` under the tie policy.
    pub fn numerator(&self) -> u64 {
        match self.tie_policy {
            TiePolicy::Strict => self.greater_count,
            TiePolicy::Inclusive => self.greater_count + self.tie_count,
        }
    }

    /// Partitions whose statistic is strictly below the observed one.
    pub fn less_count(&self) -> u64 {
        self.denominator() - self.greater_count - self.tie_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    pub n: usize,
    /// `C(2n, n)`, or `None` when it does not fit in 64 bits.
    pub total_partitions: Option<u64>,
    pub mode: PlanMode,
    pub exact_limit: u64,
}

/// Chooses exact enumeration when `C(2n, n) <= exact_limit`.
pub fn plan(n: usize, exact_limit: u64) -> Result<PermutationPlan> {
    if n == 0 {
        return Err(Error::EmptySet("target set X"));
    }
    let total_partitions = binomial(2 * n as u64, n as u64);
    let mode = match total_partitions {
        Some(total) if total <= exact_limit => PlanMode::Exact,
        _ => PlanMode::MonteCarlo,
    };
    Ok(PermutationPlan {
        n,
        total_partitions,
        mode,
        exact_limit,
    })
}

/// Greater/tie tallies for a set of partitions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub greater: u64,
    pub ties: u64,
    pub visited: u64,
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            greater: self.greater + rhs.greater,
            ties: self.ties + rhs.ties,
            visited: self.visited + rhs.visited,
        }
    }
}

impl core::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), Add::add)
    }
}

/// Compares partition statistics with the observed one.
///
/// Differences within `1e-12 * max|s| * 2n` are ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub observed: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn for_profile(profile: &AssociationProfile) -> Self {
        let scale = profile.max_abs() * profile.values().len() as f64;
        Self {
            observed: profile.statistic(),
            tolerance: TIE_RELATIVE_TOLERANCE * scale,
        }
    }

    #[inline]
    pub fn tally(&self, counts: &mut Counts, statistic: f64) {
        let delta = statistic - self.observed;
        if delta > self.tolerance {
            counts.greater += 1;
        } else if delta.abs() <= self.tolerance {
            counts.ties += 1;
        }
        counts.visited += 1;
    }
}

/// Schedules independent chunks and sums their counts.
///
/// Implementations may run chunks in any order or concurrently.
pub trait PermutationExecutor {
    fn sum_chunks(&self, chunks: u64, chunk: &(dyn Fn(u64) -> Counts + Sync)) -> Counts;
}

/// Runs every chunk in order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PermutationExecutor for Sequential {
    fn sum_chunks(&self, chunks: u64, chunk: &(dyn Fn(u64) -> Counts + Sync)) -> Counts {
        (0..chunks).map(chunk).sum()
    }
}

/// Visits the partitions with ranks in `ranks`, in revolving-door order,
/// passing the elements assigned to `X_i` and the partition statistic.
pub fn for_each_partition<F>(profile: &AssociationProfile, ranks: Range<u64>, mut visit: F)
where
    F: FnMut(&[usize], f64),
{
    if ranks.start >= ranks.end {
        return;
    }
    let values = profile.values();
    let n = profile.x_size();
    let total = profile.total();
    let mut door = RevolvingDoor::at_rank(2 * n, n, ranks.start);
    let mut sum: f64 = door.current().iter().map(|&i| values[i]).sum();
    visit(door.current(), 2.0 * sum - total);
    for _ in ranks.start + 1..ranks.end {
        let swap = door.advance().expect("rank range past the last partition");
        sum += values[swap.inc] - values[swap.out];
        visit(door.current(), 2.0 * sum - total);
    }
}

/// Exact counts over one rank range.
pub fn exact_counts(profile: &AssociationProfile, cmp: &Comparison, ranks: Range<u64>) -> Counts {
    let mut counts = Counts::default();
    for_each_partition(profile, ranks, |_, stat| cmp.tally(&mut counts, stat));
    counts
}

/// Monte-Carlo counts over a range of draw indices.
pub fn monte_carlo_counts(
    profile: &AssociationProfile,
    cmp: &Comparison,
    rng: &CounterRng,
    draws: Range<u64>,
) -> Counts {
    let values = profile.values();
    let n = profile.x_size();
    let total = profile.total();
    let mut scratch: Vec<usize> = Vec::with_capacity(2 * n);
    let mut counts = Counts::default();
    for draw in draws {
        scratch.clear();
        scratch.extend(0..2 * n);
        let mut stream = rng.stream(draw);
        partial_shuffle(&mut stream, &mut scratch, n);
        let sum: f64 = scratch[..n].iter().map(|&i| values[i]).sum();
        cmp.tally(&mut counts, 2.0 * sum - total);
    }
    counts
}

/// Exact p-value by full enumeration, scheduled on `exec`.
pub fn exact_p_value_with<E: PermutationExecutor + ?Sized>(
    exec: &E,
    profile: &AssociationProfile,
    tie_policy: TiePolicy,
    exact_limit: u64,
) -> Result<PValueResult> {
    let n = profile.x_size();
    let total = match binomial(2 * n as u64, n as u64) {
        Some(total) if total <= exact_limit => total,
        Some(total) => return Err(Error::ExactLimitExceeded { total, limit: exact_limit }),
        None => return Err(Error::PartitionCountOverflow { half2: 2 * n, half: n }),
    };
    let cmp = Comparison::for_profile(profile);
    let chunks = total.div_ceil(EXACT_CHUNK);
    let counts = exec.sum_chunks(chunks, &|i| {
        let start = i * EXACT_CHUNK;
        exact_counts(profile, &cmp, start..(start + EXACT_CHUNK).min(total))
    });
    debug_assert_eq!(counts.visited, total);
    Ok(PValueResult::new(
        counts,
        PValueMethod::Exact { partitions: total },
        tie_policy,
    ))
}

/// Exact p-value on the calling thread.
pub fn exact_p_value(
    profile: &AssociationProfile,
    tie_policy: TiePolicy,
    exact_limit: u64,
) -> Result<PValueResult> {
    exact_p_value_with(&Sequential, profile, tie_policy, exact_limit)
}

/// Monte-Carlo p-value from `samples` uniform relabelings, scheduled on `exec`.
pub fn monte_carlo_p_value_with<E: PermutationExecutor + ?Sized>(
    exec: &E,
    profile: &AssociationProfile,
    samples: u64,
    seed: u64,
    tie_policy: TiePolicy,
) -> Result<PValueResult> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            samples,
            minimum: MIN_MC_SAMPLES,
        });
    }
    let cmp = Comparison::for_profile(profile);
    let rng = CounterRng::new(seed);
    let chunks = samples.div_ceil(MC_CHUNK);
    let counts = exec.sum_chunks(chunks, &|i| {
        let start = i * MC_CHUNK;
        monte_carlo_counts(profile, &cmp, &rng, start..(start + MC_CHUNK).min(samples))
    });
    Ok(PValueResult::new(
        counts,
        PValueMethod::MonteCarlo {
            samples,
            seed,
            ci_halfwidth: 0.0,
        },
        tie_policy,
    ))
}

/// Monte-Carlo p-value on the calling thread.
pub fn monte_carlo_p_value(
    profile: &AssociationProfile,
    samples: u64,
    seed: u64,
    tie_policy: TiePolicy,
) -> Result<PValueResult> {
    monte_carlo_p_value_with(&Sequential, profile, samples, seed, tie_policy)
}

/// Exact when the plan allows it, Monte-Carlo otherwise.
pub fn p_value_with<E: PermutationExecutor + ?Sized>(
    exec: &E,
    profile: &AssociationProfile,
    exact_limit: u64,
    samples: u64,
    seed: u64,
    tie_policy: TiePolicy,
) -> Result<PValueResult> {
    match plan(profile.x_size(), exact_limit)?.mode {
        PlanMode::Exact => exact_p_value_with(exec, profile, tie_policy, exact_limit),
        PlanMode::MonteCarlo => monte_carlo_p_value_with(exec, profile, samples, seed, tie_policy),
    }
}
