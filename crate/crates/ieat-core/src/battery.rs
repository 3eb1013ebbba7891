//! Declarative test specifications and their runners.

use core::fmt;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::association::{effect_size, test_statistic};
use crate::embedding::EmbeddingTable;
use crate::manifest::{resolve_category, Pooling, StimulusManifest};
use crate::permutation::{
    p_value_with, PValueResult, PermutationExecutor, TiePolicy, DEFAULT_EXACT_LIMIT,
    DEFAULT_MC_SAMPLES,
};
use crate::{Error, Result};

/// One association test: targets `X` vs `Y`, attributes `A` vs `B`.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TestSpec {
    pub name: String,
    pub x_category: String,
    pub y_category: String,
    pub a_category: String,
    pub b_category: String,
    /// Overrides [`RunOptions::pooling`] when set.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub pooling: Option<Pooling>,
    /// Overrides [`RunOptions::tie_policy`] when set.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub tie_policy: Option<TiePolicy>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "String::is_empty"))]
    pub notes: String,
}

impl TestSpec {
    pub fn new(name: &str, x: &str, y: &str, a: &str, b: &str) -> Self {
        Self {
            name: name.into(),
            x_category: x.into(),
            y_category: y.into(),
            a_category: a.into(),
            b_category: b.into(),
            ..Default::default()
        }
    }

    pub fn categories(&self) -> [&str; 4] {
        [
            &self.x_category,
            &self.y_category,
            &self.a_category,
            &self.b_category,
        ]
    }

    /// Battery-level checks: a name and four distinct category references.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidSpec {
            name: self.name.clone(),
            reason: reason.into(),
        };
        if self.name.trim().is_empty() {
            return Err(invalid("empty name"));
        }
        if self.categories().iter().any(|c| c.trim().is_empty()) {
            return Err(invalid("empty category reference"));
        }
        let distinct: BTreeSet<&str> = self.categories().into_iter().collect();
        if distinct.len() != 4 {
            return Err(invalid("category references must be distinct"));
        }
        Ok(())
    }
}

/// Validates every spec and checks that names are unique.
pub fn validate_battery(battery: &[TestSpec]) -> Result<()> {
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    let mut names = BTreeSet::new();
    for spec in battery {
        spec.validate()?;
        if !names.insert(spec.name.as_str()) {
            return Err(Error::InvalidSpec {
                name: spec.name.clone(),
                reason: "duplicate test name".into(),
            });
        }
    }
    Ok(())
}

/// Conventional effect-size buckets at 0.2 / 0.5 / 0.8; boundaries go up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Magnitude {
    None,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn classify(d: f64) -> Self {
        let d = d.abs();
        if d >= 0.8 {
            Magnitude::Large
        } else if d >= 0.5 {
            Magnitude::Medium
        } else if d >= 0.2 {
            Magnitude::Small
        } else {
            Magnitude::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Magnitude::None => "none",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Positive,
    Negative,
    Zero,
}

impl Direction {
    pub fn of(d: f64) -> Self {
        if d > 0.0 {
            Direction::Positive
        } else if d < 0.0 {
            Direction::Negative
        } else {
            Direction::Zero
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub exact_limit: u64,
    pub mc_samples: u64,
    pub seed: u64,
    pub tie_policy: TiePolicy,
    pub pooling: Pooling,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            exact_limit: DEFAULT_EXACT_LIMIT,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 42,
            tie_policy: TiePolicy::Strict,
            pooling: Pooling::PerImage,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub name: String,
    pub x_category: String,
    pub y_category: String,
    pub a_category: String,
    pub b_category: String,
    pub statistic: f64,
    pub d: f64,
    pub p: PValueResult,
    /// `|X| = |Y|`.
    pub n_t: usize,
    /// `|A|`.
    pub n_a: usize,
    /// `|B|`; usually equal to `n_a`.
    pub n_b: usize,
    pub magnitude: Magnitude,
    pub direction: Direction,
}

/// Resolves the four sets, then computes the statistic, `d` and `p`.
///
/// Errors are tagged with the spec name.
pub fn run_test<E: PermutationExecutor + ?Sized>(
    spec: &TestSpec,
    manifest: &StimulusManifest,
    table: &EmbeddingTable,
    options: &RunOptions,
    exec: &E,
) -> Result<TestResult> {
    run_test_inner(spec, manifest, table, options, exec).map_err(|e| e.in_test(&spec.name))
}

fn run_test_inner<E: PermutationExecutor + ?Sized>(
    spec: &TestSpec,
    manifest: &StimulusManifest,
    table: &EmbeddingTable,
    options: &RunOptions,
    exec: &E,
) -> Result<TestResult> {
    let pooling = spec.pooling.unwrap_or(options.pooling);
    let tie_policy = spec.tie_policy.unwrap_or(options.tie_policy);
    let [x, y, a, b] = spec
        .categories()
        .map(|name| resolve_category(manifest, table, name, pooling));
    let (x, y, a, b) = (x?, y?, a?, b?);

    let (statistic, profile) = test_statistic(&x, &y, &a, &b)?;
    let d = effect_size(&profile)?;
    let p = p_value_with(
        exec,
        &profile,
        options.exact_limit,
        options.mc_samples,
        options.seed,
        tie_policy,
    )?;
    Ok(TestResult {
        name: spec.name.clone(),
        x_category: spec.x_category.clone(),
        y_category: spec.y_category.clone(),
        a_category: spec.a_category.clone(),
        b_category: spec.b_category.clone(),
        statistic,
        d,
        p,
        n_t: x.size(),
        n_a: a.size(),
        n_b: b.size(),
        magnitude: Magnitude::classify(d),
        direction: Direction::of(d),
    })
}

/// Runs every spec in order. A failing test does not stop the battery; its
/// slot holds the error. Fails only if the battery is empty or nothing ran.
pub fn run_battery<E: PermutationExecutor + ?Sized>(
    battery: &[TestSpec],
    manifest: &StimulusManifest,
    table: &EmbeddingTable,
    options: &RunOptions,
    exec: &E,
) -> Result<Vec<Result<TestResult>>> {
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    let results: Vec<_> = battery
        .iter()
        .map(|spec| run_test(spec, manifest, table, options, exec))
        .collect();
    if results.iter().all(|r| r.is_err()) {
        return Err(Error::NoRunnableTests);
    }
    Ok(results)
}

/// `name: message` lines for the failed slots of a battery run.
pub fn failures(results: &[Result<TestResult>]) -> Vec<String> {
    results
        .iter()
        .filter_map(|r| r.as_ref().err())
        .map(|e| format!("{e}"))
        .collect()
}
