//! Association tests over sets of image embeddings.
//!
//! Given target sets `X`, `Y` and attribute sets `A`, `B` of embedding
//! vectors, the crate computes the per-element differential association
//! `s(w, A, B)`, the set-level test statistic, a standardized effect size and
//! a one-sided permutation p-value (exact enumeration or seeded Monte-Carlo).
//! On top of that sit declarative test batteries, intersectional hypothesis
//! verdicts, false-positive calibration and valence word selection.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! execution and the command-line front end live in the `ieat` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod association;
pub mod battery;
pub mod combinatorics;
pub mod embedding;
mod error;
pub mod hypothesis;
pub mod manifest;
pub mod permutation;
pub mod rng;
pub mod specificity;
pub mod valence;

pub use association::{
    cosine, differential_association, effect_size, test_statistic, AssociationProfile,
};
pub use battery::{
    run_battery, run_test, validate_battery, Direction, Magnitude, RunOptions, TestResult,
    TestSpec,
};
pub use embedding::{CategorySet, EmbeddingRecord, EmbeddingTable};
pub use error::{Error, Result};
pub use hypothesis::{hypothesis_report, HypothesisReport, Verdict};
pub use manifest::{resolve_category, CategoryEntry, ExemplarEntry, Pooling, Role, StimulusManifest};
pub use permutation::{
    exact_p_value, monte_carlo_p_value, plan, PValueResult, PermutationExecutor,
    PermutationPlan, PValueMethod, Sequential, TiePolicy, DEFAULT_EXACT_LIMIT,
    DEFAULT_MC_SAMPLES, MIN_MC_SAMPLES,
};
pub use specificity::{specificity_eval, SpecificityReport};
pub use valence::{select_valence_words, ValenceNormRow, ValenceSelection};
