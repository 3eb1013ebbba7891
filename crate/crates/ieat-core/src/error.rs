use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch at `{id}`: expected {expected}, found {found}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("record `{0}` has no components")]
    EmptyVector(String),

    #[error("record `{id}` has a non-finite component at index {index}")]
    NonFinite { id: String, index: usize },

    #[error("record `{0}` has zero norm")]
    ZeroNorm(String),

    #[error("duplicate embedding id `{0}`")]
    DuplicateId(String),

    #[error("record id must not be empty (record #{0})")]
    EmptyId(usize),

    #[error("embedding table has no records")]
    EmptyTable,

    #[error("{0} must not be empty")]
    EmptySet(&'static str),

    #[error("target sets differ in size: |X| = {x}, |Y| = {y}")]
    SizeMismatch { x: usize, y: usize },

    #[error("all association values are identical; effect size is undefined")]
    DegenerateData,

    #[error("{total} partitions exceed the exact limit {limit}")]
    ExactLimitExceeded { total: u64, limit: u64 },

    #[error("partition count C({half2}, {half}) overflows 64 bits")]
    PartitionCountOverflow { half2: usize, half: usize },

    #[error("monte-carlo needs at least {minimum} samples, got {samples}")]
    TooFewSamples { samples: u64, minimum: u64 },

    #[error("duplicate category name `{0}`")]
    DuplicateCategory(String),

    #[error("category `{0}` has no exemplars")]
    EmptyCategory(String),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("category `{category}` references missing image ids: {}", ids.join(", "))]
    MissingImages { category: String, ids: Vec<String> },

    #[error("category `{category}`: pooled vector of exemplar `{exemplar}` has zero norm")]
    DegeneratePooledVector { category: String, exemplar: String },

    #[error("invalid test spec `{name}`: {reason}")]
    InvalidSpec { name: String, reason: String },

    #[error("test `{name}`: {source}")]
    Test { name: String, source: Box<Error> },

    #[error("battery is empty")]
    EmptyBattery,

    #[error("no test in the battery could be run")]
    NoRunnableTests,

    #[error("alpha {0} is outside (0, 1)")]
    InvalidAlpha(f64),

    #[error("at least {minimum} trials are required, got {trials}")]
    TooFewTrials { trials: usize, minimum: usize },

    #[error("pool holds {available} elements, partition needs {needed}")]
    InsufficientPool { available: usize, needed: usize },

    #[error("k must be at least 1")]
    InvalidK,

    #[error("norms table is empty")]
    EmptyNorms,

    #[error("valence score of `{0}` is not finite")]
    NonFiniteNorm(String),

    #[error("{available} words pass the imagery filter, {needed} needed")]
    InsufficientWords { available: usize, needed: usize },

    #[error("positive and negative word lists overlap on `{0}`")]
    ValenceOverlap(String),

    #[error("results are missing tests required by the {hypothesis} hypothesis: {}", names.join(", "))]
    MissingTests {
        hypothesis: &'static str,
        names: Vec<String>,
    },
}

impl Error {
    pub(crate) fn in_test(self, name: &str) -> Self {
        Error::Test {
            name: name.into(),
            source: Box::new(self),
        }
    }
}
