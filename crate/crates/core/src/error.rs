use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed row {line} in {path}: {msg}")]
    MalformedRow {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("non-contiguous years in mortality data (gap after {0})")]
    NonContiguousYears(i32),

    #[error("non-contiguous ages in mortality data (gap after {0})")]
    NonContiguousAges(u32),

    #[error("empty mortality dataset")]
    EmptyDataset,

    #[error("mortality dataset needs at least 2 years and 2 ages, got {years} x {ages}")]
    TooSmallToFit { years: usize, ages: usize },

    #[error("no period variation: centered log-rate matrix is zero, b is undefined")]
    NoPeriodVariation,

    #[error("non-finite log death rate at age {age}, year {year}")]
    NonFiniteLog { age: u32, year: i32 },

    #[error("rank-1 factorization did not converge after {0} iterations")]
    FitNotConverged(usize),

    #[error("age range {age}..={last} outside fitted range {min}..={max}")]
    AgeOutOfRange {
        age: u32,
        last: u32,
        min: u32,
        max: u32,
    },

    #[error("dataset has no exposures and no synthetic exposure is configured")]
    MissingExposures,

    #[error("empty cohort: operation needs at least one alive policyholder")]
    EmptyCohort,

    #[error("cohort of {0} lives too large for exact enumeration (max 20)")]
    CohortTooLarge(usize),

    #[error("zero premium-annuity denominator: no premium payment has positive probability")]
    ZeroAnnuity,

    #[error("empty sample vector")]
    EmptySamples,

    #[error("zero standard deviation: factor is undefined")]
    ZeroStdDev,

    #[error("refit failures ({failures}) exceeded cap ({cap}) out of {scenarios} scenarios")]
    RefitFailureCap {
        failures: usize,
        cap: usize,
        scenarios: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
