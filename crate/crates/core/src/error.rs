use thiserror::Error;

use crate::dataset::GroupLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("duplicate record for bank `{bank}` in year {year}")]
    DuplicateKey { bank: String, year: i32 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no available records for bank `{bank}` in {from}..={to}")]
    EmptyWindow { bank: String, from: i32, to: i32 },

    #[error("group {label} has {count} samples, at least {required} required")]
    InsufficientGroup {
        label: GroupLabel,
        count: usize,
        required: usize,
    },

    #[error("{variables} predictors exceed the limit of sample size minus one ({limit})")]
    VariableCount { variables: usize, limit: usize },

    #[error("variable `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series or continued fraction failed to converge: {0}")]
    Convergence(String),

    #[error("matrix is singular or not positive definite (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("group means coincide; no separating direction exists")]
    DegenerateSeparation,

    #[error("variable binding error: {0}")]
    Binding(String),

    #[error("too few cases for the test: {0}")]
    InsufficientCases(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("no data available for bank `{bank}` in year {year}")]
    MissingData { bank: String, year: i32 },

    #[error("no actual label for bank `{bank}` in year {year}")]
    MissingLabel { bank: String, year: i32 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("model file error: {0}")]
    ModelFile(String),
}
