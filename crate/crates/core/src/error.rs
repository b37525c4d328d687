use thiserror::Error;

use crate::construction::SpecReport;
use crate::subset::Subset;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exhaustive checking needs n <= {max}, got n = {n}")]
    ModeInfeasible { n: usize, max: usize },

    #[error("{what}: enumeration over n = {n} exceeds the limit of {limit}")]
    EnumerationInfeasible {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("code has a single codeword; minimum distance is undefined")]
    DegenerateCode,

    #[error("rank function is identically zero")]
    ZeroRank,

    #[error("union of cyclic flats misses elements {uncovered}")]
    UncoveredElements { uncovered: Subset },

    #[error("expanding q^k = {q}^{k} codewords exceeds the limit of {limit}")]
    ExpansionInfeasible { q: u64, k: usize, limit: u64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid generator matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid construction spec: {0}")]
    InvalidSpec(SpecReport),

    #[error("construction has {m} blocks; at most {max} are supported")]
    TooManyBlocks { m: usize, max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("target set {target} is not a valid {class} target")]
    ClassMismatch { target: Subset, class: &'static str },

    #[error("no availability record for elements {elements}")]
    AvailabilityMissing { elements: Subset },

    #[error("representation failed after {attempts} attempts; last mismatch at {witness}")]
    RepresentationFailed { attempts: usize, witness: Subset },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
