use serde_json::{json, Value};
use thiserror::Error;

use crate::interpolation::ConstantBounds;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, found: usize, expected: usize },
    #[error("distance matrix must contain finite nonnegative entries with a zero diagonal; bad entry at ({i}, {j})")]
    InvalidDistance { i: usize, j: usize },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    SymmetryViolation { i: usize, j: usize },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("base point {base} is not valid for a space with {points} points")]
    BadBase { base: usize, points: usize },
    #[error("pair {index} references point {point}, but the space has {points} points")]
    PointOutOfRange { index: usize, point: usize, points: usize },
    #[error("pair {index} joins point {point} with itself")]
    DegeneratePair { index: usize, point: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("function is not {limit}-Lipschitz on the subset: ratio {ratio} at points ({p}, {q})")]
    NotLipschitzOnSubset { p: usize, q: usize, ratio: f64, limit: f64 },
    #[error("base point conflict: {0}")]
    BaseConflict(String),
    #[error("coefficients do not have zero total mass (sum {sum})")]
    MassImbalance { sum: f64 },
    #[error("the interpolation constraints are inconsistent")]
    Infeasible,
    #[error("the pair set is not Lipschitz interpolating: {0}")]
    NotInterpolating(String),
    #[error("{pairs} pairs exceed the enumeration cap of {cap}; only bounds are available")]
    EnumerationCapExceeded { pairs: usize, cap: u32, bounds: Box<ConstantBounds> },
    #[error("at least two pairs are required, found {count}")]
    TooFewPairs { count: usize },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("the pair graph is not a spanning tree: {reason}")]
    NotATree { reason: String, cycle: Option<Vec<usize>>, unreached: Vec<usize> },
    #[error("ball configuration fails condition ({condition})")]
    ConditionsFail { condition: u8 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("{what} of size {size} exceeds the cap {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
    #[error("no admissible candidate after prefix {prefix:?}")]
    NoAdmissibleCandidate { prefix: Vec<usize> },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::InvalidDistance { .. } => "InvalidDistance",
            Error::SymmetryViolation { .. } => "SymmetryViolation",
            Error::ZeroDistance { .. } => "ZeroDistance",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::BadBase { .. } => "BadBase",
            Error::PointOutOfRange { .. } => "PointOutOfRange",
            Error::DegeneratePair { .. } => "DegeneratePair",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NotLipschitzOnSubset { .. } => "NotLipschitzOnSubset",
            Error::BaseConflict(_) => "BaseConflict",
            Error::MassImbalance { .. } => "MassImbalance",
            Error::Infeasible => "Infeasible",
            Error::NotInterpolating(_) => "NotInterpolating",
            Error::EnumerationCapExceeded { .. } => "EnumerationCapExceeded",
            Error::TooFewPairs { .. } => "TooFewPairs",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::NotATree { .. } => "NotATree",
            Error::ConditionsFail { .. } => "ConditionsFail",
            Error::NotApplicable(_) => "NotApplicable",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::NoAdmissibleCandidate { .. } => "NoAdmissibleCandidate",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::Format(_) => "Format",
        }
    }

    /// Structured witness for the failure, `null` when there is none.
    pub fn witness(&self) -> Value {
        match self {
            Error::NotSquare { row, .. } => json!({ "row": row }),
            Error::InvalidDistance { i, j }
            | Error::SymmetryViolation { i, j }
            | Error::ZeroDistance { i, j } => json!([i, j]),
            Error::TriangleViolation { i, j, k } => json!([i, j, k]),
            Error::BadBase { base, .. } => json!({ "base": base }),
            Error::PointOutOfRange { index, point, .. } => json!({ "pair": index, "point": point }),
            Error::DegeneratePair { index, point } => json!({ "pair": index, "point": point }),
            Error::NotLipschitzOnSubset { p, q, ratio, .. } => json!({ "pair": [p, q], "ratio": ratio }),
            Error::MassImbalance { sum } => json!({ "sum": sum }),
            Error::EnumerationCapExceeded { bounds, .. } => {
                serde_json::to_value(bounds.as_ref()).unwrap_or(Value::Null)
            }
            Error::SizeMismatch { expected, found } => json!({ "expected": expected, "found": found }),
            Error::NotATree { cycle, unreached, .. } => json!({ "cycle": cycle, "unreached": unreached }),
            Error::ConditionsFail { condition } => json!({ "condition": condition }),
            Error::NoAdmissibleCandidate { prefix } => json!({ "prefix": prefix }),
            _ => Value::Null,
        }
    }

    /// `{"error": {"kind": ..., "detail": ..., "witness": ...}}`
    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "detail": self.to_string(), "witness": self.witness() } })
    }
}
