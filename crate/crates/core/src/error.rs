use thiserror::Error;

use crate::shapes::Cell;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition {0:?}: row lengths must be positive and weakly decreasing")]
    InvalidPartition(Vec<usize>),
    #[error("cannot parse partition from {0:?}")]
    PartitionSyntax(String),
    #[error("cell ({}, {}) lies outside the shape", .0.row, .0.col)]
    CellOutsideShape(Cell),
    #[error("shape is empty")]
    EmptyShape,

    #[error("value {value} in cell ({}, {}) is outside 1..={capacity}", .cell.row, .cell.col)]
    ValueOutOfRange { cell: Cell, value: usize, capacity: usize },
    #[error("value {0} appears more than once")]
    DuplicateValue(usize),
    #[error("values present must be exactly {expected_low}..={capacity}; {missing} is missing")]
    GapInTopValues { expected_low: usize, capacity: usize, missing: usize },
    #[error("nonempty cell ({}, {}) has an empty neighbour ({}, {}) to its right or below", .cell.row, .cell.col, .neighbour.row, .neighbour.col)]
    NonemptyRegionNotClosed { cell: Cell, neighbour: Cell },
    #[error("max of cell ({}, {}) is not below min of cell ({}, {})", .cell.row, .cell.col, .neighbour.row, .neighbour.col)]
    OrderViolation { cell: Cell, neighbour: Cell },
    #[error("{empty} empty cells exceed the level {level}")]
    TooManyEmptyCells { empty: usize, level: usize },
    #[error("malformed tableau: {0}")]
    MalformedTableau(String),

    #[error("level {level} out of range {low}..={high}")]
    LevelOutOfRange { level: usize, low: usize, high: usize },
    #[error("value {0} is not present")]
    ValueAbsent(usize),
    #[error("shapes or capacities differ")]
    ShapeMismatch,
    #[error("expected a complete tableau, got level {0}")]
    LevelNotZero(usize),
    #[error("invalid start pre-tableau: {0}")]
    InvalidStart(String),

    #[error("state space exceeds the limit of {limit}")]
    StateSpaceTooLarge { limit: usize },
    #[error("distributions are defined over different supports")]
    SupportMismatch,
    #[error("enumeration is empty")]
    EmptyEnumeration,
    #[error("cannot certify a step count: {0}")]
    CannotCertifySteps(String),

    #[error("sample size must be positive")]
    ZeroSamples,
    #[error("level {0} produced a zero ratio")]
    ZeroRatio(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
