use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: component X{component} references x{index} but the field has dimension {dim}")]
    VariableOutOfRange {
        line: usize,
        component: usize,
        index: usize,
        dim: usize,
    },
    #[error("line {line}: duplicate component label X{component}")]
    DuplicateComponent { line: usize, component: usize },
    #[error("missing component label X{component}; labels must run contiguously from X1")]
    MissingComponent { component: usize },
    #[error("field text defines no components")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("component X{component}: {source}")]
    Component {
        component: usize,
        #[source]
        source: ExprError,
    },
    #[error("point has dimension {got}, field has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("index {index} is outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("{0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("non-finite state encountered; last valid time t = {last_valid_t}")]
    BlowUp { last_valid_t: f64 },
    #[error("trajectory needs at least 2 samples, got {0}")]
    DegenerateTrajectory(usize),
    #[error("trajectory samples are not uniformly spaced in time (sample {index})")]
    NonUniform { index: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Error)]
pub enum TrajectoryIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed trajectory CSV: {0}")]
    Format(String),
}
