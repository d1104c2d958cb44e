use thiserror::Error;

/// Errors raised while building or interrogating an activity network.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("activity at row {index} has an empty id")]
    EmptyActivityId { index: usize },
    #[error("duplicate activity id `{id}` (row {index})")]
    DuplicateActivityId { id: String, index: usize },
    #[error("activity `{id}`: {reason}")]
    InvalidDates { id: String, reason: String },
    #[error("dependency {index} references unknown activity id `{id}`")]
    UnknownActivityId { id: String, index: usize },
    #[error("dependency {index} is a self-loop on `{id}`")]
    SelfLoop { id: String, index: usize },
    #[error("dependency cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("network is empty after removing isolated nodes")]
    EmptyNetwork,
    #[error("unknown node index {0}")]
    UnknownNode(usize),
    #[error("degenerate normalization: n = {n} with nonzero sum {sum}")]
    DegenerateNormalization { n: usize, sum: f64 },
}

/// Errors raised by the delay, binning and mutual-information analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no activity has the actual date needed for this delay indicator")]
    NoValidDelays,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("bin count must be at least 1")]
    ZeroBins,
    #[error("length mismatch: metric has {metric} values, delays have {delays}")]
    LengthMismatch { metric: usize, delays: usize },
    #[error("non-finite metric value at node {0}")]
    NonFinite(usize),
}

/// Errors raised by the synthetic generator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("degenerate config: generated network has no edges")]
    DegenerateConfig,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
