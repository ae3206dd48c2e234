use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),

    #[error("self loop at vertex {0}")]
    SelfLoop(u32),

    #[error("edge ({u}, {v}) has probability {p} outside (0, 1]")]
    ProbabilityOutOfRange { u: u32, v: u32, p: f64 },

    #[error("endpoint {vertex} outside [0, {n})")]
    EndpointOutOfRange { vertex: u32, n: usize },

    #[error("instance too large: {what} = {actual} exceeds limit {limit}")]
    InstanceTooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("exact enumeration requires an oracle in canonical mode")]
    NonCanonicalOracle,

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("model does not support conditional completion")]
    ConditionalCompletionUnsupported,

    #[error("budget/cost partition classes are not disjoint at vertex {0}")]
    PartitionNotDisjoint(u32),

    #[error("invalid Ruzsa-Szemeredi structure: {0}")]
    InvalidRsGraph(String),

    #[error("realization does not carry its generating scenario")]
    ScenarioUnknown,

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
