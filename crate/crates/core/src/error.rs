use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate {kind} identifier `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("incidence ({object}, {attribute}) is out of bounds")]
    IncidenceOutOfBounds { object: usize, attribute: usize },

    #[error("{what} is {actual}, above the enumeration limit of {limit}")]
    Guard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("value {value} at ({object}, {feature}) lies outside [-1, 1]")]
    ValueOutOfRange {
        object: String,
        feature: String,
        value: f64,
    },

    #[error("malformed scaled attribute id `{0}` (expected `<feature>#<k>`)")]
    MalformedAttributeId(String),

    #[error("invalid scaling parameter s = {0} (must be >= 1)")]
    InvalidScale(usize),

    #[error("business process {tid} has no {side} entries")]
    OneSidedProcess { tid: String, side: &'static str },

    #[error("journal entry {id} has a zero value")]
    ZeroEntry { id: i64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("mass functions are defined over different universes")]
    UniverseMismatch,

    #[error("total conflict: every combination of focal sets has an empty intersection")]
    TotalConflict,

    #[error("not a belief function: Moebius inversion gives mass {mass} on {set}")]
    NotBelief { set: String, mass: f64 },

    #[error("transform undefined: {0}")]
    TransformUndefined(String),

    #[error("combination produced {count} focal sets, above the cap of {cap}")]
    FocalCap { count: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("training: {0}")]
    Training(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
