use crate::decompose::Axis;

/// Error type shared by every planning stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid footprint spec: {0}")]
    InvalidFootprint(String),

    #[error("invalid polygon `{id}`: {reason}")]
    InvalidPolygon { id: String, reason: String },

    #[error("rasterization of `{0}` produced no cells")]
    EmptyRegion(String),

    #[error("operation requires a connected region (`{0}` is not)")]
    DisconnectedRegion(String),

    #[error("operation requires a nonempty region")]
    EmptyInput,

    #[error("orientation {orientation:?} is not feasible for partition {partition}")]
    InfeasibleOrientation { orientation: Axis, partition: usize },

    #[error("no interior grid line available for a {0:?} cut")]
    NoInteriorCut(Axis),

    #[error("{n} partitions exceed the exact solver limit of {limit}; route with the genetic optimizer instead")]
    SolverLimit { n: usize, limit: usize },

    #[error("no candidates supplied for partition {0}")]
    NoCandidates(usize),

    #[error("invalid pipeline: {0}")]
    InvalidPipeline(String),

    #[error("coverage {achieved:.6} is below the required {required:.6} for `{polygon}`{diagnostics}")]
    CoverageShortfall {
        polygon: String,
        achieved: f64,
        required: f64,
        diagnostics: String,
    },

    #[error("benchmark matrix incomplete: no record for polygon `{polygon}` under pipeline `{pipeline}`")]
    IncompleteMatrix { polygon: String, pipeline: String },

    #[error("overhead: metric value {value} is below the claimed minimum {minimum}")]
    NotMinimal { value: f64, minimum: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed record line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
