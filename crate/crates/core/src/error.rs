use thiserror::Error;

/// Errors surfaced by the simulation, solver and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("out of domain: point ({x}, {y}) lies outside the arena")]
    OutOfDomain { x: f64, y: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid config key `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("negative density {value} at index {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("normal vector is not unit length (|nu| = {norm})")]
    NonUnitNormal { norm: f64 },

    #[error("robot {robot} starts at the tile centre; hitting-time formula is singular")]
    SingularHittingTime { robot: usize },

    #[error("tile centred at ({x}, {y}) with side {side} is not inside the arena")]
    TileOutsideArena { x: f64, y: f64, side: f64 },

    #[error("time axes do not match: {0}")]
    MismatchedTimeAxes(String),

    #[error("undefined time average at t = 0")]
    ZeroTimeAverage,

    #[error("interaction factor F(u) = {value} is not positive")]
    NonPositiveInteraction { value: f64 },

    #[error("missing runs for sweep points: {0}")]
    MissingRuns(String),

    #[error("unsupported figure request: {0}")]
    UnsupportedFigure(String),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
