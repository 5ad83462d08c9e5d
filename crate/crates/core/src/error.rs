use std::path::PathBuf;

/// Errors produced by the basis math, volumes, renderer and pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient count mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate center set: {0}")]
    DegenerateCenters(String),

    #[error("unknown basis `{0}` (expected one of sh2, srbf4, srbf8v1, srbf8v2, srbf8v3, srbf14)")]
    UnknownBasis(String),

    #[error("point lies outside cascade {cascade}")]
    OutsideCascade { cascade: usize },

    #[error("cell ({x}, {y}, {z}) is out of range for a {dims}^3 grid")]
    CellOutOfRange { x: i64, y: i64, z: i64, dims: usize },

    #[error("resolution mismatch: {a_width}x{a_height} vs {b_width}x{b_height}")]
    ResolutionMismatch {
        a_width: usize,
        a_height: usize,
        b_width: usize,
        b_height: usize,
    },

    #[error("{path}:{line}: {message}")]
    SceneLoad {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported image: {0}")]
    ImageFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
