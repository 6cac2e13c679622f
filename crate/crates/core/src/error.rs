use thiserror::Error;

/// Errors produced by the geometry, metric and domain routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric or structural parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A point lies outside the domain of the operation (e.g. outside the unit disk).
    #[error("outside domain: {0}")]
    Domain(String),

    /// A mesh or surface could not be constructed.
    #[error("build failed: {0}")]
    Build(String),

    /// The mesh violates one of the `TriMesh` invariants.
    #[error("invalid mesh: {0}")]
    Mesh(String),

    /// Some vertices cannot be reached from the source.
    #[error("disconnected: {count} vertices unreachable from vertex {source_vertex} (first unreachable: {first})")]
    Disconnected {
        source_vertex: usize,
        first: usize,
        count: usize,
    },

    /// Malformed text input (mesh files, metric files, configs).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn ensure_finite_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        param(format!("{name} must be finite and positive, got {x}"))
    }
}
