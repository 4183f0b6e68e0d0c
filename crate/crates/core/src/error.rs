use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// The zero level set is empty; the surface has vanished.
    #[error("surface extinct: zero level set is empty")]
    Extinct,

    #[error("numerical blow-up at step {step}: {detail}")]
    Blowup { step: usize, detail: String },

    /// The shooting curve reached the rotation axis at a non-removable point.
    #[error("axis crossing at arclength {arclength:.6}")]
    AxisCrossing { arclength: f64 },

    #[error("no sign change of the closure mismatch in [{lo}, {hi}] ({} samples scanned)", scan.len())]
    Bracket {
        lo: f64,
        hi: f64,
        scan: Vec<(f64, Option<f64>)>,
    },

    #[error("series is not decreasing: no pinch")]
    NoPinch,

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("setup error: {0}")]
    Setup(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
