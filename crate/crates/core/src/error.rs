use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the physical domain of a model.
    #[error("domain error: {0}")]
    Domain(String),

    /// Photon energy at or above the pair-breaking edge.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Signal response evaluated on the parametric-oscillation pole.
    #[error("parametric oscillation threshold: |(iΔ+λ+)(iΔ+λ−)| = {denominator:e}")]
    OscillationThreshold { denominator: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("refusing to overwrite {} (pass --force)", .0.display())]
    OutputExists(PathBuf),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
