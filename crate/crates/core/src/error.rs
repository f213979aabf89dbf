use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// Input outside the domain of an operation (wrong manifold, shape, parameter).
    #[error("domain error: {0}")]
    Domain(String),
    /// `log_map` was asked for a point at or beyond the cut locus.
    #[error("point at distance {distance} is within the cut-locus guard (cut distance {cut})")]
    CutLocus { distance: f64, cut: f64 },
    /// Evaluation hit a singular point; callers should resample.
    #[error("resample requested: {0}")]
    Resample(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("flow stalled at iteration {iteration}: energy {energy} after {halvings} step halvings")]
    Stall {
        iteration: usize,
        energy: f64,
        halvings: usize,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(String),
}

impl GeometryError {
    /// Errors that mean "try another sample" rather than "the input is wrong".
    pub fn is_resample(&self) -> bool {
        matches!(self, Self::CutLocus { .. } | Self::Resample(_))
    }
}

impl From<std::io::Error> for GeometryError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for GeometryError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GeometryError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
