use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("unsupported element shape: {0}")]
    UnsupportedShape(String),

    /// The retained degrees of freedom do not identify polynomials of degree `k`.
    #[error("property S violated on element {}: smallest scaled singular value {min_sv:e}", element.map_or("?".to_string(), |e| e.to_string()))]
    PropertyS { element: Option<usize>, min_sv: f64 },

    #[error("model error: {0}")]
    Model(String),

    #[error("solver failure: {message} (relative residual {residual:e})")]
    Solver { message: String, residual: f64 },

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("report unavailable: {0}")]
    ReportUnavailable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::InvalidGeometry(msg.into())
    }

    pub(crate) fn mesh(msg: impl Into<String>) -> Self {
        Error::InvalidMesh(msg.into())
    }

    /// Attach an element index to a property-S failure raised at element level.
    pub fn at_element(self, id: usize) -> Self {
        match self {
            Error::PropertyS { min_sv, .. } => Error::PropertyS {
                element: Some(id),
                min_sv,
            },
            other => other,
        }
    }
}
