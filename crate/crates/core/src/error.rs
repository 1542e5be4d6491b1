use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("asymmetric distance matrix at ({i},{j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("negative distance at ({i},{j}): {d}")]
    NegativeDistance { i: usize, j: usize, d: f64 },
    #[error("zero-diagonal violation at ({i},{i}): {d}")]
    ZeroDiagonal { i: usize, d: f64 },
    #[error("triangle violation on ({i},{k}) via {j}: {dik} > {dij} + {djk}")]
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        dik: f64,
        dij: f64,
        djk: f64,
    },
    #[error("non-finite value at ({i},{j})")]
    NonFinite { i: usize, j: usize },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty graph")]
    EmptyGraph,
    #[error("{what} cap exceeded (limit {limit}); raise it with CLONEWT_CAPS={flag}=<n>")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        flag: &'static str,
    },
    #[error("no convergence within {0} iterations")]
    NonConvergence(usize),
    #[error("unknown rule `{name}`; registry: {registry}")]
    UnknownRule { name: String, registry: String },
    #[error("multiplicative rescaling is inconsistent for vertex {x}: non-neighbors {z1} and {z2} give different ratios")]
    InconsistentRescaling { x: usize, z1: usize, z2: usize },
    #[error("operation needs at least {0} vertices")]
    TooFewVertices(usize),
    #[error("rule `{0}` has no exact mode")]
    NotExact(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
