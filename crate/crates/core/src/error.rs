use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mesh resolution must be at least 1 cell per side")]
    EmptyMesh,

    #[error("unsupported edge quadrature order {0} (expected 2 or 3)")]
    UnsupportedEdgeOrder(usize),

    #[error("unknown example '{0}'")]
    UnknownExample(String),

    #[error("parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("coercivity violated: sampled min of mu - div(beta)/2 is {0}")]
    NotCoercive(f64),

    #[error("no theoretical rate for {norm} on {label}: {reason}")]
    NoExpectedRate {
        label: String,
        norm: String,
        reason: &'static str,
    },

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("every vertex is constrained; the free system is empty")]
    EmptySystem,

    #[error("point ({0}, {1}) lies outside the unit square")]
    OutsideDomain(f64, f64),

    #[error("matrix is singular at pivot {index}")]
    SingularMatrix { index: usize },

    #[error("direct solve residual {residual:e} exceeds {limit:e}")]
    InaccurateSolve { residual: f64, limit: f64 },

    #[error("GMRES did not converge in {iterations} iterations (best residual {best_residual:e})")]
    NotConverged { iterations: usize, best_residual: f64 },

    #[error("solver failed at k = {k}: {source}")]
    SweepSolve { k: i32, source: Box<Error> },

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),

    #[error("fit needs at least 2 in-window points with positive error, found {0}")]
    TooFewPoints(usize),

    #[error("all in-window errors are zero or negative")]
    NonPositiveErrors,

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of the linear solve rather than of the inputs.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::SingularMatrix { .. } | Error::InaccurateSolve { .. } | Error::NotConverged { .. } => true,
            Error::SweepSolve { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
