use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or inconsistent configuration (unknown keys, unit tags, preset names).
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs whose shapes do not fit together (time grids, series lengths).
    #[error("structural error: {0}")]
    Structure(String),

    #[error("numerical failure at t = {time_ps:.6} ps: norm drift {drift:.3e} in one step")]
    NormDrift { time_ps: f64, drift: f64 },

    #[error("no convergence after {rounds} refinement rounds (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotConverged {
        rounds: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("propagation of ensemble member (J={j}, M={m}) failed: {source}")]
    Member {
        j: u32,
        m: i32,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
