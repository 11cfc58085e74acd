use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument {arg} outside the domain ({expected})")]
    Domain {
        func: &'static str,
        arg: f64,
        expected: &'static str,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("invalid configuration: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, arg: f64, expected: &'static str) -> Self {
        Error::Domain {
            func,
            arg,
            expected,
        }
    }
}
