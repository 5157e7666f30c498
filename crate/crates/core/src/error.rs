use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A payment rate lies outside the admissible set for the given worker.
    #[error("rate is not admissible for agent {agent} (margin {margin:e})")]
    Inadmissible { agent: usize, margin: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("optimizer found no feasible point: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
