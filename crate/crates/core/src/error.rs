use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or law parameter is out of its admissible range.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    /// A point or argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested table does not fit into the configured cell budget.
    #[error("region of {cells} cells exceeds the budget of {budget} cells")]
    Resource { cells: u64, budget: u64 },

    /// A root-finder or minimiser could not bracket its target.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// A vertex sequence is not an admissible lattice path.
    #[error("invalid path: {0}")]
    Path(String),

    /// Internal state no longer satisfies a structural invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("degenerate density: {particles} particles on {sites} sites")]
    DegenerateDensity { particles: usize, sites: usize },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }
}
