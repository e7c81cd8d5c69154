use thiserror::Error;

use crate::circulation::Pair;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VortexError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vortices {0} and {1} coincide")]
    SingularConfiguration(usize, usize),

    #[error("reduced state is at the {0} singularity")]
    Singularity(Pair),

    #[error("triple collision: the reduced state is at the origin")]
    TripleCollision,

    #[error("total circulation vanishes; use the zero-circulation reduction")]
    ZeroTotalCirculation,

    #[error("leading pair sum vanishes for labeling {0:?}; relabel the vortices")]
    RelabelRequired([usize; 3]),

    #[error("inconsistent invariant: {0}")]
    InconsistentInvariant(String),

    #[error("state is off the admissible phase surface: {0}")]
    OffSurface(String),

    #[error("equilibria lie at infinity: {0}")]
    AtInfinity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(String),

    #[error("integration failed: {0}")]
    IntegrationFailure(String),
}

impl VortexError {
    /// True for failures caused by the numerics rather than by the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            VortexError::IntegrationFailure(_)
                | VortexError::DegeneratePolynomial(_)
                | VortexError::SingularConfiguration(..)
                | VortexError::Singularity(_)
                | VortexError::TripleCollision
        )
    }
}

pub type Result<T> = std::result::Result<T, VortexError>;
