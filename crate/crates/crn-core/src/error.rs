use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("reaction has identical reactant and product: {0}")]
    SelfLoop(String),
    #[error("duplicate reaction: {0}")]
    DuplicateReaction(String),
    #[error("negative stoichiometric coefficient for {0}")]
    NegativeCoefficient(String),
    #[error("unknown species: {0}")]
    UnknownSpecies(String),
    #[error("species set must be nonempty")]
    EmptySet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("set is not a siphon")]
    NotASiphon,
    #[error("siphon enumeration exceeded the node budget of {0}")]
    ExplosionCap(u64),
    #[error("invalid intermediate set: {0}")]
    InvalidIntermediates(String),
    #[error("invalid catalyst set: {0}")]
    InvalidCatalysts(String),
    #[error("vector is not a conservation law of the reduced network")]
    NotAConservationLaw,
    #[error("vector is not a strictly positive T-semiflow of the reduced network")]
    NotATSemiflow,
    #[error("catalyst subnetwork is not conservative; T-semiflow lifting unavailable")]
    CatalystSubnetworkNotConservative,
    #[error("species sets do not form the required partition: {0}")]
    NotAPartition(String),
    #[error("cascade layers overlap illegally: {0}")]
    LayerOverlap(String),
    #[error("integration step size underflowed at t = {0}")]
    StepUnderflow(f64),
    #[error("non-finite state encountered at t = {0}")]
    NonFiniteState(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a structural validation: either fine, or a list of named violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violations(pub Vec<String>);

impl std::fmt::Display for Violations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.join("; "))
    }
}
