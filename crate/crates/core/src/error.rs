use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge endpoint `{0}` is not a declared vertex")]
    UnknownEndpoint(String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("edge `{0}` -> `{1}` has a non-positive label")]
    NonPositiveLabel(String, String),
    #[error("vertex `{0}` is not in the graph")]
    RootNotInGraph(String),
    #[error("bad vertex order: {0}")]
    BadOrder(String),
    #[error("root `{root}` lies outside the component it was given for")]
    RootOutsideComponent { root: String },
    #[error("invalid auxiliary tree: {0}")]
    InvalidAuxTree(String),
    #[error("the graph has edges between different strongly connected components")]
    NotStronglyConnectedComponents,
    #[error("the network is not weakly reversible")]
    NotWeaklyReversible,
    #[error("complexes of vertices `{0}` and `{1}` coincide")]
    DuplicateComplex(String, String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("complex of vertex `{0}` has a negative entry")]
    NegativeComplexEntry(String),
    #[error("state must be strictly positive and finite")]
    NonPositiveState,
    #[error("monomial x^y cannot be evaluated exactly (non-integer exponent)")]
    InexactExponent,
    #[error("the supplied state is not a complex-balanced equilibrium (residual {0:e})")]
    NotACbe(f64),
    #[error("Newton iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("dimension {0} exceeds the supported maximum of {1}")]
    DimensionTooLarge(usize, usize),
    #[error("the state does not lie in the stratum of the given order")]
    PointNotInStratum,
    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
