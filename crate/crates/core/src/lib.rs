//! Core-matrix decomposition of graph Laplacians for labeled digraphs with
//! strongly connected components, and its application to mass-action
//! systems: binomial vector fields, complex-balanced equilibria, monomial
//! evaluation orders with their strata and cones, binomial differential
//! inclusions, and Lyapunov decrease certificates.

pub mod corpus;
pub mod crn;
pub mod equilibria;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod laplacian;
pub mod linalg;
pub mod scalar;
pub mod stability;

pub use crn::{build_network, ReactionNetwork, StateVector};
pub use error::{Error, Result};
pub use graph::{AuxKind, AuxTree, Edge, LabeledDigraph};
pub use linalg::Matrix;
pub use scalar::{Rational, Scalar};
