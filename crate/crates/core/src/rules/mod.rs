//! Vertex and propagator rules over canonical edge variables.

mod dump;
mod edge;
mod spec;
mod vertex;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use dump::{RuleTerm, VertexKind, VertexRule, MASS_TERM_CONVENTION};
pub use edge::{EdgeContext, EdgeVar};
pub use spec::{DiffeoSpec, Interaction, NonlocalSpec, Propagator, TheorySpec};
pub use vertex::{
    free_vertex, generalized_vertex, interaction_vertex, nonlocal_beta, propagator, total_vertex, RuleTable, VertexForm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("vertex valence must be at least 3, got {0}")]
    Valence(usize),
    #[error("vertex of valence {expected} given {got} adjacent edges")]
    Adjacency { expected: usize, got: usize },
    #[error("edge subset {0} is not a proper non-empty subset of the legs")]
    EdgeSubset(String),
    #[error("invalid theory or transformation: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
