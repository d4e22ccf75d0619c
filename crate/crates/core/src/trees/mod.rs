//! Tree enumeration and exact tree sums.

mod eval;
pub mod kinematics;
mod partitions;
mod sums;
mod topology;

pub use eval::{amplitude, bind_root, sum_over_decorations, Decoration, SumMode, VertexDecoration};
pub use partitions::{set_partitions, set_partitions_into};
pub use sums::{
    bprime_structural, glue_a44, recursive_b, s_linear_tree_sum, symmetric_offshell, tree_sum_a, tree_sum_b,
    tree_sum_b_in, tree_sum_bprime, BprimeMode, SumOptions, TraceEntry, TreeSumResult,
};
pub use topology::{enumerate_trees, top_partition_groups, Node, TreeTopology, VertexView};

use crate::algebra::AlgebraError;
use crate::rules::RuleError;

#[derive(Debug, thiserror::Error)]
pub enum TreeError {
    #[error("decoration does not fit tree {0}")]
    Decoration(String),
    #[error("root propagator requested for an unrooted tree")]
    RootPropagator,
    #[error("substitution failed in tree {tree}: {source}")]
    Substitution { tree: String, source: AlgebraError },
    #[error("{0} legs is below the minimum for this sum")]
    TooFewLegs(usize),
    #[error("{0} legs exceeds the supported maximum of 62")]
    TooManyLegs(usize),
    #[error("offshell set {0} is not a subset of the external legs")]
    OffshellSet(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("kinematics: {0}")]
    Kinematics(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
