//! Tree and DAG decompositions and the tree queries built on them.

mod dag;
mod format;
mod heuristic;
mod tree;
mod treedec;

pub use dag::{validate_dag_decomposition, DagDecomposition};
pub use format::{
    parse_decomposition, write_dag_decomposition, write_rooted_decomposition,
    write_tree_decomposition, DecompKind, DecompositionFile,
};
pub use heuristic::{build_tree_decomposition_heuristic, Elimination};
pub use tree::Tree;
pub use treedec::{
    validate_tree_decomposition, DecompViolation, RootedTreeDecomposition, TreeDecomposition,
};
