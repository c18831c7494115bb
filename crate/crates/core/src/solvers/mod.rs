//! The concrete simulation-game solvers: over a DAG decomposition, over a
//! tree decomposition (on the modified game), and with sets chosen by Odd
//! under a round bound.

mod dagwidth;
mod nc;
mod slice_reduce;
mod treewidth;

pub use dagwidth::{solve_dagwidth, DagNext};
pub use nc::{round_bound, solve_nc, swap_players, NcOutcome, NcReport};
pub use slice_reduce::{run_slice_reduce, SliceReduceReferee, SliceReduceRun};
pub use treewidth::{modify_game, solve_treewidth, ModifiedGame, TreewidthNext};

use crate::decomp::DecompViolation;
use crate::error::Error;

pub(crate) fn invalid(violations: &[DecompViolation]) -> Error {
    let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Error::InvalidDecomposition(text.join("; "))
}
