pub mod decomp;
pub mod error;
pub mod game;
pub mod generate;
pub mod oracle;
pub mod pgsolver;
pub mod profiles;
pub mod simgame;
pub mod solvers;

pub use error::{Error, Result};
pub use game::{
    cmp_significance, play, restrict, validate_game, GameSpec, Lasso, Owner, ParityGame, Priority,
    Strategy, Vertex, VertexDecl, Violation,
};
pub use oracle::{solve_bruteforce, solve_bruteforce_all, solve_zielonka, WinningPartition};
pub use pgsolver::{parse_pgsolver, write_pgsolver};
