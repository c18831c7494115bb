//! Browser bindings: solve a pasted game, generate an instance, and play one
//! traced simulation game.

use std::fmt::Write as _;

use paritysim::decomp::{build_tree_decomposition_heuristic, write_tree_decomposition, Elimination};
use paritysim::generate::{partial_ktree, KTreeParams};
use paritysim::simgame::{follow_even, follow_odd, EvenAgent, OddAgent, RandomEven, RandomOdd, SimConfig};
use paritysim::solvers::{run_slice_reduce, solve_treewidth};
use paritysim::{parse_pgsolver, solve_zielonka, write_pgsolver, Owner};
use wasm_bindgen::prelude::*;

/// One line per vertex: owner, priority, and the winner according to
/// Zielonka's algorithm and to the simulation game over a min-fill tree
/// decomposition.
pub fn solve_text(game: &str) -> Result<String, String> {
    let game = parse_pgsolver(game).map_err(|e| e.to_string())?;
    let zielonka = solve_zielonka(&game);
    let td = build_tree_decomposition_heuristic(&game, Elimination::MinFill);
    let width = td.width().map_err(|e| e.to_string())?;
    let config = SimConfig { budget: 2_000_000, ..SimConfig::default() };
    let mut out = format!("decomposition width {width}\nvertex owner priority zielonka simulation\n");
    for v in game.vertices() {
        let simulated = match solve_treewidth(&game, &td, v, &config) {
            Ok(report) => report.winner.to_string(),
            Err(e) => format!("({e})"),
        };
        writeln!(
            out,
            "{v:>6} {:>5} {:>8} {:>8} {simulated:>10}",
            game.owner(v).to_string(),
            game.priority(v).0,
            zielonka.winner(v).to_string()
        )
        .unwrap();
    }
    Ok(out)
}

/// A random game over a partial k-tree, followed by its decomposition.
pub fn generate_text(n: usize, k: usize, d: u32, seed: u64) -> Result<String, String> {
    if n == 0 || k == 0 || d == 0 || n > 200 {
        return Err("need 1 <= n <= 200, k >= 1 and d >= 1".into());
    }
    let (game, td) = partial_ktree(&KTreeParams::new(n, k, d), seed);
    Ok(format!("{}{}", write_pgsolver(&game), write_tree_decomposition(&td, None)))
}

/// The winner from `start` follows a winning strategy; the loser moves at
/// random. Sets after each rejection come from slice/reduce over a min-fill
/// decomposition. Returns the move-by-move transcript.
pub fn simulate_text(game: &str, start: usize, seed: u64) -> Result<String, String> {
    let game = parse_pgsolver(game).map_err(|e| e.to_string())?;
    if start >= game.len() {
        return Err(format!("no vertex {start}"));
    }
    let zielonka = solve_zielonka(&game);
    let winner = zielonka.winner(start);
    let td = build_tree_decomposition_heuristic(&game, Elimination::MinFill);
    let mut follower_even;
    let mut follower_odd;
    let mut random_even = RandomEven::new(seed);
    let mut random_odd = RandomOdd::rejecting(seed, 0.5);
    let (even, odd): (&mut dyn EvenAgent, &mut dyn OddAgent) = match winner {
        Owner::Even => {
            follower_even = follow_even(zielonka.strategy(Owner::Even));
            (&mut follower_even, &mut random_odd)
        }
        Owner::Odd => {
            follower_odd = follow_odd(zielonka.strategy(Owner::Odd));
            (&mut random_even, &mut follower_odd)
        }
    };
    let run = run_slice_reduce(&game, &td, start, even, odd, 10_000).map_err(|e| e.to_string())?;
    let mut out = format!("{winner} wins from {start} and plays a winning strategy; {} plays at random\n", winner.opponent());
    for line in &run.outcome.transcript {
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn solve(game: &str) -> Result<String, JsError> {
    solve_text(game).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn generate(n: usize, k: usize, d: u32, seed: u64) -> Result<String, JsError> {
    generate_text(n, k, d, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(game: &str, start: usize, seed: u64) -> Result<String, JsError> {
    simulate_text(game, start, seed).map_err(|e| JsError::new(&e))
}
