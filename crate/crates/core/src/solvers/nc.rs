use crate::error::{Error, Result};
use crate::game::{Owner, ParityGame, Priority, Vertex};
use crate::simgame::{solve_simulation, Bag, OddChoosesSets, OddTrimsHistory, SimConfig, SolveReport};

/// Exchanges the players: owners swap and every priority goes up by one.
pub fn swap_players(game: &ParityGame) -> ParityGame {
    let owners = game.vertices().map(|v| game.owner(v).opponent()).collect();
    let priorities = game.vertices().map(|v| Priority(game.priority(v).0 + 1)).collect();
    let successors = game.vertices().map(|v| game.successors(v).to_vec()).collect();
    let mut swapped = ParityGame::new(owners, priorities, successors).expect("same edges as a valid game");
    for v in game.vertices() {
        swapped.set_name(v, game.name(v).map(str::to_owned));
    }
    swapped
}

/// `⌈(k + 1)(2 log_{3/2} n + 2)⌉`, the number of rounds after which the
/// bounded game declares Even the winner.
pub fn round_bound(k: usize, n: usize) -> u32 {
    assert!(n >= 1, "round bound needs a nonempty game");
    let log = (n as f64).ln() / 1.5f64.ln();
    let exact = (k as f64 + 1.0) * (2.0 * log + 2.0);
    // Guard against values like 39.000000000001 from rounding in the log.
    let nearest = exact.round();
    if (exact - nearest).abs() < 1e-9 {
        nearest as u32
    } else {
        exact.ceil() as u32
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NcOutcome {
    Winner(Owner),
    /// Both the game and its swapped version ran out of rounds or were won
    /// by Even: the game cannot have width at most `k`.
    TreewidthExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcReport {
    pub outcome: NcOutcome,
    pub rounds: u32,
    pub game_side: SolveReport,
    pub swapped_side: SolveReport,
}

/// Plays the bounded simulation game in which Odd picks every next set (at
/// most `k` vertices, containing the rejected vertex) and trims the history
/// to at most three records, on the game and on its swapped version.
pub fn solve_nc(game: &ParityGame, k: usize, s: Vertex, rounds: Option<u32>, config: &SimConfig) -> Result<NcReport> {
    if s >= game.len() {
        return Err(Error::UnknownVertex(s));
    }
    let r = rounds.unwrap_or_else(|| round_bound(k, game.len()));
    let config = SimConfig { round_bound: Some(r), ..config.clone() };
    let next = OddChoosesSets::new(game.len(), k);
    let hist = OddTrimsHistory { max: 3 };
    let start = Bag::new([s], None);
    let game_side = solve_simulation(game, start.clone(), s, &next, &hist, &config)?;
    let swapped = swap_players(game);
    let swapped_side = solve_simulation(&swapped, start, s, &next, &hist, &config)?;
    let outcome = match (game_side.winner, swapped_side.winner) {
        (Owner::Even, Owner::Even) => NcOutcome::TreewidthExceeded,
        (w, _) => NcOutcome::Winner(w),
    };
    Ok(NcReport { outcome, rounds: r, game_side, swapped_side })
}
