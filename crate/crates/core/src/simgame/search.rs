//! Exhaustive AND-OR search: Even's choices are existential, Odd's
//! (including set and history choices a policy hands to Odd) universal.

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use super::safety::{SafeStates, Safety};
use super::{Arena, Bag, HistPolicy, History, NextPolicy, PathEntry, PendingPriority, Phase, Rules, SimState, Step};
use crate::error::{Error, Result};
use crate::game::{Owner, ParityGame, Priority, Vertex};
use crate::profiles::Exit;

/// How Even's profile choices are searched.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum ProfileSearch {
    /// For each vertex of the set, take the ⪯-smallest value whose accept
    /// branch Even wins (`-` if none), and only try the reject branch of
    /// that single profile. Exact: accepting values and rejected claims are
    /// both monotone in the significance order.
    #[default]
    Dominant,
    /// Try every assignment of values and `-` to the set's vertices.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    /// Even is declared the winner at the start of round `bound + 1`.
    pub round_bound: Option<u32>,
    /// Maximum number of distinct states to evaluate.
    pub budget: u64,
    pub profiles: ProfileSearch,
    /// Maximum nesting of moves along one line of play.
    pub max_depth: u32,
    pub pending_priority: PendingPriority,
    /// With a round bound, states the search may visit before it stops to
    /// work out where Odd cannot win at all, then carries on using that.
    /// `u64::MAX` turns this off.
    pub round_free_after: u64,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            round_bound: None,
            budget: 10_000_000,
            profiles: ProfileSearch::Dominant,
            max_depth: 100_000,
            pending_priority: PendingPriority::Counted,
            round_free_after: 200_000,
        }
    }
}

/// Counters gathered while searching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Distinct states evaluated.
    pub explored: u64,
    pub max_history: usize,
    pub max_path: usize,
    pub max_rejects: u32,
    pub max_round: u32,
    /// States of the round-free graph built to find where Odd cannot win.
    pub safety_states: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.explored += other.explored;
        self.max_history = self.max_history.max(other.max_history);
        self.max_path = self.max_path.max(other.max_path);
        self.max_rejects = self.max_rejects.max(other.max_rejects);
        self.max_round = self.max_round.max(other.max_round);
        self.safety_states += other.safety_states;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub winner: Owner,
    pub stats: SearchStats,
}

/// Decides the simulation game on `start` from `s` by exhaustive search.
pub fn solve_simulation(
    game: &ParityGame,
    start: Bag,
    s: Vertex,
    next: &dyn NextPolicy,
    hist: &dyn HistPolicy,
    config: &SimConfig,
) -> Result<SolveReport> {
    with_deep_stack(|| solve_on_this_thread(game, start, s, next, hist, config))
}

/// The search recurses once per move, so it runs on a thread with a stack
/// sized for `max_depth`.
#[cfg(not(target_arch = "wasm32"))]
fn with_deep_stack<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(scope, f)
            .map_err(|e| Error::Internal(format!("cannot start search thread: {e}")))?
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })
}

#[cfg(target_arch = "wasm32")]
fn with_deep_stack<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    f()
}

#[cfg(not(target_arch = "wasm32"))]
const STACK_BYTES: usize = 1 << 30;

fn solve_on_this_thread(
    game: &ParityGame,
    start: Bag,
    s: Vertex,
    next: &dyn NextPolicy,
    hist: &dyn HistPolicy,
    config: &SimConfig,
) -> Result<SolveReport> {
    let mut search = Search::new(game, next, hist, config);
    let bag = search.arena.intern_bag(start);
    let step = search.rules.initialize(&search.arena, bag, History::new(), s, 1, 0)?;
    let prepass = config.round_bound.is_some() && config.profiles == ProfileSearch::Dominant;
    if prepass {
        search.limit = config.budget.min(config.round_free_after);
    }
    let even = match search.step(step.clone()) {
        Err(Error::BudgetExceeded(_)) if prepass && search.limit < config.budget => {
            // Too slow without help: find where Odd cannot win at all, then
            // carry on with what the memo already holds.
            let free = Rules::new(game, None).with_pending_priority(config.pending_priority);
            let first = free.initialize(&search.arena, bag, History::new(), s, 1, 0)?;
            match Safety::new(&free, next, hist, config.budget, config.max_depth).run(&mut search.arena, first)? {
                Some((true, safe)) => {
                    search.stats.safety_states = safe.len() as u64;
                    return Ok(SolveReport { winner: Owner::Even, stats: search.stats });
                }
                Some((false, safe)) => {
                    search.stats.safety_states = safe.len() as u64;
                    search.safe = safe;
                }
                None => {}
            }
            search.limit = config.budget;
            search.depth = 0;
            search.step(step)?
        }
        other => other?,
    };
    Ok(SolveReport {
        winner: if even { Owner::Even } else { Owner::Odd },
        stats: search.stats,
    })
}

/// What the rest of a game can observe of the simulated path: its largest
/// priority, and for each source vertex the largest priority from that
/// entry on, which is what a cycle closing there would be won by.
#[derive(Clone, PartialEq, Eq, Hash)]
struct PathSummary {
    max: Option<Priority>,
    /// Sorted by vertex.
    sources: SmallVec<[(Vertex, Priority); 8]>,
}

impl PathSummary {
    fn of(path: &[PathEntry]) -> PathSummary {
        let mut sources: SmallVec<[(Vertex, Priority); 8]> = SmallVec::with_capacity(path.len());
        let mut running: Option<Priority> = None;
        for e in path.iter().rev() {
            let m = running.map_or(e.priority, |r| r.max(e.priority));
            running = Some(m);
            sources.push((e.from, m));
        }
        sources.sort_unstable();
        PathSummary { max: running, sources }
    }
}

/// A state up to the parts that cannot change its outcome: round counters
/// and the order of the simulated path.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Key {
    bag: super::BagId,
    history: History,
    c: Vertex,
    path: PathSummary,
    phase: Phase,
}

impl Key {
    pub(crate) fn of(state: &SimState) -> Key {
        Key {
            bag: state.bag,
            history: state.history.clone(),
            c: state.c,
            path: PathSummary::of(&state.path),
            phase: state.phase,
        }
    }
}

/// Known results for one key at different numbers of remaining rounds.
/// Fewer remaining rounds only help Even.
#[derive(Copy, Clone, Default)]
struct Known {
    even_up_to: Option<u32>,
    odd_from: Option<u32>,
}

struct Search<'a> {
    rules: Rules<'a>,
    arena: Arena,
    next: &'a dyn NextPolicy,
    hist: &'a dyn HistPolicy,
    config: &'a SimConfig,
    memo: FxHashMap<Key, Known>,
    /// States where Odd cannot win however many rounds remain.
    safe: SafeStates,
    active: FxHashSet<Key>,
    depth: u32,
    limit: u64,
    stats: SearchStats,
}

impl<'a> Search<'a> {
    fn new(
        game: &'a ParityGame,
        next: &'a dyn NextPolicy,
        hist: &'a dyn HistPolicy,
        config: &'a SimConfig,
    ) -> Search<'a> {
        Search {
            rules: Rules::new(game, config.round_bound).with_pending_priority(config.pending_priority),
            arena: Arena::new(),
            next,
            hist,
            config,
            memo: FxHashMap::default(),
            safe: SafeStates::empty(),
            active: FxHashSet::default(),
            depth: 0,
            limit: config.budget,
            stats: SearchStats::default(),
        }
    }

    fn remaining(&self, state: &SimState) -> u32 {
        match self.config.round_bound {
            Some(r) => r + 1 - state.round,
            None => u32::MAX,
        }
    }

    /// True iff Even wins from the result of a move.
    fn step(&mut self, step: Step) -> Result<bool> {
        match step {
            Step::End(verdict) => Ok(verdict.winner == Owner::Even),
            Step::Continue(state) => self.state(state),
        }
    }

    fn state(&mut self, state: SimState) -> Result<bool> {
        let key = Key::of(&state);
        let remaining = self.remaining(&state);
        if let Some(known) = self.memo.get(&key) {
            if known.even_up_to.is_some_and(|r| r >= remaining) {
                return Ok(true);
            }
            if known.odd_from.is_some_and(|r| r <= remaining) {
                return Ok(false);
            }
        }
        if self.safe.contains(&key) {
            return Ok(true);
        }
        let unbounded = self.config.round_bound.is_none();
        if unbounded && !self.active.insert(key.clone()) {
            return Err(Error::Precondition(
                "the policies allow a simulation game that never ends".into(),
            ));
        }
        self.stats.explored += 1;
        if self.stats.explored > self.limit {
            return Err(Error::BudgetExceeded(self.limit));
        }
        self.note(&state)?;
        if self.depth >= self.config.max_depth {
            return Err(Error::BudgetExceeded(self.config.max_depth as u64));
        }
        self.depth += 1;
        let even = match state.phase {
            Phase::Edge => self.edge(&state),
            Phase::Profile { pending, .. } => self.profile(&state, pending),
        };
        self.depth -= 1;
        let even = even?;
        if unbounded {
            self.active.remove(&key);
        }
        let known = self.memo.entry(key).or_default();
        if even {
            known.even_up_to = Some(known.even_up_to.map_or(remaining, |r| r.max(remaining)));
        } else {
            known.odd_from = Some(known.odd_from.map_or(remaining, |r| r.min(remaining)));
        }
        Ok(even)
    }

    fn note(&mut self, state: &SimState) -> Result<()> {
        let s = &mut self.stats;
        s.max_history = s.max_history.max(state.history.len());
        s.max_path = s.max_path.max(state.path.len());
        s.max_rejects = s.max_rejects.max(state.rejects);
        s.max_round = s.max_round.max(state.round);
        if state.path.len() > self.arena.bag(state.bag).len() + 1 {
            return Err(Error::Internal(format!(
                "simulated path has {} entries on a set of {} vertices",
                state.path.len(),
                self.arena.bag(state.bag).len()
            )));
        }
        Ok(())
    }

    fn edge(&mut self, state: &SimState) -> Result<bool> {
        let game = self.rules.game;
        let mover = game.owner(state.c);
        for &v in game.successors(state.c) {
            let step = self.rules.choose_edge(&self.arena, state, v)?;
            let even = self.step(step)?;
            match mover {
                Owner::Even if even => return Ok(true),
                Owner::Odd if !even => return Ok(false),
                _ => {}
            }
        }
        Ok(mover == Owner::Odd)
    }

    fn accept_wins(&mut self, state: &SimState, index: usize, value: Exit) -> Result<bool> {
        let bag = self.arena.bag(state.bag);
        let u = bag.vertices()[index];
        let mut profile = vec![None; bag.len()];
        profile[index] = value;
        let step = self.rules.accept(&self.arena, state, &profile, u)?;
        self.step(step)
    }

    fn profile(&mut self, state: &SimState, _pending: Vertex) -> Result<bool> {
        let size = self.arena.bag(state.bag).len();
        let values: Vec<Exit> = self.rules.priorities.iter().map(|&p| Some(p)).collect();
        match self.config.profiles {
            ProfileSearch::Dominant => {
                let mut best = vec![None; size];
                for (i, slot) in best.iter_mut().enumerate() {
                    for &q in &values {
                        if self.accept_wins(state, i, q)? {
                            *slot = q;
                            break;
                        }
                    }
                }
                self.reject_wins(state, best)
            }
            ProfileSearch::Exhaustive => {
                let mut wins: Vec<Vec<bool>> = Vec::with_capacity(size);
                for i in 0..size {
                    let mut row = Vec::with_capacity(values.len());
                    for &q in &values {
                        row.push(self.accept_wins(state, i, q)?);
                    }
                    wins.push(row);
                }
                // Mixed-radix counter over (values + `-`) per vertex; digit
                // `values.len()` stands for `-`.
                let radix = values.len() + 1;
                let mut digits = vec![0usize; size];
                loop {
                    let acceptable = digits
                        .iter()
                        .enumerate()
                        .all(|(i, &d)| d == values.len() || wins[i][d]);
                    if acceptable {
                        let profile: Vec<Exit> = digits
                            .iter()
                            .map(|&d| if d == values.len() { None } else { values[d] })
                            .collect();
                        if self.reject_wins(state, profile)? {
                            return Ok(true);
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == size {
                            return Ok(false);
                        }
                        digits[i] += 1;
                        if digits[i] < radix {
                            break;
                        }
                        digits[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }

    /// Whether Even survives every way Odd can reject `profile`. With no
    /// legal rejection this is vacuously true.
    fn reject_wins(&mut self, state: &SimState, profile: Vec<Exit>) -> Result<bool> {
        let pending = self.rules.reject(&mut self.arena, state, profile)?;
        let kept_options = self.hist.hist(&self.arena, &pending.history)?;
        if kept_options.is_empty() {
            return Err(Error::Internal("history policy offered no choice".into()));
        }
        for kept in kept_options {
            let trimmed: History = kept.iter().filter_map(|&i| pending.history.get(i).copied()).collect();
            let sets = self.next.next(&self.arena, state.bag, pending.pending, &trimmed)?;
            for set in sets {
                let id = self.arena.intern_bag(set);
                let step = self.rules.resume(&self.arena, &pending, &kept, id)?;
                if !self.step(step)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Owner::{Even, Odd};
    use crate::oracle::solve_zielonka;
    use crate::simgame::{FixedBag, KeepLast};

    fn whole(game: &ParityGame) -> Bag {
        Bag::new(game.vertices(), None)
    }

    fn solve_whole(game: &ParityGame, s: Vertex, config: &SimConfig) -> Owner {
        let bag = whole(game);
        solve_simulation(game, bag.clone(), s, &FixedBag(bag), &KeepLast, config).unwrap().winner
    }

    #[test]
    fn one_bag_matches_oracle_on_small_game() {
        let g = ParityGame::from_rows(&[
            (Even, 0, &[1, 2]),
            (Odd, 4, &[1, 3]),
            (Odd, 3, &[2, 0]),
            (Even, 1, &[0, 3]),
        ])
        .unwrap();
        let z = solve_zielonka(&g);
        for s in g.vertices() {
            assert_eq!(solve_whole(&g, s, &SimConfig::default()), z.winner(s), "vertex {s}");
        }
    }

    #[test]
    fn zero_round_bound_is_an_even_win() {
        let g = ParityGame::from_rows(&[(Odd, 1, &[0])]).unwrap();
        let config = SimConfig { round_bound: Some(0), ..SimConfig::default() };
        assert_eq!(solve_whole(&g, 0, &config), Even);
        assert_eq!(solve_whole(&g, 0, &SimConfig::default()), Odd);
    }

    #[test]
    fn all_unreachable_profile_forces_reject() {
        // Start outside the set {1}; 0 only reaches 1 through 2 (priority 5),
        // and the next set {0, 1, 2} lets the play settle on the odd loop.
        let g = ParityGame::from_rows(&[(Even, 0, &[2]), (Odd, 2, &[1]), (Odd, 5, &[1, 2])]).unwrap();
        let start = Bag::new([1], None);
        let next = FixedBag(whole(&g));
        let report = solve_simulation(&g, start, 0, &next, &KeepLast, &SimConfig::default()).unwrap();
        assert_eq!(report.winner, solve_zielonka(&g).winner(0));
        assert!(report.stats.max_rejects >= 1);
    }

    #[test]
    fn nonterminating_policies_are_reported() {
        // Rejecting at 1 always restarts outside the set {0}.
        let g = ParityGame::from_rows(&[(Odd, 0, &[1]), (Odd, 1, &[0])]).unwrap();
        let set = Bag::new([0], None);
        let next = FixedBag(set.clone());
        let repeat = solve_simulation(&g, set.clone(), 0, &next, &KeepLast, &SimConfig::default());
        assert!(matches!(repeat, Err(Error::Precondition(_))), "{repeat:?}");
        let config = SimConfig { max_depth: 200, ..SimConfig::default() };
        let growing = solve_simulation(&g, set, 0, &next, &crate::simgame::KeepAll, &config);
        assert!(matches!(growing, Err(Error::BudgetExceeded(200))), "{growing:?}");
    }

    #[test]
    fn budget_is_enforced() {
        let g = ParityGame::from_rows(&[(Even, 2, &[1]), (Odd, 1, &[0, 1])]).unwrap();
        let config = SimConfig { budget: 0, ..SimConfig::default() };
        let bag = whole(&g);
        let r = solve_simulation(&g, bag.clone(), 0, &FixedBag(bag), &KeepLast, &config);
        assert!(matches!(r, Err(Error::BudgetExceeded(0))));
    }

    #[test]
    fn round_free_pass_keeps_bounded_answers() {
        use crate::generate::random_game;
        use crate::simgame::{OddChoosesSets, OddTrimsHistory};
        for seed in 0..40 {
            let g = random_game(1 + (seed as usize % 4), 3, 2, seed);
            let next = OddChoosesSets::new(g.len(), 2);
            let hist = OddTrimsHistory { max: 3 };
            for bound in [3, 9] {
                let answers: Vec<Owner> = [0, u64::MAX]
                    .into_iter()
                    .map(|after| {
                        let config =
                            SimConfig { round_bound: Some(bound), round_free_after: after, ..SimConfig::default() };
                        solve_simulation(&g, Bag::new([0], None), 0, &next, &hist, &config).unwrap().winner
                    })
                    .collect();
                assert_eq!(answers[0], answers[1], "seed {seed} bound {bound}");
            }
        }
    }

    #[test]
    fn path_order_does_not_split_states() {
        let e = |from, p, to| PathEntry { from, priority: crate::game::Priority(p), to };
        let a = PathSummary::of(&[e(0, 1, 1), e(1, 2, 2), e(2, 0, 3)]);
        let b = PathSummary::of(&[e(1, 1, 0), e(0, 2, 2), e(2, 0, 3)]);
        assert!(a == b);
        let c = PathSummary::of(&[e(0, 2, 1), e(1, 1, 2), e(2, 0, 3)]);
        assert!(a != c);
    }
}
