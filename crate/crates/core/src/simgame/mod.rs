//! The simulation game: play inside a vertex set `S`, with moves that leave
//! `S` replaced by strategy profiles that Odd accepts or rejects.
//!
//! The module is split into the rule layer (this file), the pluggable
//! set/history policies, an exhaustive AND-OR solver, an exploration driver
//! that collects every reachable outcome when one side is scripted, and a
//! driver that plays one game between agents.

mod agents;
mod explore;
mod policy;
mod safety;
mod search;

use std::fmt;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::game::{Owner, ParityGame, Priority, Vertex};
use crate::profiles::{exit_at_least, Exit, StrategyProfile};

pub use agents::{
    follow_even, follow_odd, play_simulation, EvenAgent, FollowEven, FollowOdd, GameOutcome,
    OddAgent, OddResponse, PolicyReferee, RandomEven, RandomOdd, Referee,
};
pub use explore::{explore_outcomes, OutcomeSet, ScriptedSide};
pub use policy::{FixedBag, HistPolicy, KeepAll, KeepLast, NextPolicy, OddChoosesSets, OddTrimsHistory};
pub use search::{solve_simulation, ProfileSearch, SearchStats, SimConfig, SolveReport};

/// A vertex set the game can be played on, optionally labelled with the
/// decomposition node it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bag {
    vertices: Vec<Vertex>,
    node: Option<usize>,
}

impl Bag {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, node: Option<usize>) -> Bag {
        let mut vertices: Vec<Vertex> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        Bag { vertices, node }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn node(&self) -> Option<usize> {
        self.node
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BagId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProfileId(pub u32);

impl fmt::Display for BagId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Interning tables for bags and profile entry vectors, so that states hash
/// and compare cheaply.
#[derive(Debug, Default)]
pub struct Arena {
    bags: Vec<Bag>,
    bag_ids: FxHashMap<Bag, BagId>,
    profiles: Vec<Vec<Exit>>,
    profile_ids: FxHashMap<Vec<Exit>, ProfileId>,
}

impl Arena {
    pub fn new() -> Arena {
        Arena::default()
    }

    pub fn intern_bag(&mut self, bag: Bag) -> BagId {
        if let Some(&id) = self.bag_ids.get(&bag) {
            return id;
        }
        let id = BagId(self.bags.len() as u32);
        self.bags.push(bag.clone());
        self.bag_ids.insert(bag, id);
        id
    }

    pub fn bag(&self, id: BagId) -> &Bag {
        &self.bags[id.0 as usize]
    }

    pub fn intern_profile(&mut self, entries: Vec<Exit>) -> ProfileId {
        if let Some(&id) = self.profile_ids.get(&entries) {
            return id;
        }
        let id = ProfileId(self.profiles.len() as u32);
        self.profiles.push(entries.clone());
        self.profile_ids.insert(entries, id);
        id
    }

    pub fn profile(&self, id: ProfileId) -> &[Exit] {
        &self.profiles[id.0 as usize]
    }

    /// A record's profile as a standalone value.
    pub fn profile_of(&self, record: &Record) -> StrategyProfile {
        StrategyProfile::new(
            self.bag(record.bag).vertices().to_vec(),
            self.profile(record.profile).to_vec(),
        )
        .expect("records hold one entry per bag vertex")
    }
}

/// `(F, p, P)`: the set a profile was rejected for, the largest priority seen
/// since (`None` until something is seen), and the rejected profile.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub bag: BagId,
    pub seen: Option<Priority>,
    pub profile: ProfileId,
}

pub type History = SmallVec<[Record; 4]>;

/// `(F, p, P)` updated with a newly seen priority; a missing `p` takes the new value.
pub fn update_record(record: Record, p: Priority) -> Record {
    Record { seen: Some(record.seen.map_or(p, |q| q.max(p))), ..record }
}

/// Every record of the history updated with `p`, order kept.
pub fn update_history(history: &[Record], p: Option<Priority>) -> History {
    match p {
        None => history.iter().copied().collect(),
        Some(p) => history.iter().map(|&r| update_record(r, p)).collect(),
    }
}

/// One step `(v, p, u)` of the simulated path: a real edge, or an accepted
/// profile entry.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathEntry {
    pub from: Vertex,
    pub priority: Priority,
    pub to: Vertex,
}

pub type SimPath = SmallVec<[PathEntry; 8]>;

/// The largest priority on the path, `None` for the empty path.
pub fn max_priority(path: &[PathEntry]) -> Option<Priority> {
    path.iter().map(|e| e.priority).max()
}

/// The winner of a path whose last entry returns to the source of an
/// earlier entry: the parity of the largest priority on that cycle.
pub fn winner_of_lasso(path: &[PathEntry]) -> Result<Owner> {
    let last = path.last().ok_or_else(|| Error::Precondition("empty path".into()))?;
    let start = path
        .iter()
        .position(|e| e.from == last.to)
        .ok_or_else(|| Error::Precondition("path does not end in a cycle".into()))?;
    Ok(max_priority(&path[start..]).expect("nonempty cycle").winner())
}

/// Step 5: if `c` lies in the set of some record, the final such record
/// decides the game.
pub fn adjudicate_step5(arena: &Arena, c: Vertex, history: &[Record], path: &[PathEntry]) -> Option<Owner> {
    let record = history.iter().rev().find(|r| arena.bag(r.bag).contains(c))?;
    let idx = arena.bag(record.bag).position(c).expect("found above");
    let claimed = arena.profile(record.profile)[idx];
    if claimed.is_none() {
        return Some(Owner::Odd);
    }
    let seen = match (max_priority(path), record.seen) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    Some(if exit_at_least(seen, claimed) { Owner::Even } else { Owner::Odd })
}

fn in_some_record(arena: &Arena, v: Vertex, history: &[Record]) -> bool {
    history.iter().any(|r| arena.bag(r.bag).contains(v))
}

/// Why a game ended.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    /// The simulated path closed a cycle.
    CycleStep6,
    /// The current vertex reached a set with a rejected profile.
    ReturnStep5,
    /// The round bound ran out; Even is declared the winner.
    RoundBoundExhausted,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::CycleStep6 => "cycle",
            Reason::ReturnStep5 => "return",
            Reason::RoundBoundExhausted => "round-bound",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub winner: Owner,
    pub reason: Reason,
}

/// Where in a round a state is.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Step 1: the owner of `c` picks an edge.
    Edge,
    /// Step 3: Even owes a profile for `pending` and the current set.
    /// `initial` marks the first round of a game started outside its set.
    Profile { pending: Vertex, initial: bool },
}

/// The live state of one simulation game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimState {
    pub bag: BagId,
    pub history: History,
    pub c: Vertex,
    pub path: SimPath,
    pub phase: Phase,
    /// 1-based index of the current round, counted across nested games.
    pub round: u32,
    /// Number of rejections so far.
    pub rejects: u32,
}

/// What happens after a move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Continue(SimState),
    End(Verdict),
}

/// A reject waiting for the history and set choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendingReject {
    pub from_bag: BagId,
    pub pending: Vertex,
    /// The history after updating and appending the rejected record.
    pub history: History,
    pub round: u32,
    pub rejects: u32,
}

/// Whether the priority of the vertex a rejection continues from is seen
/// by the records.
///
/// After a rejection at `v` the next game starts at `v`. If `v` lies in the
/// next set, play continues with a real edge out of `v` and `pri(v)` never
/// enters a path. Profiles measure walks that start at `v`, so a record
/// comparing its claim against priorities seen later misses `pri(v)`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum PendingPriority {
    /// Every record, including the new one, sees `pri(v)` on rejection.
    #[default]
    Counted,
    /// The new record starts with nothing seen and older records are
    /// updated with the path alone.
    Ignored,
}

/// The rules, shared by the solver, the explorer and the agent driver.
pub struct Rules<'g> {
    pub game: &'g ParityGame,
    pub round_bound: Option<u32>,
    /// Profile values Even may use, ascending in the significance order.
    pub priorities: Vec<Priority>,
    pub pending_priority: PendingPriority,
}

impl<'g> Rules<'g> {
    pub fn new(game: &'g ParityGame, round_bound: Option<u32>) -> Rules<'g> {
        let mut priorities = game.priority_set();
        priorities.sort_by(|a, b| a.cmp_significance(*b));
        Rules { game, round_bound, priorities, pending_priority: PendingPriority::default() }
    }

    pub fn with_pending_priority(mut self, rule: PendingPriority) -> Rules<'g> {
        self.pending_priority = rule;
        self
    }

    /// Starts a round, ending the game if the bound is used up.
    fn enter_round(&self, state: SimState) -> Step {
        match self.round_bound {
            Some(r) if state.round > r => Step::End(Verdict {
                winner: Owner::Even,
                reason: Reason::RoundBoundExhausted,
            }),
            _ => Step::Continue(state),
        }
    }

    /// Starts a game on `bag` at `s` with the given history. `round` is the
    /// index this game's first round gets.
    pub fn initialize(
        &self,
        arena: &Arena,
        bag: BagId,
        history: History,
        s: Vertex,
        round: u32,
        rejects: u32,
    ) -> Result<Step> {
        if s >= self.game.len() {
            return Err(Error::UnknownVertex(s));
        }
        let phase = if arena.bag(bag).contains(s) {
            Phase::Edge
        } else {
            Phase::Profile { pending: s, initial: true }
        };
        Ok(self.enter_round(SimState {
            bag,
            history,
            c: s,
            path: SimPath::new(),
            phase,
            round,
            rejects,
        }))
    }

    /// Step 1 and 2: the owner of `c` moves along `(c, v)`.
    pub fn choose_edge(&self, arena: &Arena, state: &SimState, v: Vertex) -> Result<Step> {
        if state.phase != Phase::Edge {
            return Err(Error::Internal("edge chosen outside step 1".into()));
        }
        if !self.game.has_edge(state.c, v) {
            let agent = if self.game.owner(state.c) == Owner::Even { "Even" } else { "Odd" };
            return Err(Error::IllegalMove {
                agent,
                message: format!("({}, {v}) is not an edge", state.c),
            });
        }
        if arena.bag(state.bag).contains(v) || in_some_record(arena, v, &state.history) {
            let entry = PathEntry { from: state.c, priority: self.game.priority(v), to: v };
            return Ok(self.after_move(arena, state, entry));
        }
        let mut next = state.clone();
        next.phase = Phase::Profile { pending: v, initial: false };
        Ok(Step::Continue(next))
    }

    fn pending(state: &SimState) -> Result<Vertex> {
        match state.phase {
            Phase::Profile { pending, .. } => Ok(pending),
            Phase::Edge => Err(Error::Internal("profile response outside step 4".into())),
        }
    }

    /// Step 4, accept: `u ∈ S` with `profile[u] ≠ -`.
    pub fn accept(&self, arena: &Arena, state: &SimState, profile: &[Exit], u: Vertex) -> Result<Step> {
        let v = Self::pending(state)?;
        let bag = arena.bag(state.bag);
        let claimed = bag.position(u).and_then(|i| profile[i]);
        let Some(q) = claimed else {
            return Err(Error::IllegalMove {
                agent: "Odd",
                message: format!("cannot accept {u}: not in the set or declared unreachable"),
            });
        };
        let entry = PathEntry { from: state.c, priority: self.game.priority(v).max(q), to: u };
        Ok(self.after_move(arena, state, entry))
    }

    /// Step 4, reject: update the history and append the rejected record.
    pub fn reject(&self, arena: &mut Arena, state: &SimState, profile: Vec<Exit>) -> Result<PendingReject> {
        let v = Self::pending(state)?;
        let start = match self.pending_priority {
            PendingPriority::Counted => Some(self.game.priority(v)),
            PendingPriority::Ignored => None,
        };
        let seen = max_priority(&state.path).max(start);
        let mut history = update_history(&state.history, seen);
        let profile = arena.intern_profile(profile);
        history.push(Record { bag: state.bag, seen: start, profile });
        Ok(PendingReject {
            from_bag: state.bag,
            pending: v,
            history,
            round: state.round,
            rejects: state.rejects + 1,
        })
    }

    /// Finishes a reject: keep the records at `kept` (increasing indices)
    /// and start the next game on `next`.
    pub fn resume(&self, arena: &Arena, pending: &PendingReject, kept: &[usize], next: BagId) -> Result<Step> {
        if kept.windows(2).any(|w| w[0] >= w[1]) || kept.last().is_some_and(|&i| i >= pending.history.len()) {
            return Err(Error::IllegalMove {
                agent: "history policy",
                message: format!("{kept:?} is not a subsequence of {} records", pending.history.len()),
            });
        }
        let history: History = kept.iter().map(|&i| pending.history[i]).collect();
        self.initialize(arena, next, history, pending.pending, pending.round + 1, pending.rejects)
    }

    /// Steps 5 and 6 after appending `entry`, then the next round.
    fn after_move(&self, arena: &Arena, state: &SimState, entry: PathEntry) -> Step {
        let mut path = state.path.clone();
        path.push(entry);
        let c = entry.to;
        if let Some(winner) = adjudicate_step5(arena, c, &state.history, &path) {
            return Step::End(Verdict { winner, reason: Reason::ReturnStep5 });
        }
        let bag = arena.bag(state.bag);
        let closes = path.iter().any(|e| e.from == c && bag.contains(e.from));
        if closes {
            let winner = winner_of_lasso(&path).expect("cycle detected");
            return Step::End(Verdict { winner, reason: Reason::CycleStep6 });
        }
        self.enter_round(SimState {
            bag: state.bag,
            history: state.history.clone(),
            c,
            path,
            phase: Phase::Edge,
            round: state.round + 1,
            rejects: state.rejects,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Owner::{Even, Odd};

    fn entry(from: Vertex, p: u32, to: Vertex) -> PathEntry {
        PathEntry { from, priority: Priority(p), to }
    }

    #[test]
    fn update_record_examples() {
        let r = Record { bag: BagId(0), seen: None, profile: ProfileId(0) };
        assert_eq!(update_record(r, Priority(5)).seen, Some(Priority(5)));
        let r7 = Record { seen: Some(Priority(7)), ..r };
        assert_eq!(update_record(r7, Priority(5)).seen, Some(Priority(7)));
        let r5 = Record { seen: Some(Priority(5)), ..r };
        assert_eq!(update_record(r5, Priority(7)).seen, Some(Priority(7)));
    }

    #[test]
    fn update_history_examples() {
        assert!(update_history(&[], Some(Priority(3))).is_empty());
        let r = Record { bag: BagId(0), seen: Some(Priority(9)), profile: ProfileId(0) };
        let s = Record { seen: None, ..r };
        let h = update_history(&[r, s], Some(Priority(4)));
        assert_eq!(h[0].seen, Some(Priority(9)));
        assert_eq!(h[1].seen, Some(Priority(4)));
        assert_eq!(update_history(&[r], Some(Priority(2))).as_slice(), &[r]);
    }

    #[test]
    fn lasso_winner_examples() {
        // Cycle through priorities 7, 4, 5, 10, 2.
        let path = [entry(0, 7, 1), entry(1, 4, 2), entry(2, 5, 3), entry(3, 10, 4), entry(4, 2, 0)];
        assert_eq!(winner_of_lasso(&path).unwrap(), Even);
        assert_eq!(winner_of_lasso(&[entry(0, 3, 0)]).unwrap(), Odd);
        assert_eq!(winner_of_lasso(&[entry(9, 99, 0), entry(0, 2, 0)]).unwrap(), Even);
        assert!(winner_of_lasso(&[entry(0, 2, 1)]).is_err());
    }

    fn arena_with_record(claim: Exit, seen: Option<u32>) -> (Arena, Record) {
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([3, 5], None));
        let profile = arena.intern_profile(vec![claim, Some(Priority(1))]);
        (arena, Record { bag, seen: seen.map(Priority), profile })
    }

    #[test]
    fn step5_examples() {
        let (arena, r) = arena_with_record(None, Some(4));
        assert_eq!(adjudicate_step5(&arena, 3, &[r], &[]), Some(Odd));
        assert_eq!(adjudicate_step5(&arena, 4, &[r], &[]), None);

        // Seen 8 against a claim of 14: Odd.
        let (arena, r) = arena_with_record(Some(Priority(14)), Some(8));
        assert_eq!(adjudicate_step5(&arena, 3, &[r], &[entry(1, 6, 3)]), Some(Odd));
        // Equal to the claim: Even.
        let (arena, r) = arena_with_record(Some(Priority(14)), None);
        assert_eq!(adjudicate_step5(&arena, 3, &[r], &[entry(1, 14, 3)]), Some(Even));
    }

    #[test]
    fn step5_uses_the_final_record() {
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([3], None));
        let lose = arena.intern_profile(vec![None]);
        let win = arena.intern_profile(vec![Some(Priority(0))]);
        let early = Record { bag, seen: Some(Priority(0)), profile: lose };
        let late = Record { bag, seen: Some(Priority(0)), profile: win };
        assert_eq!(adjudicate_step5(&arena, 3, &[early, late], &[]), Some(Even));
        assert_eq!(adjudicate_step5(&arena, 3, &[late, early], &[]), Some(Odd));
    }

    fn two_cycle() -> ParityGame {
        // 0 (Even, 2) <-> 1 (Odd, 5), 1 also loops on itself.
        ParityGame::from_rows(&[(Even, 2, &[1]), (Odd, 5, &[0, 1])]).unwrap()
    }

    #[test]
    fn initialize_phases() {
        let g = two_cycle();
        let rules = Rules::new(&g, None);
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([0], None));
        let Step::Continue(inside) = rules.initialize(&arena, bag, History::new(), 0, 1, 0).unwrap() else {
            panic!()
        };
        assert_eq!(inside.phase, Phase::Edge);
        let Step::Continue(outside) = rules.initialize(&arena, bag, History::new(), 1, 1, 0).unwrap() else {
            panic!()
        };
        assert_eq!(outside.phase, Phase::Profile { pending: 1, initial: true });
        let bounded = Rules::new(&g, Some(0));
        assert!(matches!(
            bounded.initialize(&arena, bag, History::new(), 0, 1, 0).unwrap(),
            Step::End(Verdict { winner: Even, reason: Reason::RoundBoundExhausted })
        ));
    }

    #[test]
    fn accept_appends_simulated_entry() {
        let g = two_cycle();
        let rules = Rules::new(&g, None);
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([0], None));
        let Step::Continue(s) = rules.initialize(&arena, bag, History::new(), 0, 1, 0).unwrap() else { panic!() };
        let Step::Continue(s) = rules.choose_edge(&arena, &s, 1).unwrap() else { panic!() };
        assert_eq!(s.phase, Phase::Profile { pending: 1, initial: false });
        // Odd accepts a claim of 10 for returning to 0: the entry carries max(5, 10).
        let step = rules.accept(&arena, &s, &[Some(Priority(10))], 0).unwrap();
        assert_eq!(step, Step::End(Verdict { winner: Even, reason: Reason::CycleStep6 }));
        assert!(rules.accept(&arena, &s, &[None], 0).is_err());
        assert!(rules.choose_edge(&arena, &s, 1).is_err());
    }

    #[test]
    fn reject_moves_to_a_new_game() {
        let g = two_cycle();
        let rules = Rules::new(&g, None);
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([0], None));
        let Step::Continue(s) = rules.initialize(&arena, bag, History::new(), 0, 1, 0).unwrap() else { panic!() };
        let Step::Continue(s) = rules.choose_edge(&arena, &s, 1).unwrap() else { panic!() };
        let pending = rules.reject(&mut arena, &s, vec![None]).unwrap();
        assert_eq!(pending.history.len(), 1);
        // The new game continues from the pending vertex 1, so its record has seen it.
        assert_eq!(pending.history[0].seen, Some(g.priority(1)));
        let other = arena.intern_bag(Bag::new([1], None));
        let Step::Continue(t) = rules.resume(&arena, &pending, &[0], other).unwrap() else { panic!() };
        assert_eq!(t.c, 1);
        assert!(t.path.is_empty());
        assert_eq!(t.phase, Phase::Edge);
        assert_eq!(t.round, 2);
        // Moving back to 0 returns into the rejected set, whose claim was `-`.
        let step = rules.choose_edge(&arena, &t, 0).unwrap();
        assert_eq!(step, Step::End(Verdict { winner: Odd, reason: Reason::ReturnStep5 }));
        assert!(rules.resume(&arena, &pending, &[1], other).is_err());
    }

    #[test]
    fn pending_priority_is_seen_by_the_rejected_record() {
        // 0 -> 1 -> 2 -> 1, all Even; the loop through 1 and 2 has top priority 2.
        let g = ParityGame::from_rows(&[(Even, 0, &[1]), (Even, 2, &[2]), (Even, 1, &[1])]).unwrap();
        for (rule, winner) in [(PendingPriority::Counted, Even), (PendingPriority::Ignored, Odd)] {
            let rules = Rules::new(&g, None).with_pending_priority(rule);
            let mut arena = Arena::new();
            let bag = arena.intern_bag(Bag::new([0, 2], None));
            let Step::Continue(s) = rules.initialize(&arena, bag, History::new(), 0, 1, 0).unwrap() else { panic!() };
            let Step::Continue(s) = rules.choose_edge(&arena, &s, 1).unwrap() else { panic!() };
            // The walk 1 -> 2 sees priority 2, as claimed.
            let pending = rules.reject(&mut arena, &s, vec![None, Some(Priority(2))]).unwrap();
            let next = arena.intern_bag(Bag::new([0, 1], None));
            let Step::Continue(t) = rules.resume(&arena, &pending, &[0], next).unwrap() else { panic!() };
            let step = rules.choose_edge(&arena, &t, 2).unwrap();
            assert_eq!(step, Step::End(Verdict { winner, reason: Reason::ReturnStep5 }), "{rule:?}");
        }
    }
}
