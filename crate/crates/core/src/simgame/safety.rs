//! States from which Odd cannot force a win in any number of rounds.
//!
//! With a round bound, the search revisits the same state at many different
//! numbers of remaining rounds. Where Odd has no way to win at all, every one
//! of those visits is an Even win, so the bounded search can skip them.
//!
//! This pass searches the round-free game, where a play that never ends is
//! not a win for Odd. It is a depth-first search that treats states still
//! being evaluated as safe for Even and tracks strongly connected components
//! as in Tarjan's algorithm: a win for Odd is final as soon as it is found,
//! while a safe verdict only becomes final once its component is complete
//! and none of the component turned out to be a win for Odd. Verdicts left
//! provisional are dropped and recomputed on demand.

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use super::search::Key;
use super::{Arena, HistPolicy, History, NextPolicy, Phase, Rules, SimState, Step};
use crate::error::Result;
use crate::game::Owner;
use crate::profiles::Exit;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Status {
    Unknown,
    /// On the component stack with this depth-first index.
    Open(u32),
    Safe,
    OddWins,
}

/// Odd-win and safe verdicts of the round-free game.
pub(crate) struct SafeStates {
    keys: IndexSet<Key, FxBuildHasher>,
    status: Vec<Status>,
}

impl SafeStates {
    pub(crate) fn empty() -> SafeStates {
        SafeStates { keys: IndexSet::default(), status: Vec::new() }
    }

    pub(crate) fn contains(&self, key: &Key) -> bool {
        self.keys.get_index_of(key).is_some_and(|i| self.status[i] == Status::Safe)
    }

    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }
}

/// The search needed more evaluations or depth than allowed.
struct OverCap;

/// Safe for Even, and the lowest depth-first index the answer depends on.
type Verdict = std::result::Result<(bool, u32), OverCap>;

const FREE: u32 = u32::MAX;

pub(crate) struct Safety<'a, 'g> {
    rules: &'a Rules<'g>,
    next: &'a dyn NextPolicy,
    hist: &'a dyn HistPolicy,
    keys: IndexSet<Key, FxBuildHasher>,
    status: Vec<Status>,
    stack: Vec<u32>,
    counter: u32,
    cap: u32,
    depth: u32,
    max_depth: u32,
}

/// Unwraps a verdict, passing `OverCap` up.
macro_rules! verdict {
    ($e:expr) => {
        match $e? {
            Ok(v) => v,
            Err(OverCap) => return Ok(Err(OverCap)),
        }
    };
}

impl<'a, 'g> Safety<'a, 'g> {
    /// `rules` must have no round bound. `cap` bounds the number of state
    /// evaluations.
    pub(crate) fn new(
        rules: &'a Rules<'g>,
        next: &'a dyn NextPolicy,
        hist: &'a dyn HistPolicy,
        cap: u64,
        max_depth: u32,
    ) -> Self {
        debug_assert!(rules.round_bound.is_none());
        Safety {
            rules,
            next,
            hist,
            keys: IndexSet::default(),
            status: Vec::new(),
            stack: Vec::new(),
            counter: 0,
            cap: cap.min(u32::MAX as u64 - 1) as u32,
            depth: 0,
            max_depth,
        }
    }

    /// Whether `start` is safe for Even in the round-free game, with the
    /// verdicts found on the way; `None` if the search gave up.
    pub(crate) fn run(mut self, arena: &mut Arena, start: Step) -> Result<Option<(bool, SafeStates)>> {
        match self.step(arena, start)? {
            Ok((safe, _)) => Ok(Some((safe, SafeStates { keys: self.keys, status: self.status }))),
            Err(OverCap) => Ok(None),
        }
    }

    fn step(&mut self, arena: &mut Arena, step: Step) -> Result<Verdict> {
        match step {
            Step::End(v) => Ok(Ok((v.winner == Owner::Even, FREE))),
            Step::Continue(state) => self.state(arena, state),
        }
    }

    fn state(&mut self, arena: &mut Arena, state: SimState) -> Result<Verdict> {
        let (id, fresh) = self.keys.insert_full(Key::of(&state));
        if fresh {
            self.status.push(Status::Unknown);
        }
        match self.status[id] {
            Status::Safe => return Ok(Ok((true, FREE))),
            Status::OddWins => return Ok(Ok((false, FREE))),
            Status::Open(index) => return Ok(Ok((true, index))),
            Status::Unknown => {}
        }
        loop {
            if self.counter >= self.cap || self.depth >= self.max_depth {
                return Ok(Err(OverCap));
            }
            let index = self.counter;
            self.counter += 1;
            self.status[id] = Status::Open(index);
            self.stack.push(id as u32);
            self.depth += 1;
            let verdict = match state.phase {
                Phase::Edge => self.edge(arena, &state),
                Phase::Profile { .. } => self.profile(arena, &state),
            };
            self.depth -= 1;
            let (safe, low) = verdict!(verdict);
            if !safe {
                self.status[id] = Status::OddWins;
            }
            if low < index {
                return Ok(Ok((safe, low)));
            }
            // `id` roots a complete component.
            let position = self.stack.iter().rposition(|&x| x as usize == id).expect("on the stack");
            let members = self.stack.split_off(position);
            let clean = members.iter().all(|&m| self.status[m as usize] != Status::OddWins);
            for m in members {
                let m = m as usize;
                if self.status[m] != Status::OddWins {
                    self.status[m] = if clean { Status::Safe } else { Status::Unknown };
                }
            }
            // A safe verdict that leaned on a state since found to be an Odd
            // win is redone; every retry has strictly more Odd wins to go on.
            if clean || !safe {
                return Ok(Ok((safe, FREE)));
            }
        }
    }

    fn edge(&mut self, arena: &mut Arena, state: &SimState) -> Result<Verdict> {
        let game = self.rules.game;
        let mover = game.owner(state.c);
        let mut low = FREE;
        for &v in game.successors(state.c) {
            let step = self.rules.choose_edge(arena, state, v)?;
            let (safe, l) = verdict!(self.step(arena, step));
            match mover {
                Owner::Odd if !safe => return Ok(Ok((false, FREE))),
                Owner::Even if safe => return Ok(Ok((true, l))),
                _ => low = low.min(l),
            }
        }
        Ok(Ok((mover == Owner::Odd, low)))
    }

    /// Even's least ambitious claim per vertex that accepting cannot beat,
    /// then every rejection of that profile.
    fn profile(&mut self, arena: &mut Arena, state: &SimState) -> Result<Verdict> {
        let bag = arena.bag(state.bag).clone();
        let mut low = FREE;
        let mut profile: Vec<Exit> = vec![None; bag.len()];
        for (i, &u) in bag.vertices().iter().enumerate() {
            for &q in &self.rules.priorities {
                let mut single = vec![None; bag.len()];
                single[i] = Some(q);
                let step = self.rules.accept(arena, state, &single, u)?;
                let (safe, l) = verdict!(self.step(arena, step));
                if safe {
                    low = low.min(l);
                    profile[i] = Some(q);
                    break;
                }
            }
        }
        let pending = self.rules.reject(arena, state, profile)?;
        for kept in self.hist.hist(arena, &pending.history)? {
            let trimmed: History = kept.iter().filter_map(|&i| pending.history.get(i).copied()).collect();
            for set in self.next.next(arena, state.bag, pending.pending, &trimmed)? {
                let bag = arena.intern_bag(set);
                let step = self.rules.resume(arena, &pending, &kept, bag)?;
                let (safe, l) = verdict!(self.step(arena, step));
                if !safe {
                    return Ok(Ok((false, FREE)));
                }
                low = low.min(l);
            }
        }
        Ok(Ok((true, low)))
    }
}
