//! Collects every outcome reachable when one player follows a fixed
//! strategy and the other player, and every policy choice, range freely.

use rustc_hash::FxHashSet;

use super::agents::{follow_even, follow_odd, FollowEven, FollowOdd, OddResponse};
use super::search::Key;
use super::{SimConfig, Arena, Bag, HistPolicy, History, NextPolicy, Phase, Reason, Rules, Step};
use crate::error::{Error, Result};
use crate::game::{Owner, ParityGame, Strategy, Vertex};
use crate::profiles::Exit;

/// Which player is scripted, and by which strategy.
#[derive(Copy, Clone, Debug)]
pub enum ScriptedSide<'a> {
    Even(&'a Strategy),
    Odd(&'a Strategy),
}

/// A set of (winner, reason) pairs.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeSet(u8);

const REASONS: [Reason; 3] = [Reason::CycleStep6, Reason::ReturnStep5, Reason::RoundBoundExhausted];

impl OutcomeSet {
    fn bit(winner: Owner, reason: Reason) -> u8 {
        let r = REASONS.iter().position(|&x| x == reason).expect("known reason");
        1 << (winner.index() as usize * 3 + r)
    }

    pub fn insert(&mut self, winner: Owner, reason: Reason) {
        self.0 |= Self::bit(winner, reason);
    }

    pub fn contains(&self, winner: Owner, reason: Reason) -> bool {
        self.0 & Self::bit(winner, reason) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Whether any outcome has this winner.
    pub fn has_winner(&self, winner: Owner) -> bool {
        REASONS.iter().any(|&r| self.contains(winner, r))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Owner, Reason)> + '_ {
        [Owner::Even, Owner::Odd]
            .into_iter()
            .flat_map(|w| REASONS.iter().map(move |&r| (w, r)))
            .filter(|&(w, r)| self.contains(w, r))
    }
}

enum Script<'a> {
    Even(FollowEven<'a>),
    Odd(FollowOdd<'a>),
}

/// Explores the game graph from `s` on `start`. States are visited once, so
/// plays that never end contribute nothing. Uses the round bound, budget
/// (on visited states) and rule variant of `config`.
#[allow(clippy::too_many_arguments)]
pub fn explore_outcomes(
    game: &ParityGame,
    start: Bag,
    s: Vertex,
    next: &dyn NextPolicy,
    hist: &dyn HistPolicy,
    side: ScriptedSide<'_>,
    config: &SimConfig,
) -> Result<OutcomeSet> {
    let round_bound = config.round_bound;
    let budget = config.budget;
    let rules = Rules::new(game, round_bound).with_pending_priority(config.pending_priority);
    let mut arena = Arena::new();
    let mut script = match side {
        ScriptedSide::Even(sigma) => Script::Even(follow_even(sigma)),
        ScriptedSide::Odd(tau) => Script::Odd(follow_odd(tau)),
    };
    let bag = arena.intern_bag(start);
    let mut outcomes = OutcomeSet::default();
    let mut seen: FxHashSet<(Key, Option<u32>)> = FxHashSet::default();
    let mut stack = vec![rules.initialize(&arena, bag, History::new(), s, 1, 0)?];
    let values: Vec<Exit> = rules.priorities.iter().map(|&p| Some(p)).collect();
    while let Some(step) = stack.pop() {
        let state = match step {
            Step::End(v) => {
                outcomes.insert(v.winner, v.reason);
                continue;
            }
            Step::Continue(state) => state,
        };
        if !seen.insert((Key::of(&state), round_bound.map(|_| state.round))) {
            continue;
        }
        if seen.len() as u64 > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        if state.path.len() > arena.bag(state.bag).len() + 1 {
            return Err(Error::Internal("simulated path longer than the set allows".into()));
        }
        let before = stack.len();
        match state.phase {
            Phase::Edge => {
                let scripted = match (&script, game.owner(state.c)) {
                    (Script::Even(f), Owner::Even) => Some(f.sigma_choice(state.c)?),
                    (Script::Odd(f), Owner::Odd) => Some(f.tau_choice(state.c)?),
                    _ => None,
                };
                match scripted {
                    Some(v) => stack.push(rules.choose_edge(&arena, &state, v)?),
                    None => {
                        for &v in game.successors(state.c) {
                            stack.push(rules.choose_edge(&arena, &state, v)?);
                        }
                    }
                }
            }
            Phase::Profile { pending, .. } => {
                let size = arena.bag(state.bag).len();
                let profiles: Vec<Vec<Exit>> = match &mut script {
                    Script::Even(f) => vec![f.profile_for(game, &arena, state.bag, pending)?],
                    Script::Odd(_) => all_profiles(&values, size),
                };
                for profile in profiles {
                    let responses: Vec<OddResponse> = match &mut script {
                        Script::Odd(f) => vec![f.response_for(game, &arena, state.bag, pending, &profile)?],
                        Script::Even(_) => {
                            let mut all: Vec<OddResponse> = arena
                                .bag(state.bag)
                                .vertices()
                                .iter()
                                .zip(&profile)
                                .filter(|(_, e)| e.is_some())
                                .map(|(&u, _)| OddResponse::Accept(u))
                                .collect();
                            all.push(OddResponse::Reject);
                            all
                        }
                    };
                    for response in responses {
                        match response {
                            OddResponse::Accept(u) => stack.push(rules.accept(&arena, &state, &profile, u)?),
                            OddResponse::Reject => {
                                let pending = rules.reject(&mut arena, &state, profile.clone())?;
                                for kept in hist.hist(&arena, &pending.history)? {
                                    let trimmed: History = kept.iter().map(|&i| pending.history[i]).collect();
                                    for set in next.next(&arena, state.bag, pending.pending, &trimmed)? {
                                        let id = arena.intern_bag(set);
                                        stack.push(rules.resume(&arena, &pending, &kept, id)?);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if stack.len() == before {
            return Err(Error::Internal(format!("no legal move from c = {} in round {}", state.c, state.round)));
        }
    }
    Ok(outcomes)
}

/// Every assignment of a value or `-` to `size` vertices.
pub(crate) fn all_profiles(values: &[Exit], size: usize) -> Vec<Vec<Exit>> {
    let mut out = vec![Vec::with_capacity(size)];
    for _ in 0..size {
        let mut grown = Vec::with_capacity(out.len() * (values.len() + 1));
        for prefix in &out {
            for &e in values.iter().chain([&None]) {
                let mut p: Vec<Exit> = prefix.clone();
                p.push(e);
                grown.push(p);
            }
        }
        out = grown;
    }
    out
}

impl FollowEven<'_> {
    fn sigma_choice(&self, c: Vertex) -> Result<Vertex> {
        self.strategy()
            .choice(c)
            .ok_or_else(|| Error::InvalidStrategy(format!("no choice at vertex {c}")))
    }
}

impl FollowOdd<'_> {
    fn tau_choice(&self, c: Vertex) -> Result<Vertex> {
        self.strategy()
            .choice(c)
            .ok_or_else(|| Error::InvalidStrategy(format!("no choice at vertex {c}")))
    }
}
