//! Agents that play one simulation game move by move, and the driver that
//! runs them.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::{SimConfig, Arena, Bag, BagId, HistPolicy, NextPolicy, PendingReject, Phase, Reason, Record, Rules, SimState, Step};
use crate::error::{Error, Result};
use crate::game::{Owner, ParityGame, Strategy, Vertex};
use crate::profiles::{exit_at_least, profile_of_strategy, refutes, Exit, StrategyProfile};

pub trait EvenAgent {
    /// Step 1 at an Even vertex.
    fn edge(&mut self, game: &ParityGame, arena: &Arena, state: &SimState) -> Result<Vertex>;
    /// Step 3: one entry per vertex of the current set, in sorted order.
    fn profile(&mut self, game: &ParityGame, arena: &Arena, state: &SimState, pending: Vertex) -> Result<Vec<Exit>>;
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OddResponse {
    Accept(Vertex),
    Reject,
}

pub trait OddAgent {
    /// Step 1 at an Odd vertex.
    fn edge(&mut self, game: &ParityGame, arena: &Arena, state: &SimState) -> Result<Vertex>;
    /// Step 4.
    fn respond(
        &mut self,
        game: &ParityGame,
        arena: &Arena,
        state: &SimState,
        pending: Vertex,
        profile: &[Exit],
    ) -> Result<OddResponse>;
}

/// Resolves the choices after a rejection.
pub trait Referee {
    /// Indices of the records to keep, strictly increasing.
    fn hist(&mut self, arena: &Arena, pending: &PendingReject) -> Result<Vec<usize>>;
    /// The next set, or `None` if the rejection cannot be continued.
    fn next(&mut self, arena: &Arena, current: BagId, v: Vertex, history: &[Record]) -> Result<Option<Bag>>;
}

/// A referee that takes the first candidate of each policy.
pub struct PolicyReferee<'a> {
    pub next: &'a dyn NextPolicy,
    pub hist: &'a dyn HistPolicy,
}

impl Referee for PolicyReferee<'_> {
    fn hist(&mut self, arena: &Arena, pending: &PendingReject) -> Result<Vec<usize>> {
        self.hist
            .hist(arena, &pending.history)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("history policy offered no choice".into()))
    }

    fn next(&mut self, arena: &Arena, current: BagId, v: Vertex, history: &[Record]) -> Result<Option<Bag>> {
        Ok(self.next.next(arena, current, v, history)?.into_iter().next())
    }
}

/// Plays a fixed Even strategy: its edges, and its own profiles.
pub struct FollowEven<'a> {
    sigma: &'a Strategy,
    cache: FxHashMap<(Vertex, BagId), Vec<Exit>>,
}

pub fn follow_even(sigma: &Strategy) -> FollowEven<'_> {
    FollowEven { sigma, cache: FxHashMap::default() }
}

impl FollowEven<'_> {
    pub fn strategy(&self) -> &Strategy {
        self.sigma
    }

    /// The profile of the strategy from `pending` to the set `bag`.
    pub fn profile_for(&mut self, game: &ParityGame, arena: &Arena, bag: BagId, pending: Vertex) -> Result<Vec<Exit>> {
        if let Some(p) = self.cache.get(&(pending, bag)) {
            return Ok(p.clone());
        }
        let p = profile_of_strategy(game, self.sigma, pending, arena.bag(bag).vertices())?;
        let entries = p.entries().to_vec();
        self.cache.insert((pending, bag), entries.clone());
        Ok(entries)
    }
}

fn strategy_edge(sigma: &Strategy, c: Vertex) -> Result<Vertex> {
    sigma
        .choice(c)
        .ok_or_else(|| Error::InvalidStrategy(format!("no choice at vertex {c}")))
}

impl EvenAgent for FollowEven<'_> {
    fn edge(&mut self, _: &ParityGame, _: &Arena, state: &SimState) -> Result<Vertex> {
        strategy_edge(self.sigma, state.c)
    }

    fn profile(&mut self, game: &ParityGame, arena: &Arena, state: &SimState, pending: Vertex) -> Result<Vec<Exit>> {
        self.profile_for(game, arena, state.bag, pending)
    }
}

/// Plays a fixed Odd strategy: its edges, rejecting exactly the profiles it
/// refutes and otherwise accepting the lowest vertex where its own value is
/// at least the claim. When no such vertex exists it rejects.
pub struct FollowOdd<'a> {
    tau: &'a Strategy,
    cache: FxHashMap<(Vertex, BagId), StrategyProfile>,
}

pub fn follow_odd(tau: &Strategy) -> FollowOdd<'_> {
    FollowOdd { tau, cache: FxHashMap::default() }
}

impl FollowOdd<'_> {
    pub fn strategy(&self) -> &Strategy {
        self.tau
    }

    pub fn response_for(
        &mut self,
        game: &ParityGame,
        arena: &Arena,
        bag: BagId,
        pending: Vertex,
        profile: &[Exit],
    ) -> Result<OddResponse> {
        let own = match self.cache.get(&(pending, bag)) {
            Some(p) => p.clone(),
            None => {
                let p = profile_of_strategy(game, self.tau, pending, arena.bag(bag).vertices())?;
                self.cache.insert((pending, bag), p.clone());
                p
            }
        };
        let declared = StrategyProfile::new(own.finals().to_vec(), profile.to_vec())?;
        if refutes(&own, &declared)? {
            return Ok(OddResponse::Reject);
        }
        let target = own
            .iter()
            .zip(profile)
            .find(|&((_, mine), &claim)| exit_at_least(mine, claim))
            .map(|((u, _), _)| u);
        Ok(target.map_or(OddResponse::Reject, OddResponse::Accept))
    }
}

impl OddAgent for FollowOdd<'_> {
    fn edge(&mut self, _: &ParityGame, _: &Arena, state: &SimState) -> Result<Vertex> {
        strategy_edge(self.tau, state.c)
    }

    fn respond(
        &mut self,
        game: &ParityGame,
        arena: &Arena,
        state: &SimState,
        pending: Vertex,
        profile: &[Exit],
    ) -> Result<OddResponse> {
        self.response_for(game, arena, state.bag, pending, profile)
    }
}

fn random_exit(rng: &mut ChaCha8Rng, game: &ParityGame) -> Exit {
    let values = game.priority_set();
    let i = rng.gen_range(0..=values.len());
    values.get(i).copied()
}

/// Uniformly random moves and profile entries.
pub struct RandomEven {
    rng: ChaCha8Rng,
}

impl RandomEven {
    pub fn new(seed: u64) -> RandomEven {
        RandomEven { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl EvenAgent for RandomEven {
    fn edge(&mut self, game: &ParityGame, _: &Arena, state: &SimState) -> Result<Vertex> {
        Ok(*game.successors(state.c).choose(&mut self.rng).expect("no dead ends"))
    }

    fn profile(&mut self, game: &ParityGame, arena: &Arena, state: &SimState, _: Vertex) -> Result<Vec<Exit>> {
        let size = arena.bag(state.bag).len();
        Ok((0..size).map(|_| random_exit(&mut self.rng, game)).collect())
    }
}

/// Uniformly random edges; accepts a random acceptable vertex or rejects.
pub struct RandomOdd {
    rng: ChaCha8Rng,
    reject: Option<f64>,
}

impl RandomOdd {
    pub fn new(seed: u64) -> RandomOdd {
        RandomOdd { rng: ChaCha8Rng::seed_from_u64(seed), reject: None }
    }

    /// Rejects with probability `p` whenever accepting is possible.
    pub fn rejecting(seed: u64, p: f64) -> RandomOdd {
        RandomOdd { rng: ChaCha8Rng::seed_from_u64(seed), reject: Some(p) }
    }
}

impl OddAgent for RandomOdd {
    fn edge(&mut self, game: &ParityGame, _: &Arena, state: &SimState) -> Result<Vertex> {
        Ok(*game.successors(state.c).choose(&mut self.rng).expect("no dead ends"))
    }

    fn respond(&mut self, _: &ParityGame, arena: &Arena, state: &SimState, _: Vertex, profile: &[Exit]) -> Result<OddResponse> {
        let mut options: Vec<OddResponse> = arena
            .bag(state.bag)
            .vertices()
            .iter()
            .zip(profile)
            .filter(|(_, e)| e.is_some())
            .map(|(&u, _)| OddResponse::Accept(u))
            .collect();
        if let Some(p) = self.reject {
            if options.is_empty() || self.rng.gen_bool(p) {
                return Ok(OddResponse::Reject);
            }
            return Ok(*options.choose(&mut self.rng).expect("nonempty"));
        }
        options.push(OddResponse::Reject);
        Ok(*options.choose(&mut self.rng).expect("nonempty"))
    }
}

/// The result of one played game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub winner: Owner,
    pub reason: Reason,
    /// One line per move, then a final `outcome` line.
    pub transcript: Vec<String>,
    pub rounds: u32,
    pub rejects: u32,
    pub max_history: usize,
}

fn show_profile(profile: &[Exit], bag: &Bag) -> String {
    let parts: Vec<String> = bag
        .vertices()
        .iter()
        .zip(profile)
        .map(|(u, e)| match e {
            Some(p) => format!("{u}:{p}"),
            None => format!("{u}:-"),
        })
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Plays the simulation game on `start` from `s` until it ends or
/// `max_moves` moves have been made. Only the round bound and rule variant
/// of `config` apply.
#[allow(clippy::too_many_arguments)]
pub fn play_simulation(
    game: &ParityGame,
    start: Bag,
    s: Vertex,
    even: &mut dyn EvenAgent,
    odd: &mut dyn OddAgent,
    referee: &mut dyn Referee,
    config: &SimConfig,
    max_moves: u64,
) -> Result<GameOutcome> {
    let rules = Rules::new(game, config.round_bound).with_pending_priority(config.pending_priority);
    let mut arena = Arena::new();
    let bag = arena.intern_bag(start);
    let mut transcript = Vec::new();
    let mut max_history = 0;
    let mut last_round = 1;
    let mut last_rejects = 0;
    let mut step = rules.initialize(&arena, bag, Default::default(), s, 1, 0)?;
    for n in 1..=max_moves {
        let state = match step {
            Step::End(verdict) => {
                transcript.push(format!("outcome winner={} reason={}", verdict.winner, verdict.reason));
                return Ok(GameOutcome {
                    winner: verdict.winner,
                    reason: verdict.reason,
                    transcript,
                    rounds: last_round,
                    rejects: last_rejects,
                    max_history,
                });
            }
            Step::Continue(state) => state,
        };
        max_history = max_history.max(state.history.len());
        last_round = state.round;
        last_rejects = state.rejects;
        let mut line = format!("step={n} S={} c={}", state.bag, state.c);
        step = match state.phase {
            Phase::Edge => {
                let v = match game.owner(state.c) {
                    Owner::Even => even.edge(game, &arena, &state)?,
                    Owner::Odd => odd.edge(game, &arena, &state)?,
                };
                write!(line, " move=edge to={v}").unwrap();
                transcript.push(line);
                rules.choose_edge(&arena, &state, v)?
            }
            Phase::Profile { pending, .. } => {
                let profile = even.profile(game, &arena, &state, pending)?;
                if profile.len() != arena.bag(state.bag).len() {
                    return Err(Error::IllegalMove {
                        agent: "Even",
                        message: "profile does not cover the set".into(),
                    });
                }
                write!(line, " move=profile v={pending} P={}", show_profile(&profile, arena.bag(state.bag))).unwrap();
                transcript.push(line);
                let response = odd.respond(game, &arena, &state, pending, &profile)?;
                let mut line = format!("step={n} S={} c={}", state.bag, state.c);
                match response {
                    OddResponse::Accept(u) => {
                        write!(line, " move=accept u={u}").unwrap();
                        transcript.push(line);
                        rules.accept(&arena, &state, &profile, u)?
                    }
                    OddResponse::Reject => {
                        let pending = rules.reject(&mut arena, &state, profile)?;
                        let kept = referee.hist(&arena, &pending)?;
                        let trimmed: Vec<Record> = kept.iter().filter_map(|&i| pending.history.get(i).copied()).collect();
                        let next = referee.next(&arena, state.bag, pending.pending, &trimmed)?.ok_or_else(|| {
                            Error::IllegalMove { agent: "Odd", message: "rejected where no next set exists".into() }
                        })?;
                        let next = arena.intern_bag(next);
                        write!(line, " move=reject kept={kept:?} next={next}").unwrap();
                        transcript.push(line);
                        rules.resume(&arena, &pending, &kept, next)?
                    }
                }
            }
        };
    }
    Err(Error::BudgetExceeded(max_moves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Owner::{Even, Odd};
    use crate::game::Priority;
    use crate::simgame::{FixedBag, KeepLast};

    #[test]
    fn follow_odd_rejects_all_dashes_and_accepts_honest_profiles() {
        // 0 (Odd) -> 1 (priority 4) -> 2; the set is {2}.
        let g = ParityGame::from_rows(&[(Odd, 1, &[1]), (Even, 4, &[2]), (Even, 2, &[2])]).unwrap();
        let tau = Strategy::first_successor(&g, Odd);
        let mut arena = Arena::new();
        let bag = arena.intern_bag(Bag::new([2], None));
        let mut odd = follow_odd(&tau);
        assert_eq!(odd.response_for(&g, &arena, bag, 0, &[None]).unwrap(), OddResponse::Reject);
        assert_eq!(odd.response_for(&g, &arena, bag, 0, &[Some(Priority(4))]).unwrap(), OddResponse::Accept(2));
        // A claim Odd can beat is refuted.
        assert_eq!(odd.response_for(&g, &arena, bag, 0, &[Some(Priority(6))]).unwrap(), OddResponse::Reject);
    }

    #[test]
    fn transcript_shape() {
        let g = ParityGame::from_rows(&[(Even, 2, &[1]), (Odd, 1, &[0])]).unwrap();
        let sigma = Strategy::first_successor(&g, Even);
        let tau = Strategy::first_successor(&g, Odd);
        let bag = Bag::new([0, 1], None);
        let next = FixedBag(bag.clone());
        let mut referee = PolicyReferee { next: &next, hist: &KeepLast };
        let out = play_simulation(&g, bag, 0, &mut follow_even(&sigma), &mut follow_odd(&tau), &mut referee, &SimConfig::default(), 100).unwrap();
        assert_eq!(out.winner, Even);
        assert_eq!(out.reason, Reason::CycleStep6);
        assert_eq!(out.transcript[0], "step=1 S=0 c=0 move=edge to=1");
        assert_eq!(out.transcript.last().unwrap(), "outcome winner=Even reason=cycle");
    }

    #[test]
    fn random_agents_finish_under_a_round_bound() {
        let g = ParityGame::from_rows(&[(Even, 2, &[1, 2]), (Odd, 1, &[0, 2]), (Odd, 3, &[1])]).unwrap();
        let next = FixedBag(Bag::new([0], None));
        for seed in 0..20 {
            let mut referee = PolicyReferee { next: &next, hist: &KeepLast };
            let out = play_simulation(
                &g,
                Bag::new([0], None),
                0,
                &mut RandomEven::new(seed),
                &mut RandomOdd::new(seed + 100),
                &mut referee,
                &SimConfig { round_bound: Some(6), ..SimConfig::default() },
                1000,
            )
            .unwrap();
            assert!(out.rounds <= 7);
        }
    }
}
