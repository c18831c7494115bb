//! Strategy profiles: for a fixed strategy, a start vertex `s` and a set of
//! final vertices `F`, the best priority each `u ∈ F` can be reached with.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::game::{restrict, Owner, ParityGame, Priority, Strategy, Vertex};

/// One profile entry; `None` is the unreachable marker, written `-`.
pub type Exit = Option<Priority>;

/// A map from each final vertex to a priority or `-`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    finals: Vec<Vertex>,
    entries: Vec<Exit>,
}

impl StrategyProfile {
    /// `finals` must be sorted and duplicate-free and as long as `entries`.
    pub fn new(finals: Vec<Vertex>, entries: Vec<Exit>) -> Result<StrategyProfile> {
        if finals.len() != entries.len() {
            return Err(Error::Precondition("profile needs one entry per final vertex".into()));
        }
        if finals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("final vertices must be sorted and distinct".into()));
        }
        Ok(StrategyProfile { finals, entries })
    }

    pub fn unreachable(finals: Vec<Vertex>) -> StrategyProfile {
        let entries = vec![None; finals.len()];
        StrategyProfile { finals, entries }
    }

    pub fn finals(&self) -> &[Vertex] {
        &self.finals
    }

    pub fn entries(&self) -> &[Exit] {
        &self.entries
    }

    /// The entry of `u`, or `None` if `u` is not a final vertex.
    pub fn get(&self, u: Vertex) -> Option<Exit> {
        self.finals.binary_search(&u).ok().map(|i| self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Exit)> + '_ {
        self.finals.iter().copied().zip(self.entries.iter().copied())
    }

    pub fn all_unreachable(&self) -> bool {
        self.entries.iter().all(Option::is_none)
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (u, e)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match e {
                Some(p) => write!(f, "{u}: {p}")?,
                None => write!(f, "{u}: -")?,
            }
        }
        write!(f, "}}")
    }
}

fn check_query(graph: &ParityGame, s: Vertex, finals: &[Vertex]) -> Result<()> {
    if s >= graph.len() {
        return Err(Error::UnknownVertex(s));
    }
    if let Some(&bad) = finals.iter().find(|&&u| u >= graph.len()) {
        return Err(Error::UnknownVertex(bad));
    }
    if finals.contains(&s) {
        return Err(Error::Precondition(format!("start vertex {s} is a final vertex")));
    }
    Ok(())
}

/// The maxima of all walks from `s` to `u` in `graph` whose vertices before
/// `u` avoid `finals`.
///
/// `p` is achievable iff some `w` with priority `p` is reachable from `s`
/// and reaches `u`, using only vertices of priority at most `p`.
pub fn achievable_maxima(
    graph: &ParityGame,
    s: Vertex,
    finals: &[Vertex],
    u: Vertex,
) -> Result<BTreeSet<Priority>> {
    check_query(graph, s, finals)?;
    if !finals.contains(&u) {
        return Err(Error::Precondition(format!("vertex {u} is not a final vertex")));
    }
    let n = graph.len();
    let mut is_final = vec![false; n];
    for &f in finals {
        is_final[f] = true;
    }
    let preds = graph.predecessors();
    let mut out = BTreeSet::new();
    for p in graph.priority_set() {
        if graph.priority(s) > p || graph.priority(u) > p {
            continue;
        }
        let allowed = |x: Vertex| !is_final[x] && graph.priority(x) <= p;
        let mut forward = vec![false; n];
        forward[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in graph.successors(x) {
                if !forward[y] && allowed(y) {
                    forward[y] = true;
                    stack.push(y);
                }
            }
        }
        let mut backward = vec![false; n];
        let mut stack: Vec<Vertex> = Vec::new();
        for &x in &preds[u] {
            if allowed(x) && !backward[x] {
                backward[x] = true;
                stack.push(x);
            }
        }
        while let Some(x) = stack.pop() {
            for &y in &preds[x] {
                if !backward[y] && allowed(y) {
                    backward[y] = true;
                    stack.push(y);
                }
            }
        }
        if !backward[s] {
            continue;
        }
        let witnessed = graph.priority(u) == p
            || (0..n).any(|w| forward[w] && backward[w] && graph.priority(w) == p);
        if witnessed {
            out.insert(p);
        }
    }
    Ok(out)
}

/// Walk maxima by exploring (vertex, maximum so far) states for up to
/// `max_len` edges. Used to certify [`achievable_maxima`].
pub fn oracle_enumerate_walks(
    graph: &ParityGame,
    s: Vertex,
    finals: &[Vertex],
    u: Vertex,
    max_len: usize,
) -> BTreeSet<Priority> {
    let mut out = BTreeSet::new();
    let mut frontier: BTreeSet<(Vertex, Priority)> = BTreeSet::from([(s, graph.priority(s))]);
    let mut seen = frontier.clone();
    for _ in 0..max_len {
        let mut next = BTreeSet::new();
        for &(x, m) in &frontier {
            if finals.contains(&x) {
                continue;
            }
            for &y in graph.successors(x) {
                let m2 = m.max(graph.priority(y));
                if y == u {
                    out.insert(m2);
                }
                if seen.insert((y, m2)) {
                    next.insert((y, m2));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Picks the entry a strategy of `owner` guarantees: Even's worst case for
/// Odd is the ⪯-smallest maximum, Odd's is the ⪯-largest.
pub fn best_exit(owner: Owner, maxima: &BTreeSet<Priority>) -> Exit {
    let cmp = |a: &&Priority, b: &&Priority| a.cmp_significance(**b);
    match owner {
        Owner::Even => maxima.iter().min_by(cmp).copied(),
        Owner::Odd => maxima.iter().max_by(cmp).copied(),
    }
}

/// The profile of `strategy` from `s` with final set `finals` (any order).
pub fn profile_of_strategy(
    game: &ParityGame,
    strategy: &Strategy,
    s: Vertex,
    finals: &[Vertex],
) -> Result<StrategyProfile> {
    let finals: Vec<Vertex> = finals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    check_query(game, s, &finals)?;
    let restricted = restrict(game, strategy)?;
    let entries = finals
        .iter()
        .map(|&u| Ok(best_exit(strategy.owner(), &achievable_maxima(&restricted, s, &finals, u)?)))
        .collect::<Result<Vec<_>>>()?;
    StrategyProfile::new(finals, entries)
}

/// `a ≺ b` on entries, defined only when both are priorities.
pub fn exit_less(a: Exit, b: Exit) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x.cmp_significance(y) == Ordering::Less)
}

/// `a ⪰ b` on entries, defined only when both are priorities.
pub fn exit_at_least(a: Exit, b: Exit) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x.cmp_significance(y) != Ordering::Less)
}

/// Whether Odd's profile `tau` shows the declared profile `declared` to be
/// false: either every declared entry is `-`, or at every final vertex Odd
/// can reach it where Even claimed `-`, or Odd's value is ⪯-below the claim.
/// A comparison involving `-` on either side does not count as `≺`.
pub fn refutes(tau: &StrategyProfile, declared: &StrategyProfile) -> Result<bool> {
    if tau.finals != declared.finals {
        return Err(Error::Precondition("profiles are over different final sets".into()));
    }
    if declared.all_unreachable() {
        return Ok(true);
    }
    Ok(tau
        .entries
        .iter()
        .zip(&declared.entries)
        .all(|(&t, &p)| (t.is_some() && p.is_none()) || exit_less(t, p)))
}
