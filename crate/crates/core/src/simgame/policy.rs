//! The two functions a simulation game is parameterized by. A policy that
//! returns several candidates hands the choice to Odd.

use super::{Arena, Bag, BagId, Record};
use crate::error::{Error, Result};
use crate::game::Vertex;

/// Chooses the set for the game that follows a rejection.
pub trait NextPolicy: Sync {
    /// Candidate sets after a rejection at `v` while playing on `current`,
    /// given the already trimmed history. An empty list means no rejection
    /// is possible.
    fn next(&self, arena: &Arena, current: BagId, v: Vertex, history: &[Record]) -> Result<Vec<Bag>>;
}

/// Chooses which records survive a rejection.
pub trait HistPolicy: Sync {
    /// Candidate lists of kept record indices, each strictly increasing.
    /// Must not be empty.
    fn hist(&self, arena: &Arena, history: &[Record]) -> Result<Vec<Vec<usize>>>;
}

/// Always plays on the same set.
#[derive(Clone, Debug)]
pub struct FixedBag(pub Bag);

impl NextPolicy for FixedBag {
    fn next(&self, _: &Arena, _: BagId, _: Vertex, _: &[Record]) -> Result<Vec<Bag>> {
        Ok(vec![self.0.clone()])
    }
}

/// Keeps only the newest record.
#[derive(Copy, Clone, Debug, Default)]
pub struct KeepLast;

impl HistPolicy for KeepLast {
    fn hist(&self, _: &Arena, history: &[Record]) -> Result<Vec<Vec<usize>>> {
        Ok(vec![history.len().checked_sub(1).into_iter().collect()])
    }
}

/// Keeps every record.
#[derive(Copy, Clone, Debug, Default)]
pub struct KeepAll;

impl HistPolicy for KeepAll {
    fn hist(&self, _: &Arena, history: &[Record]) -> Result<Vec<Vec<usize>>> {
        Ok(vec![(0..history.len()).collect()])
    }
}

/// Odd picks any set of at most `k` vertices containing the rejected vertex.
#[derive(Clone, Debug)]
pub struct OddChoosesSets {
    pub vertices: usize,
    pub k: usize,
    /// Refuse to enumerate more candidates than this.
    pub limit: usize,
}

impl OddChoosesSets {
    pub fn new(vertices: usize, k: usize) -> OddChoosesSets {
        OddChoosesSets { vertices, k, limit: 100_000 }
    }
}

impl NextPolicy for OddChoosesSets {
    fn next(&self, _: &Arena, _: BagId, v: Vertex, _: &[Record]) -> Result<Vec<Bag>> {
        if self.k == 0 {
            return Ok(Vec::new());
        }
        let others: Vec<Vertex> = (0..self.vertices).filter(|&u| u != v).collect();
        let mut out = Vec::new();
        // Larger sets first: they end games sooner, which speeds up search.
        for size in (0..self.k.min(self.vertices)).rev() {
            let mut chosen = Vec::with_capacity(size);
            subsets(&others, size, 0, &mut chosen, &mut |set| {
                out.push(Bag::new(set.iter().copied().chain([v]), None));
            });
            if out.len() > self.limit {
                return Err(Error::TooLarge(out.len() as u128));
            }
        }
        Ok(out)
    }
}

fn subsets(items: &[Vertex], size: usize, from: usize, chosen: &mut Vec<Vertex>, emit: &mut dyn FnMut(&[Vertex])) {
    if chosen.len() == size {
        emit(chosen);
        return;
    }
    for i in from..items.len() {
        if items.len() - i < size - chosen.len() {
            break;
        }
        chosen.push(items[i]);
        subsets(items, size, i + 1, chosen, emit);
        chosen.pop();
    }
}

/// Odd deletes any records it likes, and must leave at most `max`.
#[derive(Copy, Clone, Debug)]
pub struct OddTrimsHistory {
    pub max: usize,
}

impl HistPolicy for OddTrimsHistory {
    fn hist(&self, _: &Arena, history: &[Record]) -> Result<Vec<Vec<usize>>> {
        let n = history.len();
        let idx: Vec<usize> = (0..n).collect();
        let mut out = Vec::new();
        for size in (0..=self.max.min(n)).rev() {
            let mut chosen = Vec::with_capacity(size);
            subsets(&idx, size, 0, &mut chosen, &mut |set| out.push(set.to_vec()));
        }
        Ok(out)
    }
}
