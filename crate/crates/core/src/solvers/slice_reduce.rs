//! A scripted Odd set choice over a tree decomposition that keeps the
//! bounded game short: Odd tracks the nodes play can still reach, and picks
//! balanced separators of them (slice) or, holding three records, the node
//! separating the three recorded bags (reduce).

use crate::decomp::{Tree, TreeDecomposition};
use crate::error::{Error, Result};
use crate::game::{ParityGame, Vertex};
use crate::simgame::{play_simulation, Arena, Bag, BagId, EvenAgent, GameOutcome, OddAgent, PendingReject, Record, Referee, SimConfig};

pub struct SliceReduceReferee<'a> {
    td: &'a TreeDecomposition,
    tree: Tree,
    /// Eligible nodes; `None` until the first rejection.
    eligible: Option<Vec<bool>>,
    /// Broken invariants, one line each.
    pub violations: Vec<String>,
    pub max_records: usize,
    pub max_set: usize,
}

impl<'a> SliceReduceReferee<'a> {
    pub fn new(td: &'a TreeDecomposition) -> Result<SliceReduceReferee<'a>> {
        Ok(SliceReduceReferee {
            td,
            tree: td.tree()?,
            eligible: None,
            violations: Vec::new(),
            max_records: 0,
            max_set: 0,
        })
    }

    pub fn eligible(&self) -> Option<Vec<usize>> {
        self.eligible
            .as_ref()
            .map(|l| (0..l.len()).filter(|&i| l[i]).collect())
    }

    fn record_node(arena: &Arena, record: &Record) -> Result<usize> {
        arena
            .bag(record.bag)
            .node()
            .ok_or_else(|| Error::Internal("record without a decomposition node".into()))
    }

    /// Every tree edge leaving the eligible set must end at a node holding a
    /// kept record.
    fn check_guards(&mut self, eligible: &[bool], record_nodes: &[usize]) {
        for a in (0..eligible.len()).filter(|&a| eligible[a]) {
            for &b in self.tree.neighbors(a) {
                if !eligible[b] && !record_nodes.contains(&b) {
                    self.violations
                        .push(format!("edge ({a}, {b}) leaves the eligible set without a record at {b}"));
                }
            }
        }
    }
}

impl Referee for SliceReduceReferee<'_> {
    fn hist(&mut self, arena: &Arena, pending: &PendingReject) -> Result<Vec<usize>> {
        let Some(eligible) = self.eligible.as_mut() else {
            self.eligible = Some(vec![true; self.td.len()]);
            return Ok(Vec::new());
        };
        let i = arena
            .bag(pending.from_bag)
            .node()
            .ok_or_else(|| Error::Internal("set without a decomposition node".into()))?;
        let mut side = vec![false; self.td.len()];
        for j in self.td.subtree(i, pending.pending)? {
            side[j] = true;
        }
        for (l, s) in eligible.iter_mut().zip(&side) {
            *l &= *s;
        }
        let eligible = eligible.clone();
        let mut kept = Vec::new();
        let mut nodes = Vec::new();
        for (index, record) in pending.history.iter().enumerate() {
            let j = Self::record_node(arena, record)?;
            if self.tree.neighbors(j).iter().any(|&x| eligible[x]) {
                kept.push(index);
                nodes.push(j);
            }
        }
        if kept.len() > 3 {
            self.violations.push(format!("{} records kept", kept.len()));
        }
        self.max_records = self.max_records.max(kept.len());
        if !eligible.contains(&true) {
            self.violations.push(format!("no eligible node after rejecting at {}", pending.pending));
        }
        self.check_guards(&eligible, &nodes);
        Ok(kept)
    }

    fn next(&mut self, arena: &Arena, _: BagId, _: Vertex, history: &[Record]) -> Result<Option<Bag>> {
        let eligible = self
            .eligible
            .as_ref()
            .ok_or_else(|| Error::Internal("next set asked before any rejection".into()))?;
        let count = eligible.iter().filter(|&&x| x).count();
        let node = if history.len() >= 3 {
            if history.len() > 3 {
                return Err(Error::Internal(format!("{} records at a reduce step", history.len())));
            }
            let n: Vec<usize> = history
                .iter()
                .map(|r| Self::record_node(arena, r))
                .collect::<Result<_>>()?;
            self.tree
                .point(n[0], n[1], n[2])
                .map_err(|e| Error::Internal(format!("reduce failed: {e}")))?
        } else if count >= 3 {
            self.tree.split_within(eligible)?
        } else {
            eligible
                .iter()
                .position(|&x| x)
                .ok_or_else(|| Error::Internal("no eligible node left".into()))?
        };
        self.max_set = self.max_set.max(self.td.bag(node).len());
        Ok(Some(Bag::new(self.td.bag(node).iter().copied(), Some(node))))
    }
}

/// One scripted run and what it showed.
#[derive(Clone, Debug)]
pub struct SliceReduceRun {
    pub outcome: GameOutcome,
    pub violations: Vec<String>,
    pub max_records: usize,
    /// Largest set Odd chose.
    pub max_set: usize,
}

/// Plays the unbounded simulation game from `{s}` with Odd's set and history
/// choices made by slice/reduce over `td`.
pub fn run_slice_reduce(
    game: &ParityGame,
    td: &TreeDecomposition,
    s: Vertex,
    even: &mut dyn EvenAgent,
    odd: &mut dyn OddAgent,
    max_moves: u64,
) -> Result<SliceReduceRun> {
    let mut referee = SliceReduceReferee::new(td)?;
    let outcome = play_simulation(game, Bag::new([s], None), s, even, odd, &mut referee, &SimConfig::default(), max_moves)?;
    Ok(SliceReduceRun {
        outcome,
        violations: referee.violations,
        max_records: referee.max_records,
        max_set: referee.max_set,
    })
}
