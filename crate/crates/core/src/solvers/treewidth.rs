use rustc_hash::FxHashMap;

use crate::decomp::{validate_tree_decomposition, RootedTreeDecomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::game::{ParityGame, Vertex};
use crate::simgame::{solve_simulation, Arena, Bag, BagId, KeepLast, NextPolicy, Record, SimConfig, SolveReport};

/// A game extended with one copy `v_i` of each vertex `v` per bag `i` that
/// holds `v` below its topmost bag. Original vertices keep their ids; copies
/// follow.
#[derive(Clone, Debug)]
pub struct ModifiedGame {
    pub game: ParityGame,
    /// For each copy, the original vertex and its node.
    pub origin: Vec<Option<(Vertex, usize)>>,
    pub reverse: FxHashMap<(Vertex, usize), Vertex>,
    pub rooted: RootedTreeDecomposition,
}

impl ModifiedGame {
    pub fn original_len(&self) -> usize {
        self.origin.iter().take_while(|o| o.is_none()).count()
    }
}

/// Builds the modified game for a rooted tree decomposition. Copies from
/// which no original vertex can be reached would be dead ends and are left
/// out; every original edge is still simulated by a path of copies.
pub fn modify_game(game: &ParityGame, rtd: &RootedTreeDecomposition) -> Result<ModifiedGame> {
    let td = rtd.base();
    let violations = validate_tree_decomposition(game, td);
    if !violations.is_empty() {
        return Err(super::invalid(&violations));
    }
    let n = game.len();
    let mut first = Vec::with_capacity(n);
    for v in game.vertices() {
        first.push(rtd.first(v)?);
    }
    // Candidate copies, in node order then vertex order.
    let mut copies: Vec<(Vertex, usize)> = Vec::new();
    for i in 0..td.len() {
        for &v in td.bag(i) {
            if first[v] != i {
                copies.push((v, i));
            }
        }
    }
    let index: FxHashMap<(Vertex, usize), usize> = copies.iter().enumerate().map(|(k, &c)| (c, n + k)).collect();
    let total = n + copies.len();
    let mut succ: Vec<Vec<Vertex>> = vec![Vec::new(); total];
    let in_bag = |i: usize, u: Vertex| td.bag(i).binary_search(&u).is_ok();
    for (k, &(v, i)) in copies.iter().enumerate() {
        let id = n + k;
        for &j in rtd.children(i) {
            if let Some(&c) = index.get(&(v, j)) {
                succ[id].push(c);
            }
        }
        for &u in game.successors(v) {
            if in_bag(i, u) {
                succ[id].push(u);
            }
        }
    }
    for v in game.vertices() {
        let f = first[v];
        for &u in game.successors(v) {
            if in_bag(f, u) {
                succ[v].push(u);
            }
        }
        for &j in rtd.children(f) {
            if let Some(&c) = index.get(&(v, j)) {
                succ[v].push(c);
            }
        }
    }
    // Keep copies that can reach an original vertex.
    let mut alive = vec![false; total];
    alive[..n].fill(true);
    let mut changed = true;
    while changed {
        changed = false;
        for x in (n..total).rev() {
            if !alive[x] && succ[x].iter().any(|&y| alive[y]) {
                alive[x] = true;
                changed = true;
            }
        }
    }
    let mut renumber = vec![usize::MAX; total];
    let mut next_id = 0;
    for x in 0..total {
        if alive[x] {
            renumber[x] = next_id;
            next_id += 1;
        }
    }
    let mut owners = Vec::with_capacity(next_id);
    let mut priorities = Vec::with_capacity(next_id);
    let mut successors = Vec::with_capacity(next_id);
    let mut origin = Vec::with_capacity(next_id);
    let mut reverse = FxHashMap::default();
    for x in (0..total).filter(|&x| alive[x]) {
        let base = if x < n { x } else { copies[x - n].0 };
        owners.push(game.owner(base));
        priorities.push(game.priority(base));
        let mut out: Vec<Vertex> = succ[x].iter().filter(|&&y| alive[y]).map(|&y| renumber[y]).collect();
        out.sort_unstable();
        out.dedup();
        successors.push(out);
        if x < n {
            origin.push(None);
        } else {
            origin.push(Some(copies[x - n]));
            reverse.insert(copies[x - n], renumber[x]);
        }
    }
    let mut modified = ParityGame::new(owners, priorities, successors)?;
    for x in 0..n {
        modified.set_name(x, game.name(x).map(str::to_owned));
    }
    for (x, o) in origin.iter().enumerate() {
        if let &Some((v, i)) = o {
            let label = game.name(v).map_or_else(|| v.to_string(), str::to_owned);
            modified.set_name(x, Some(format!("{label}@{i}")));
        }
    }
    Ok(ModifiedGame { game: modified, origin, reverse, rooted: rtd.clone() })
}

/// After a rejection at the copy `u_j`, continue on the bag of `j` plus `u_j`.
pub struct TreewidthNext<'a> {
    modified: &'a ModifiedGame,
}

impl<'a> TreewidthNext<'a> {
    pub fn new(modified: &'a ModifiedGame) -> TreewidthNext<'a> {
        TreewidthNext { modified }
    }
}

impl NextPolicy for TreewidthNext<'_> {
    fn next(&self, _: &Arena, _: BagId, v: Vertex, _: &[Record]) -> Result<Vec<Bag>> {
        let (_, j) = self.modified.origin[v]
            .ok_or_else(|| Error::Internal(format!("rejection at original vertex {v}")))?;
        let bag = self.modified.rooted.base().bag(j);
        Ok(vec![Bag::new(bag.iter().copied().chain([v]), Some(j))])
    }
}

/// Decides the winner of `s` by rooting `td` at the lowest-id bag holding
/// `s` and playing the simulation game on the modified game.
pub fn solve_treewidth(game: &ParityGame, td: &TreeDecomposition, s: Vertex, config: &SimConfig) -> Result<SolveReport> {
    if s >= game.len() {
        return Err(Error::UnknownVertex(s));
    }
    let violations = validate_tree_decomposition(game, td);
    if !violations.is_empty() {
        return Err(super::invalid(&violations));
    }
    let root = td.node_containing(s).ok_or(Error::UnknownVertex(s))?;
    let modified = modify_game(game, &td.root_at(root)?)?;
    let start = Bag::new(td.bag(root).iter().copied(), Some(root));
    let next = TreewidthNext::new(&modified);
    let report = solve_simulation(&modified.game, start, s, &next, &KeepLast, config)?;
    if report.stats.max_history > 1 {
        return Err(Error::Internal("more than one record kept".into()));
    }
    Ok(report)
}
