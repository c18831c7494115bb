use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::tree::Tree;
use crate::error::{Error, Result};
use crate::game::{ParityGame, Vertex};

/// A problem found while validating a tree or DAG decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompViolation {
    NoNodes,
    /// The node graph is not a tree (or, for DAG decompositions, has a cycle).
    BadShape(String),
    UnknownVertex { node: usize, vertex: Vertex },
    /// Condition 1: some vertex is in no bag.
    Uncovered(Vertex),
    /// Condition 2 of the tree definition: no bag holds both ends of an edge.
    EdgeNotCovered { from: Vertex, to: Vertex },
    /// Condition 3 of the tree definition: the bags holding `vertex` are not connected.
    Disconnected { vertex: Vertex, between: (usize, usize), missing_at: usize },
    /// The guard condition of a DAG edge fails for a game edge.
    Escape { dag_edge: (usize, usize), from: Vertex, to: Vertex },
    /// Intersection condition of the DAG definition.
    NotConvex { above: usize, middle: usize, below: usize, vertex: Vertex },
}

impl fmt::Display for DecompViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DecompViolation::*;
        match self {
            NoNodes => write!(f, "decomposition has no nodes"),
            BadShape(m) => write!(f, "{m}"),
            UnknownVertex { node, vertex } => write!(f, "bag {node} names unknown vertex {vertex}"),
            Uncovered(v) => write!(f, "vertex {v} is in no bag"),
            EdgeNotCovered { from, to } => write!(f, "no bag contains edge ({from}, {to})"),
            Disconnected { vertex, between, missing_at } => write!(
                f,
                "vertex {vertex} is in bags {} and {} but not in bag {missing_at} between them",
                between.0, between.1
            ),
            Escape { dag_edge, from, to } => write!(
                f,
                "edge ({from}, {to}) escapes the guard of dag edge ({}, {})",
                dag_edge.0, dag_edge.1
            ),
            NotConvex { above, middle, below, vertex } => write!(
                f,
                "vertex {vertex} is in bags {above} and {below} but not in bag {middle} between them"
            ),
        }
    }
}

/// Bags over nodes `0..m` joined by undirected tree edges. Bags are kept
/// sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Vertex>>,
    edges: Vec<(usize, usize)>,
}

pub(crate) fn normalize_bag(bag: Vec<Vertex>) -> Vec<Vertex> {
    let set: BTreeSet<Vertex> = bag.into_iter().collect();
    set.into_iter().collect()
}

impl TreeDecomposition {
    /// Stores the bags and edges without checking them against a game; see
    /// [`validate_tree_decomposition`]. Fails only if the node graph is not a tree.
    pub fn new(bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Result<TreeDecomposition> {
        let td = TreeDecomposition {
            bags: bags.into_iter().map(normalize_bag).collect(),
            edges,
        };
        td.tree()?;
        Ok(td)
    }

    /// One bag holding every vertex.
    pub fn trivial(game: &ParityGame) -> TreeDecomposition {
        TreeDecomposition { bags: vec![game.vertices().collect()], edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn bag(&self, i: usize) -> &[Vertex] {
        &self.bags[i]
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tree(&self) -> Result<Tree> {
        Tree::new(self.bags.len(), &self.edges)
    }

    /// Largest bag size. This counts vertices, so a tree-shaped graph has width 2.
    pub fn width(&self) -> Result<usize> {
        width_of(&self.bags)
    }

    fn node(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(i))
        }
    }

    /// The neighbour of `i` on the path towards the closest node whose bag holds `v`.
    pub fn direction(&self, i: usize, v: Vertex) -> Result<usize> {
        self.node(i)?;
        if self.bags[i].binary_search(&v).is_ok() {
            return Err(Error::Precondition(format!("vertex {v} is already in bag {i}")));
        }
        let tree = self.tree()?;
        let mut first_step = vec![usize::MAX; self.len()];
        first_step[i] = i;
        let mut queue = VecDeque::new();
        for &j in tree.neighbors(i) {
            first_step[j] = j;
            queue.push_back(j);
        }
        while let Some(x) = queue.pop_front() {
            if self.bags[x].binary_search(&v).is_ok() {
                return Ok(first_step[x]);
            }
            for &y in tree.neighbors(x) {
                if first_step[y] == usize::MAX {
                    first_step[y] = first_step[x];
                    queue.push_back(y);
                }
            }
        }
        Err(Error::Precondition(format!("vertex {v} is in no bag")))
    }

    /// Nodes of the component of the tree minus `i` that contains
    /// `direction(i, v)`, sorted.
    pub fn subtree(&self, i: usize, v: Vertex) -> Result<Vec<usize>> {
        let j = self.direction(i, v)?;
        let tree = self.tree()?;
        Ok(tree
            .components_without(i, None)
            .into_iter()
            .find(|c| c.contains(&j))
            .expect("direction is a neighbour of i"))
    }

    /// Orients the tree away from `root`.
    pub fn root_at(&self, root: usize) -> Result<RootedTreeDecomposition> {
        self.node(root)?;
        let tree = self.tree()?;
        let n = self.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0usize; n];
        let mut order = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &y in tree.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    children[x].push(y);
                    depth[y] = depth[x] + 1;
                    order.push(y);
                }
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let max_vertex = self.bags.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut first = vec![None; max_vertex];
        // Breadth-first order visits shallower nodes first.
        for &x in &order {
            for &v in &self.bags[x] {
                if first[v].is_none() {
                    first[v] = Some(x);
                }
            }
        }
        Ok(RootedTreeDecomposition {
            td: self.clone(),
            root,
            parent,
            children,
            depth,
            first,
        })
    }

    /// Lowest-id node whose bag holds `v`.
    pub fn node_containing(&self, v: Vertex) -> Option<usize> {
        (0..self.len()).find(|&i| self.bags[i].binary_search(&v).is_ok())
    }

    /// Repeatedly merges a bag into a neighbouring bag that contains it and
    /// renumbers the remaining nodes in their original order. Afterwards no
    /// bag is a subset of a neighbour, which bounds the node count by the
    /// vertex count.
    pub fn normalized(&self) -> TreeDecomposition {
        let n = self.len();
        let mut alive = vec![true; n];
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let subset = |a: &[Vertex], b: &[Vertex]| a.iter().all(|x| b.binary_search(x).is_ok());
        loop {
            let mut merge = None;
            'search: for i in 0..n {
                if !alive[i] {
                    continue;
                }
                for &j in &adj[i] {
                    if subset(&self.bags[i], &self.bags[j]) {
                        merge = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((gone, keep)) = merge else { break };
            alive[gone] = false;
            let neighbours: Vec<usize> = adj[gone].iter().copied().collect();
            for x in neighbours {
                adj[x].remove(&gone);
                if x != keep {
                    adj[x].insert(keep);
                    adj[keep].insert(x);
                }
            }
            adj[gone].clear();
        }
        let mut index = vec![usize::MAX; n];
        let mut bags = Vec::new();
        for i in 0..n {
            if alive[i] {
                index[i] = bags.len();
                bags.push(self.bags[i].clone());
            }
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for &j in &adj[i] {
                if i < j {
                    edges.push((index[i], index[j]));
                }
            }
        }
        edges.sort_unstable();
        TreeDecomposition { bags, edges }
    }
}

pub(crate) fn width_of(bags: &[Vec<Vertex>]) -> Result<usize> {
    bags.iter()
        .map(Vec::len)
        .max()
        .ok_or_else(|| Error::InvalidDecomposition("decomposition has no nodes".into()))
}

/// Checks the three conditions of a tree decomposition.
pub fn validate_tree_decomposition(game: &ParityGame, td: &TreeDecomposition) -> Vec<DecompViolation> {
    let mut out = Vec::new();
    if td.is_empty() {
        out.push(DecompViolation::NoNodes);
        return out;
    }
    let tree = match td.tree() {
        Ok(t) => t,
        Err(e) => {
            out.push(DecompViolation::BadShape(e.to_string()));
            return out;
        }
    };
    let n = game.len();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(DecompViolation::UnknownVertex { node: i, vertex: v });
            } else {
                holders[v].push(i);
            }
        }
    }
    for v in game.vertices() {
        if holders[v].is_empty() {
            out.push(DecompViolation::Uncovered(v));
        }
    }
    for v in game.vertices() {
        for &u in game.successors(v) {
            let covered = holders[v].iter().any(|&i| td.bag(i).binary_search(&u).is_ok());
            if !covered && !holders[v].is_empty() && !holders[u].is_empty() {
                out.push(DecompViolation::EdgeNotCovered { from: v, to: u });
            }
        }
    }
    for v in game.vertices() {
        let hs = &holders[v];
        if hs.len() < 2 {
            continue;
        }
        let within: Vec<bool> = (0..td.len()).map(|i| td.bag(i).binary_search(&v).is_ok()).collect();
        // The holders are connected iff every tree path between two of them stays inside.
        let anchor = hs[0];
        for &other in &hs[1..] {
            let path = tree.path(anchor, other).expect("nodes exist");
            if let Some(&gap) = path.iter().find(|&&x| !within[x]) {
                out.push(DecompViolation::Disconnected {
                    vertex: v,
                    between: (anchor, other),
                    missing_at: gap,
                });
                break;
            }
        }
    }
    out
}

/// A tree decomposition oriented away from a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreeDecomposition {
    td: TreeDecomposition,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    first: Vec<Option<usize>>,
}

impl RootedTreeDecomposition {
    pub fn base(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// The node closest to the root whose bag holds `v`.
    pub fn first(&self, v: Vertex) -> Result<usize> {
        self.first
            .get(v)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Precondition(format!("vertex {v} is in no bag")))
    }

    /// Directed edges parent → child.
    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, cs) in self.children.iter().enumerate() {
            for &c in cs {
                out.push((i, c));
            }
        }
        out
    }

    /// Number of directed paths `a → b → c` in the oriented tree.
    pub fn count_two_edge_paths(&self) -> usize {
        (0..self.td.len())
            .filter(|&b| self.parent[b].is_some())
            .map(|b| self.children[b].len())
            .sum()
    }
}
