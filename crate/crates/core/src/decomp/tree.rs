//! Plain undirected trees over nodes `0..n` and the separator queries used by
//! the bounded-round solver.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
}

impl Tree {
    /// Builds a tree, rejecting self-loops, repeated edges, cycles and
    /// disconnected node sets.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Tree> {
        let bad = |m: String| Error::InvalidDecomposition(m);
        if n == 0 {
            return Err(bad("a tree needs at least one node".into()));
        }
        if edges.len() != n - 1 {
            return Err(bad(format!("{n} nodes need {} edges, got {}", n - 1, edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::UnknownNode(a));
            }
            if b >= n {
                return Err(Error::UnknownNode(b));
            }
            if a == b || adj[a].contains(&b) {
                return Err(bad(format!("edge ({a}, {b}) is a loop or repeated")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let tree = Tree { adj };
        if tree.reach(0, None, None).iter().filter(|&&r| r).count() != n {
            return Err(bad("tree is not connected".into()));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for &b in &self.adj[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(i))
        }
    }

    /// Nodes reachable from `start` inside `within` (all nodes when `None`)
    /// without passing through `removed`.
    fn reach(&self, start: usize, removed: Option<usize>, within: Option<&[bool]>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let allowed = |x: usize| Some(x) != removed && within.is_none_or(|w| w[x]);
        if !allowed(start) {
            return seen;
        }
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !seen[y] && allowed(y) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// The components left after deleting `removed` from the subtree induced
    /// by `within` (the whole tree when `None`). Each component is sorted.
    pub fn components_without(&self, removed: usize, within: Option<&[bool]>) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.len()];
        assigned[removed] = true;
        let mut out = Vec::new();
        for start in 0..self.len() {
            if assigned[start] || !within.is_none_or(|w| w[start]) {
                continue;
            }
            let comp = self.reach(start, Some(removed), within);
            let nodes: Vec<usize> = (0..self.len()).filter(|&x| comp[x]).collect();
            for &x in &nodes {
                assigned[x] = true;
            }
            out.push(nodes);
        }
        out
    }

    /// The unique path from `a` to `b`, both ends included.
    pub fn path(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        self.check(a)?;
        self.check(b)?;
        let parent = self.bfs_parents(a);
        let mut path = vec![b];
        let mut x = b;
        while x != a {
            x = parent[x].expect("trees are connected");
            path.push(x);
        }
        path.reverse();
        Ok(path)
    }

    fn bfs_parents(&self, root: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        parent
    }

    /// A node whose removal leaves components of at most two thirds of the
    /// nodes (a centroid, which in fact leaves at most half).
    pub fn split_vertex(&self) -> Result<usize> {
        if self.len() < 3 {
            return Err(Error::Precondition(format!(
                "splitting needs at least 3 nodes, tree has {}",
                self.len()
            )));
        }
        let all = vec![true; self.len()];
        self.split_within(&all)
    }

    /// As [`Tree::split_vertex`] on the subtree induced by `within`, which must
    /// be connected and nonempty. The smallest qualifying node id is returned.
    pub fn split_within(&self, within: &[bool]) -> Result<usize> {
        let members: Vec<usize> = (0..self.len()).filter(|&x| within[x]).collect();
        let Some(&first) = members.first() else {
            return Err(Error::Precondition("cannot split an empty node set".into()));
        };
        let size = members.len();
        if self.reach(first, None, Some(within)).iter().filter(|&&r| r).count() != size {
            return Err(Error::Precondition("node set to split is not connected".into()));
        }
        // Subtree sizes from a traversal rooted at `first`.
        let mut order = Vec::with_capacity(size);
        let mut parent = vec![usize::MAX; self.len()];
        let mut stack = vec![first];
        parent[first] = first;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &self.adj[x] {
                if within[y] && parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut below = vec![1usize; self.len()];
        for &x in order.iter().rev() {
            if x != first {
                below[parent[x]] += below[x];
            }
        }
        for &x in &members {
            let mut largest = size - below[x];
            for &y in &self.adj[x] {
                if within[y] && parent[y] == x && y != first {
                    largest = largest.max(below[y]);
                }
            }
            if 2 * largest <= size {
                return Ok(x);
            }
        }
        Err(Error::Internal("no centroid found in a tree".into()))
    }

    /// The node whose removal pairwise disconnects three distinct nodes that
    /// do not lie on one path.
    pub fn point(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        if i == j || j == k || i == k {
            return Err(Error::Precondition("point needs three distinct nodes".into()));
        }
        let ij = self.path(i, j)?;
        let jk = self.path(j, k)?;
        let ik = self.path(i, k)?;
        let median = ij
            .iter()
            .copied()
            .find(|x| jk.contains(x) && ik.contains(x))
            .expect("three tree paths always share their median");
        if median == i || median == j || median == k {
            return Err(Error::Precondition(format!(
                "nodes {i}, {j}, {k} lie on a single path"
            )));
        }
        Ok(median)
    }
}
