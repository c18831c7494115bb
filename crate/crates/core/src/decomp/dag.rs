use super::treedec::{normalize_bag, width_of, DecompViolation, RootedTreeDecomposition};
use crate::error::{Error, Result};
use crate::game::{ParityGame, Vertex};

/// Bags over nodes `0..m` joined by directed edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagDecomposition {
    bags: Vec<Vec<Vertex>>,
    edges: Vec<(usize, usize)>,
    children: Vec<Vec<usize>>,
    /// `reach[i][k]` iff `i ⊑ k` (reflexive); `None` when the node graph has a cycle.
    reach: Option<Vec<Vec<bool>>>,
}

impl DagDecomposition {
    /// Stores the bags and edges. Only unknown node ids are rejected here;
    /// cycles are reported by [`validate_dag_decomposition`] and make the
    /// structural queries fail.
    pub fn new(bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Result<DagDecomposition> {
        let m = bags.len();
        let mut children = vec![Vec::new(); m];
        for &(a, b) in &edges {
            for x in [a, b] {
                if x >= m {
                    return Err(Error::UnknownNode(x));
                }
            }
            if !children[a].contains(&b) {
                children[a].push(b);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let reach = closure(&children);
        Ok(DagDecomposition {
            bags: bags.into_iter().map(normalize_bag).collect(),
            edges,
            children,
            reach,
        })
    }

    /// Orients a rooted tree decomposition's edges away from the root.
    pub fn from_rooted(rtd: &RootedTreeDecomposition) -> DagDecomposition {
        DagDecomposition::new(rtd.base().bags().to_vec(), rtd.directed_edges())
            .expect("tree nodes are valid")
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

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn is_acyclic(&self) -> bool {
        self.reach.is_some()
    }

    pub fn width(&self) -> Result<usize> {
        width_of(&self.bags)
    }

    fn reach(&self) -> Result<&Vec<Vec<bool>>> {
        self.reach
            .as_ref()
            .ok_or_else(|| Error::InvalidDecomposition("decomposition graph has a cycle".into()))
    }

    fn node(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(i))
        }
    }

    /// Nodes with no incoming edge, ascending.
    pub fn sources(&self) -> Vec<usize> {
        let mut has_parent = vec![false; self.len()];
        for &(_, b) in &self.edges {
            has_parent[b] = true;
        }
        (0..self.len()).filter(|&i| !has_parent[i]).collect()
    }

    /// Union of the bags of every node reachable from `i`, `i` included. Sorted.
    pub fn below(&self, i: usize) -> Result<Vec<Vertex>> {
        self.node(i)?;
        let reach = self.reach()?;
        let mut out: Vec<Vertex> = (0..self.len())
            .filter(|&k| reach[i][k])
            .flat_map(|k| self.bags[k].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Vertices in bags strictly below `i`, minus the bag of `i`. Sorted.
    pub fn guarded(&self, i: usize) -> Result<Vec<Vertex>> {
        self.node(i)?;
        let mut out = Vec::new();
        for &j in &self.children[i] {
            out.extend(self.below(j)?);
        }
        out.sort_unstable();
        out.dedup();
        out.retain(|v| self.bags[i].binary_search(v).is_err());
        Ok(out)
    }

    /// The lowest-id child `j` of `i` with `v` in its bag or guarded set.
    pub fn direction(&self, i: usize, v: Vertex) -> Result<usize> {
        if self.guarded(i)?.binary_search(&v).is_err() {
            return Err(Error::Precondition(format!("vertex {v} is not guarded by node {i}")));
        }
        for &j in &self.children[i] {
            if self.below(j)?.binary_search(&v).is_ok() {
                return Ok(j);
            }
        }
        Err(Error::Internal("guarded vertex below no child".into()))
    }
}

fn closure(children: &[Vec<usize>]) -> Option<Vec<Vec<bool>>> {
    let m = children.len();
    let mut indegree = vec![0usize; m];
    for cs in children {
        for &c in cs {
            indegree[c] += 1;
        }
    }
    let mut order: Vec<usize> = (0..m).filter(|&i| indegree[i] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &c in &children[x] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                order.push(c);
            }
        }
    }
    if order.len() != m {
        return None;
    }
    let mut reach = vec![vec![false; m]; m];
    for &x in order.iter().rev() {
        reach[x][x] = true;
        for &c in &children[x] {
            for k in 0..m {
                if reach[c][k] {
                    reach[x][k] = true;
                }
            }
        }
    }
    Some(reach)
}

/// Checks acyclicity, the cover condition, the guard condition of every DAG
/// edge (by scanning game edges) and the intersection condition.
pub fn validate_dag_decomposition(game: &ParityGame, dd: &DagDecomposition) -> Vec<DecompViolation> {
    let mut out = Vec::new();
    if dd.is_empty() {
        out.push(DecompViolation::NoNodes);
        return out;
    }
    let Some(reach) = dd.reach.as_ref() else {
        out.push(DecompViolation::BadShape("decomposition graph has a cycle".into()));
        return out;
    };
    let n = game.len();
    let mut covered = vec![false; n];
    for (i, bag) in dd.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(DecompViolation::UnknownVertex { node: i, vertex: v });
            } else {
                covered[v] = true;
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for v in game.vertices() {
        if !covered[v] {
            out.push(DecompViolation::Uncovered(v));
        }
    }
    let contains = |i: usize, v: Vertex| dd.bags[i].binary_search(&v).is_ok();
    for &(i, j) in &dd.edges {
        let below_j = dd.below(j).expect("acyclic");
        let mut in_u = vec![false; n];
        for &v in &below_j {
            if !contains(i, v) {
                in_u[v] = true;
            }
        }
        for v in game.vertices().filter(|&v| in_u[v]) {
            for &u in game.successors(v) {
                let guard = contains(i, u) && contains(j, u);
                if !in_u[u] && !guard {
                    out.push(DecompViolation::Escape { dag_edge: (i, j), from: v, to: u });
                }
            }
        }
    }
    let m = dd.len();
    for i in 0..m {
        for j in 0..m {
            if i == j || !reach[i][j] {
                continue;
            }
            for k in 0..m {
                if k == i || k == j || !reach[i][k] || !reach[k][j] {
                    continue;
                }
                if let Some(&v) = dd.bags[i].iter().find(|&&v| contains(j, v) && !contains(k, v)) {
                    out.push(DecompViolation::NotConvex { above: i, middle: k, below: j, vertex: v });
                }
            }
        }
    }
    out
}
