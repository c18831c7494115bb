//! Seeded random instances: bounded-width games with the decomposition they
//! were built from, unstructured games, trees and complete-graph games.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{Tree, TreeDecomposition};
use crate::game::{Owner, ParityGame, Priority, Vertex};

/// How a vertex left without successors gets one.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Repair {
    /// An edge to another vertex of the bag the vertex was introduced in.
    #[default]
    InBag,
    SelfLoop,
}

#[derive(Clone, Debug)]
pub struct KTreeParams {
    pub n: usize,
    /// Bags have at most `k + 1` vertices.
    pub k: usize,
    /// Priorities are drawn from `0..d`.
    pub d: u32,
    /// Probability of keeping each undirected edge of the k-tree.
    pub keep: f64,
    pub repair: Repair,
}

impl KTreeParams {
    pub fn new(n: usize, k: usize, d: u32) -> KTreeParams {
        KTreeParams { n, k, d, keep: 0.7, repair: Repair::InBag }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize, d: u32) -> (Vec<Owner>, Vec<Priority>) {
    let d = d.max(1);
    let owners = (0..n).map(|_| if rng.gen_bool(0.5) { Owner::Even } else { Owner::Odd }).collect();
    let priorities = (0..n).map(|_| Priority(rng.gen_range(0..d))).collect();
    (owners, priorities)
}

/// A random game whose underlying graph is a subgraph of a random k-tree,
/// together with the k-tree's decomposition. Deterministic per seed.
pub fn partial_ktree(params: &KTreeParams, seed: u64) -> (ParityGame, TreeDecomposition) {
    assert!(params.n >= 1 && params.k >= 1, "need n >= 1 and k >= 1");
    let mut rng = rng(seed);
    let n = params.n;
    let base = (params.k + 1).min(n);
    let mut bags: Vec<Vec<Vertex>> = vec![(0..base).collect()];
    let mut tree_edges = Vec::new();
    let mut home = vec![0usize; n];
    let mut undirected: Vec<(Vertex, Vertex)> = Vec::new();
    for a in 0..base {
        for b in a + 1..base {
            undirected.push((a, b));
        }
    }
    for v in base..n {
        let parent = rng.gen_range(0..bags.len());
        let mut clique = bags[parent].clone();
        if clique.len() == params.k + 1 {
            clique.remove(rng.gen_range(0..clique.len()));
        }
        for &u in &clique {
            undirected.push((u, v));
        }
        clique.push(v);
        clique.sort_unstable();
        home[v] = bags.len();
        tree_edges.push((parent, bags.len()));
        bags.push(clique);
    }
    let mut successors: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for (a, b) in undirected {
        if !rng.gen_bool(params.keep) {
            continue;
        }
        match rng.gen_range(0..3) {
            0 => successors[a].push(b),
            1 => successors[b].push(a),
            _ => {
                successors[a].push(b);
                successors[b].push(a);
            }
        }
    }
    for v in 0..n {
        if !successors[v].is_empty() {
            continue;
        }
        let others: Vec<Vertex> = bags[home[v]].iter().copied().filter(|&u| u != v).collect();
        let target = match params.repair {
            Repair::InBag => others.choose(&mut rng).copied().unwrap_or(v),
            Repair::SelfLoop => v,
        };
        successors[v].push(target);
    }
    for s in &mut successors {
        s.sort_unstable();
    }
    let (owners, priorities) = random_labels(&mut rng, n, params.d);
    let game = ParityGame::new(owners, priorities, successors).expect("every vertex has a successor");
    let td = TreeDecomposition::new(bags, tree_edges).expect("generated bags form a tree");
    (game, td)
}

/// A random game where every vertex gets between one and `max_out`
/// distinct successors, self-loops allowed.
pub fn random_game(n: usize, d: u32, max_out: usize, seed: u64) -> ParityGame {
    assert!(n >= 1 && max_out >= 1);
    let mut rng = rng(seed);
    let all: Vec<Vertex> = (0..n).collect();
    let successors = (0..n)
        .map(|_| {
            let count = rng.gen_range(1..=max_out.min(n));
            let mut s: Vec<Vertex> = all.choose_multiple(&mut rng, count).copied().collect();
            s.sort_unstable();
            s
        })
        .collect();
    let (owners, priorities) = random_labels(&mut rng, n, d);
    ParityGame::new(owners, priorities, successors).expect("every vertex has a successor")
}

/// A uniformly random labelled tree on `n` nodes, built from a Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Tree {
    assert!(n >= 1);
    if n == 1 {
        return Tree::new(1, &[]).expect("single node");
    }
    if n == 2 {
        return Tree::new(2, &[(0, 1)]).expect("single edge");
    }
    let mut rng = rng(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = (0..n).find(|&x| degree[x] == 1).expect("a leaf exists");
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&x| degree[x] == 1).collect();
    edges.push((rest[0], rest[1]));
    Tree::new(n, &edges).expect("Prüfer decoding yields a tree")
}

/// A complete graph on `m` vertices without self-loops, with random owners
/// and priorities from `0..d`.
pub fn clique_game(m: usize, d: u32, seed: u64) -> ParityGame {
    assert!(m >= 2);
    let mut rng = rng(seed);
    let successors = (0..m).map(|v| (0..m).filter(|&u| u != v).collect()).collect();
    let (owners, priorities) = random_labels(&mut rng, m, d);
    ParityGame::new(owners, priorities, successors).expect("complete graph has no dead ends")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate_tree_decomposition;
    use crate::pgsolver::write_pgsolver;

    #[test]
    fn single_vertex_is_a_self_loop() {
        let (g, td) = partial_ktree(&KTreeParams::new(1, 2, 3), 7);
        assert_eq!(g.successors(0), &[0]);
        assert_eq!(td.len(), 1);
    }

    #[test]
    fn decompositions_are_valid_and_narrow() {
        for seed in 0..200 {
            let k = 1 + (seed as usize % 3);
            let (g, td) = partial_ktree(&KTreeParams::new(12, k, 4), seed);
            assert!(validate_tree_decomposition(&g, &td).is_empty(), "seed {seed}");
            assert!(td.width().unwrap() <= k + 1);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = write_pgsolver(&partial_ktree(&KTreeParams::new(9, 2, 4), 3).0);
        let b = write_pgsolver(&partial_ktree(&KTreeParams::new(9, 2, 4), 3).0);
        assert_eq!(a, b);
        assert_eq!(write_pgsolver(&random_game(6, 3, 2, 1)), write_pgsolver(&random_game(6, 3, 2, 1)));
    }

    #[test]
    fn trees_have_the_requested_size() {
        for n in 1..20 {
            assert_eq!(random_tree(n, n as u64).len(), n);
        }
    }
}
