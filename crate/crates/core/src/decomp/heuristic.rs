use std::collections::BTreeSet;

use super::treedec::TreeDecomposition;
use crate::game::{ParityGame, Vertex};

/// How the elimination order is chosen.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Elimination {
    /// Eliminate a vertex of smallest current degree.
    #[default]
    MinDegree,
    /// Eliminate a vertex whose neighbourhood needs the fewest fill edges.
    MinFill,
}

/// Builds a tree decomposition by vertex elimination on the undirected graph
/// underlying the game, then normalizes it. Ties go to the lowest vertex id.
pub fn build_tree_decomposition_heuristic(game: &ParityGame, rule: Elimination) -> TreeDecomposition {
    let n = game.len();
    if n == 0 {
        return TreeDecomposition::new(Vec::new(), Vec::new())
            .unwrap_or_else(|_| TreeDecomposition::trivial(game));
    }
    let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    for v in game.vertices() {
        for &u in game.successors(v) {
            if u != v {
                adj[v].insert(u);
                adj[u].insert(v);
            }
        }
    }
    let mut eliminated = vec![false; n];
    let mut position = vec![0usize; n];
    let mut bags: Vec<Vec<Vertex>> = Vec::with_capacity(n);
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !eliminated[v])
            .min_by_key(|&v| match rule {
                Elimination::MinDegree => (adj[v].len(), v),
                Elimination::MinFill => (fill_in(&adj, v), v),
            })
            .expect("a vertex remains");
        let neighbours: Vec<Vertex> = adj[v].iter().copied().collect();
        for (a_idx, &a) in neighbours.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &neighbours[a_idx + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = neighbours;
        bag.push(v);
        bags.push(bag);
        eliminated[v] = true;
        position[v] = step;
        order.push(v);
    }
    // The bag of v attaches to the bag of its earliest-eliminated later
    // neighbour; bags without one start a new component and are chained.
    let mut edges = Vec::new();
    let mut last_root: Option<usize> = None;
    for step in 0..n {
        let v = order[step];
        let parent = bags[step]
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| position[u])
            .min();
        match parent {
            Some(p) => edges.push((step, p)),
            None => {
                if let Some(r) = last_root {
                    edges.push((r, step));
                }
                last_root = Some(step);
            }
        }
    }
    TreeDecomposition::new(bags, edges)
        .expect("elimination produces a tree")
        .normalized()
}

fn fill_in(adj: &[BTreeSet<Vertex>], v: Vertex) -> usize {
    let ns: Vec<Vertex> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate_tree_decomposition;
    use crate::game::Owner::{Even, Odd};

    fn clique(m: usize) -> ParityGame {
        let rows: Vec<(crate::game::Owner, u32, Vec<Vertex>)> = (0..m)
            .map(|v| (if v % 2 == 0 { Even } else { Odd }, v as u32, (0..m).filter(|&u| u != v).collect()))
            .collect();
        let borrowed: Vec<_> = rows.iter().map(|(o, p, s)| (*o, *p, s.as_slice())).collect();
        ParityGame::from_rows(&borrowed).unwrap()
    }

    #[test]
    fn tree_shaped_game_has_width_two() {
        // Star around 0 with edges in both directions.
        let g = ParityGame::from_rows(&[
            (Even, 0, &[1, 2, 3]),
            (Odd, 1, &[0]),
            (Odd, 2, &[0]),
            (Even, 3, &[0, 4]),
            (Even, 4, &[3]),
        ])
        .unwrap();
        for rule in [Elimination::MinDegree, Elimination::MinFill] {
            let td = build_tree_decomposition_heuristic(&g, rule);
            assert!(validate_tree_decomposition(&g, &td).is_empty());
            assert_eq!(td.width().unwrap(), 2);
            assert!(td.len() <= g.len());
        }
    }

    #[test]
    fn clique_has_full_width() {
        for m in 1..6 {
            let g = clique(m.max(2));
            let td = build_tree_decomposition_heuristic(&g, Elimination::MinDegree);
            assert!(validate_tree_decomposition(&g, &td).is_empty());
            assert_eq!(td.width().unwrap(), m.max(2));
        }
    }

    #[test]
    fn disconnected_games_get_a_single_tree() {
        let g = ParityGame::from_rows(&[(Even, 0, &[0]), (Odd, 1, &[1]), (Even, 2, &[2])]).unwrap();
        let td = build_tree_decomposition_heuristic(&g, Elimination::MinDegree);
        assert!(validate_tree_decomposition(&g, &td).is_empty());
        assert_eq!(td.width().unwrap(), 1);
    }
}
