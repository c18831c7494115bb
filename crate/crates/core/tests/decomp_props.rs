use std::collections::BTreeSet;

use proptest::prelude::*;

use paritysim::decomp::{
    build_tree_decomposition_heuristic, parse_decomposition, validate_dag_decomposition,
    validate_tree_decomposition, write_rooted_decomposition, write_tree_decomposition, DagDecomposition,
    Elimination, Tree, TreeDecomposition,
};
use paritysim::generate::{partial_ktree, random_game, random_tree, KTreeParams};
use paritysim::{ParityGame, Vertex};

/// Checks the three conditions directly: cover, edges, and connected
/// occurrence sets (by flood fill over tree edges inside the set).
fn naive_valid(game: &ParityGame, bags: &[Vec<Vertex>], edges: &[(usize, usize)]) -> bool {
    let holds = |i: usize, v: Vertex| bags[i].contains(&v);
    for v in game.vertices() {
        let nodes: Vec<usize> = (0..bags.len()).filter(|&i| holds(i, v)).collect();
        let Some(&first) = nodes.first() else { return false };
        let mut reached = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(i) = stack.pop() {
            for &(a, b) in edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == i && holds(y, v) && reached.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        if reached.len() != nodes.len() {
            return false;
        }
        for &u in game.successors(v) {
            if !(0..bags.len()).any(|i| holds(i, u) && holds(i, v)) {
                return false;
            }
        }
    }
    true
}

fn instance() -> impl Strategy<Value = (ParityGame, TreeDecomposition)> {
    (1usize..14, 1usize..4, 1u32..5, any::<u64>()).prop_map(|(n, k, d, seed)| partial_ktree(&KTreeParams::new(n, k, d), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn validator_matches_naive_check(
        (game, td) in instance(),
        edits in prop::collection::vec((any::<bool>(), 0usize..64, 0usize..64), 0..3),
    ) {
        let mut bags = td.bags().to_vec();
        for (add, node, vertex) in edits {
            let i = node % bags.len();
            let v = vertex % game.len();
            if add {
                bags[i].push(v);
                bags[i].sort_unstable();
                bags[i].dedup();
            } else {
                bags[i].retain(|&x| x != v);
            }
        }
        let edited = TreeDecomposition::new(bags.clone(), td.edges().to_vec()).unwrap();
        let found = validate_tree_decomposition(&game, &edited);
        prop_assert_eq!(found.is_empty(), naive_valid(&game, &bags, td.edges()), "{:?}", found);
    }

    #[test]
    fn generated_decompositions_are_valid((game, td) in instance()) {
        prop_assert!(validate_tree_decomposition(&game, &td).is_empty());
        let k = td.bags().iter().map(Vec::len).max().unwrap();
        prop_assert_eq!(td.width().unwrap(), k);
    }

    #[test]
    fn rooted_tree_decompositions_are_dag_decompositions((game, td) in instance(), root in 0usize..64) {
        let rooted = td.root_at(root % td.len()).unwrap();
        let dd = DagDecomposition::from_rooted(&rooted);
        prop_assert!(dd.is_acyclic());
        let found = validate_dag_decomposition(&game, &dd);
        prop_assert!(found.is_empty(), "{:?}", found);
    }

    #[test]
    fn heuristic_decompositions_are_valid(n in 1usize..12, d in 1u32..5, out in 1usize..4, seed in any::<u64>(), fill in any::<bool>()) {
        let game = random_game(n, d, out, seed);
        let rule = if fill { Elimination::MinFill } else { Elimination::MinDegree };
        let td = build_tree_decomposition_heuristic(&game, rule);
        let found = validate_tree_decomposition(&game, &td);
        prop_assert!(found.is_empty(), "{:?}", found);
    }

    #[test]
    fn decomposition_files_round_trip((_, td) in instance(), root in 0usize..64) {
        let text = write_tree_decomposition(&td, None);
        let back = parse_decomposition(&text).unwrap().tree().unwrap();
        prop_assert_eq!(back.bags(), td.bags());
        prop_assert_eq!(back.edges(), td.edges());

        let rooted = td.root_at(root % td.len()).unwrap();
        let file = parse_decomposition(&write_rooted_decomposition(&rooted)).unwrap();
        prop_assert_eq!(file.root, Some(rooted.root()));
    }

    #[test]
    fn split_vertex_leaves_small_parts(n in 3usize..=50, seed in any::<u64>()) {
        let tree = random_tree(n, seed);
        let x = tree.split_vertex().unwrap();
        for part in tree.components_without(x, None) {
            prop_assert!(3 * part.len() <= 2 * n, "part of {} in {}", part.len(), n);
        }
    }

    #[test]
    fn two_edge_paths_at_most_nodes(n in 1usize..=60, seed in any::<u64>(), root in 0usize..60) {
        let tree = random_tree(n, seed);
        let bags = vec![vec![0]; n];
        let td = TreeDecomposition::new(bags, tree.edges()).unwrap();
        let rooted = td.root_at(root % n).unwrap();
        // Direct count: parent -> child -> grandchild paths.
        let direct: usize = (0..n).map(|i| rooted.children(i).iter().map(|&c| rooted.children(c).len()).sum::<usize>()).sum();
        prop_assert_eq!(rooted.count_two_edge_paths(), direct);
        prop_assert!(direct <= n);
    }
}

#[test]
fn tree_rejects_cycles_and_forests() {
    assert!(Tree::new(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
    assert!(Tree::new(4, &[(0, 1), (2, 3)]).is_err());
    assert!(Tree::new(1, &[]).is_ok());
}
