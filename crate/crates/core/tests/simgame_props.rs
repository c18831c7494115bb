use proptest::prelude::*;

use paritysim::decomp::{DagDecomposition, TreeDecomposition};
use paritysim::generate::{partial_ktree, random_game, KTreeParams};
use paritysim::simgame::{
    explore_outcomes, follow_odd, solve_simulation, Arena, Bag, BagId, FixedBag, HistPolicy, KeepAll, KeepLast,
    OddChoosesSets, OddTrimsHistory, ProfileId, ProfileSearch, RandomEven, RandomOdd, Record, ScriptedSide, SimConfig,
};
use paritysim::solvers::{
    modify_game, round_bound, run_slice_reduce, solve_dagwidth, solve_nc, solve_treewidth, NcOutcome,
};
use paritysim::{solve_zielonka, Owner, ParityGame};

fn small_game(max_n: usize) -> impl Strategy<Value = ParityGame> {
    (1usize..=max_n, 1u32..=4, 1usize..=3, any::<u64>()).prop_map(|(n, d, out, seed)| random_game(n, d, out, seed))
}

fn bounded(max_n: usize) -> impl Strategy<Value = (ParityGame, TreeDecomposition)> {
    (2usize..=max_n, 2u32..=4, any::<u64>()).prop_map(|(n, d, seed)| partial_ktree(&KTreeParams::new(n, 2, d), seed))
}

fn records(n: usize) -> Vec<Record> {
    (0..n).map(|i| Record { bag: BagId(i as u32), seen: None, profile: ProfileId(0) }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_bag_simulation_finds_the_winner(game in small_game(7)) {
        let z = solve_zielonka(&game);
        let bag = Bag::new(game.vertices(), None);
        for s in game.vertices() {
            let r = solve_simulation(&game, bag.clone(), s, &FixedBag(bag.clone()), &KeepLast, &SimConfig::default()).unwrap();
            prop_assert_eq!(r.winner, z.winner(s));
            prop_assert!(r.stats.max_path <= bag.len() + 1);
            prop_assert!(r.stats.max_history <= 1);
        }
    }

    #[test]
    fn exhaustive_and_dominant_profiles_agree(game in small_game(4)) {
        let bag = Bag::new(game.vertices(), None);
        let exhaustive = SimConfig { profiles: ProfileSearch::Exhaustive, ..SimConfig::default() };
        for s in game.vertices() {
            let a = solve_simulation(&game, bag.clone(), s, &FixedBag(bag.clone()), &KeepLast, &SimConfig::default()).unwrap();
            let b = solve_simulation(&game, bag.clone(), s, &FixedBag(bag.clone()), &KeepLast, &exhaustive).unwrap();
            prop_assert_eq!(a.winner, b.winner);
        }
    }

    #[test]
    fn odd_sets_keep_paths_and_histories_short(game in small_game(5), k in 1usize..=3) {
        let config = SimConfig { round_bound: Some(6), ..SimConfig::default() };
        let next = OddChoosesSets::new(game.len(), k);
        let hist = OddTrimsHistory { max: 3 };
        let r = solve_simulation(&game, Bag::new([0], None), 0, &next, &hist, &config).unwrap();
        prop_assert!(r.stats.max_path <= k.max(1) + 1);
        prop_assert!(r.stats.max_history <= 3);
        prop_assert!(r.stats.max_round <= 7);
    }

    #[test]
    fn hist_policies_return_subsequences(n in 0usize..7, max in 0usize..5) {
        let arena = Arena::new();
        let history = records(n);
        let policies: [&dyn HistPolicy; 3] = [&KeepLast, &KeepAll, &OddTrimsHistory { max }];
        for policy in policies {
            let choices = policy.hist(&arena, &history).unwrap();
            prop_assert!(!choices.is_empty());
            for kept in choices {
                prop_assert!(kept.windows(2).all(|w| w[0] < w[1]), "{:?}", kept);
                prop_assert!(kept.iter().all(|&i| i < n));
            }
        }
        let trimmed = OddTrimsHistory { max }.hist(&arena, &history).unwrap();
        prop_assert!(trimmed.iter().all(|kept| kept.len() <= max));
    }

    #[test]
    fn follow_odd_never_loses_with_whole_sets(game in small_game(5)) {
        let z = solve_zielonka(&game);
        let tau = z.strategy(Owner::Odd);
        let whole = FixedBag(Bag::new(game.vertices(), None));
        for s in z.region(Owner::Odd) {
            let out = explore_outcomes(&game, Bag::new([s], None), s, &whole, &KeepLast, ScriptedSide::Odd(tau), &SimConfig::default()).unwrap();
            prop_assert!(!out.has_winner(Owner::Even), "{:?}", out.iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn dag_solver_matches_and_stays_small((game, td) in bounded(9)) {
        let z = solve_zielonka(&game);
        for s in game.vertices() {
            let root = td.node_containing(s).unwrap();
            let dd = DagDecomposition::from_rooted(&td.root_at(root).unwrap());
            let r = solve_dagwidth(&game, &dd, s, &SimConfig::default()).unwrap();
            prop_assert_eq!(r.winner, z.winner(s));
            prop_assert!(r.stats.max_rejects as usize <= dd.len());
            prop_assert!(r.stats.max_history <= 1);
        }
    }

    #[test]
    fn treewidth_solver_matches((game, td) in bounded(9)) {
        let z = solve_zielonka(&game);
        for s in game.vertices() {
            let r = solve_treewidth(&game, &td, s, &SimConfig::default()).unwrap();
            prop_assert_eq!(r.winner, z.winner(s));
            prop_assert!(r.stats.max_history <= 1);
        }
    }

    #[test]
    fn modified_game_keeps_winners((game, td) in bounded(10), root in 0usize..64) {
        let rooted = td.root_at(root % td.len()).unwrap();
        let modified = modify_game(&game, &rooted).unwrap();
        prop_assert_eq!(modified.original_len(), game.len());
        let before = solve_zielonka(&game);
        let after = solve_zielonka(&modified.game);
        for v in game.vertices() {
            prop_assert_eq!(before.winner(v), after.winner(v));
        }
        // Every copy points back to a vertex of the bag it was made for.
        for (copy, origin) in modified.origin.iter().enumerate() {
            if let Some((v, node)) = origin {
                prop_assert!(td.bag(*node).contains(v));
                prop_assert_eq!(modified.reverse[&(*v, *node)], copy);
                prop_assert_eq!(modified.game.priority(copy), game.priority(*v));
                prop_assert_eq!(modified.game.owner(copy), game.owner(*v));
            }
        }
    }

    #[test]
    fn slice_reduce_runs_end_in_time((game, td) in bounded(14), seed in any::<u64>()) {
        let k = td.width().unwrap();
        let bound = round_bound(k, game.len());
        let z = solve_zielonka(&game);
        let tau = z.strategy(Owner::Odd);
        let s = (seed as usize) % game.len();
        let mut even = RandomEven::new(seed);
        let mut scripted = follow_odd(tau);
        let mut random = RandomOdd::rejecting(seed, 0.7);
        let odd: &mut dyn paritysim::simgame::OddAgent = if seed % 2 == 0 { &mut scripted } else { &mut random };
        let r = run_slice_reduce(&game, &td, s, &mut even, odd, 100_000).unwrap();
        prop_assert!(r.violations.is_empty(), "{:?}", r.violations);
        prop_assert!(r.max_records <= 3);
        prop_assert!(r.max_set <= k);
        prop_assert!(r.outcome.rounds <= bound, "{} > {}", r.outcome.rounds, bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nc_with_every_vertex_allowed_finds_the_winner(game in small_game(3)) {
        let z = solve_zielonka(&game);
        for s in game.vertices() {
            let r = solve_nc(&game, game.len(), s, None, &SimConfig::default()).unwrap();
            prop_assert_eq!(r.outcome, NcOutcome::Winner(z.winner(s)));
        }
    }
}

#[test]
fn nc_with_no_sets_is_exceeded() {
    let game = random_game(4, 3, 2, 7);
    for s in game.vertices() {
        let r = solve_nc(&game, 0, s, None, &SimConfig::default()).unwrap();
        assert_eq!(r.outcome, NcOutcome::TreewidthExceeded);
    }
}
