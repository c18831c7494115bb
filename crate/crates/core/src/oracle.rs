//! Two independent reference solvers: the recursive attractor algorithm and
//! exhaustive enumeration of Even's positional strategies.

use crate::error::{Error, Result};
use crate::game::{play, restrict, Owner, ParityGame, Strategy, Vertex};

/// Winning regions together with positional witness strategies. Each witness
/// is total; its choices only matter on its owner's winning region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningPartition {
    winners: Vec<Owner>,
    even_strategy: Strategy,
    odd_strategy: Strategy,
}

impl WinningPartition {
    pub fn winner(&self, v: Vertex) -> Owner {
        self.winners[v]
    }

    pub fn winners(&self) -> &[Owner] {
        &self.winners
    }

    pub fn even_wins(&self) -> Vec<Vertex> {
        self.region(Owner::Even)
    }

    pub fn odd_wins(&self) -> Vec<Vertex> {
        self.region(Owner::Odd)
    }

    pub fn region(&self, player: Owner) -> Vec<Vertex> {
        (0..self.winners.len()).filter(|&v| self.winners[v] == player).collect()
    }

    pub fn strategy(&self, player: Owner) -> &Strategy {
        match player {
            Owner::Even => &self.even_strategy,
            Owner::Odd => &self.odd_strategy,
        }
    }
}

/// Solves the game with the recursive attractor algorithm.
pub fn solve_zielonka(game: &ParityGame) -> WinningPartition {
    let n = game.len();
    let preds = game.predecessors();
    let mut solver = Zielonka {
        game,
        preds: &preds,
        choice: vec![None; n],
    };
    let all = vec![true; n];
    let (even_region, _) = solver.solve(&all);
    let winners: Vec<Owner> = (0..n)
        .map(|v| if even_region[v] { Owner::Even } else { Owner::Odd })
        .collect();
    let pick = |player: Owner| {
        Strategy::from_fn(game, player, |v| {
            solver.choice[v].unwrap_or_else(|| game.successors(v)[0])
        })
        .expect("attractor choices are edges")
    };
    let even_strategy = pick(Owner::Even);
    let odd_strategy = pick(Owner::Odd);
    WinningPartition { winners, even_strategy, odd_strategy }
}

struct Zielonka<'g> {
    game: &'g ParityGame,
    preds: &'g [Vec<Vertex>],
    /// Winning move of the owner at each vertex the owner wins, filled as
    /// regions are settled; later (outer) assignments overwrite inner ones.
    choice: Vec<Option<Vertex>>,
}

impl Zielonka<'_> {
    /// Returns (Even region, Odd region) of the subgame induced by `arena`.
    fn solve(&mut self, arena: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let n = self.game.len();
        let Some(top) = (0..n).filter(|&v| arena[v]).map(|v| self.game.priority(v)).max() else {
            return (vec![false; n], vec![false; n]);
        };
        let player = top.winner();
        let target: Vec<bool> = (0..n)
            .map(|v| arena[v] && self.game.priority(v) == top)
            .collect();
        let attr = self.attractor(arena, &target, player);
        let rest: Vec<bool> = (0..n).map(|v| arena[v] && !attr[v]).collect();
        let (sub_even, sub_odd) = self.solve(&rest);
        let sub_opponent = match player {
            Owner::Even => &sub_odd,
            Owner::Odd => &sub_even,
        };
        if !sub_opponent.iter().any(|&b| b) {
            // The player wins the whole arena: from top-priority vertices any
            // move that stays inside works.
            for v in 0..n {
                if target[v] && self.game.owner(v) == player {
                    let stay = self.game.successors(v).iter().copied().find(|&u| arena[u]);
                    self.choice[v] = Some(stay.expect("subgames have no dead ends"));
                }
            }
            let all = arena.to_vec();
            let none = vec![false; n];
            return match player {
                Owner::Even => (all, none),
                Owner::Odd => (none, all),
            };
        }
        let opponent = player.opponent();
        let opp_attr = self.attractor(arena, sub_opponent, opponent);
        let remaining: Vec<bool> = (0..n).map(|v| arena[v] && !opp_attr[v]).collect();
        let (mut even, mut odd) = self.solve(&remaining);
        let opponent_region = match opponent {
            Owner::Even => &mut even,
            Owner::Odd => &mut odd,
        };
        for v in 0..n {
            if opp_attr[v] {
                opponent_region[v] = true;
            }
        }
        (even, odd)
    }

    /// Attractor of `target` for `player` inside `arena`, recording the
    /// attracting move of the player's vertices outside the target.
    fn attractor(&mut self, arena: &[bool], target: &[bool], player: Owner) -> Vec<bool> {
        let n = self.game.len();
        let mut inside = target.to_vec();
        let mut remaining: Vec<usize> = (0..n)
            .map(|v| self.game.successors(v).iter().filter(|&&u| arena[u]).count())
            .collect();
        let mut queue: Vec<Vertex> = (0..n).filter(|&v| inside[v]).collect();
        while let Some(u) = queue.pop() {
            for &v in &self.preds[u] {
                if !arena[v] || inside[v] {
                    continue;
                }
                if self.game.owner(v) == player {
                    inside[v] = true;
                    self.choice[v] = Some(u);
                    queue.push(v);
                } else {
                    remaining[v] -= 1;
                    if remaining[v] == 0 {
                        inside[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        inside
    }
}

/// Checks each witness strategy of a partition: fixing it, the opponent's best
/// responses (computed by solving the restricted game) still lose on every
/// vertex of the witness owner's region.
pub fn verify_partition(game: &ParityGame, partition: &WinningPartition) -> Result<()> {
    for player in [Owner::Even, Owner::Odd] {
        let witness = partition.strategy(player);
        let restricted = restrict(game, witness)?;
        let responses = solve_zielonka(&restricted);
        let reply = Strategy::from_fn(game, player.opponent(), |v| {
            responses.strategy(player.opponent()).choice(v).expect("total strategy")
        })?;
        let (even, odd) = match player {
            Owner::Even => (witness, &reply),
            Owner::Odd => (&reply, witness),
        };
        for v in partition.region(player) {
            if responses.winner(v) != player {
                return Err(Error::Internal(format!(
                    "{player} witness loses from {v} in the restricted game"
                )));
            }
            let (_, winner) = play(game, v, even, odd)?;
            if winner != player {
                return Err(Error::Internal(format!(
                    "{player} witness loses the play from {v} against a best response"
                )));
            }
        }
    }
    Ok(())
}

/// Largest number of Even strategies the brute-force oracle will enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 1_000_000;

/// Winner of `start` by enumerating all Even positional strategies.
pub fn solve_bruteforce(game: &ParityGame, start: Vertex) -> Result<Owner> {
    if start >= game.len() {
        return Err(Error::UnknownVertex(start));
    }
    Ok(solve_bruteforce_all(game)?[start])
}

/// Winners of every vertex by enumerating all Even positional strategies.
///
/// Even wins `v` iff some strategy σ leaves Odd no reachable cycle in `G↾σ`
/// whose largest priority is odd. Once σ is fixed Odd is playing alone, so
/// every Odd positional strategy corresponds to one such lasso.
pub fn solve_bruteforce_all(game: &ParityGame) -> Result<Vec<Owner>> {
    let even_vertices: Vec<Vertex> =
        game.vertices().filter(|&v| game.owner(v) == Owner::Even).collect();
    let count = even_vertices
        .iter()
        .try_fold(1u128, |acc, &v| acc.checked_mul(game.successors(v).len() as u128))
        .unwrap_or(u128::MAX);
    if count > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge(count));
    }

    let n = game.len();
    let mut even_wins = vec![false; n];
    let mut digits = vec![0usize; even_vertices.len()];
    let mut successors: Vec<Vec<Vertex>> =
        game.vertices().map(|v| game.successors(v).to_vec()).collect();
    loop {
        for (i, &v) in even_vertices.iter().enumerate() {
            successors[v] = vec![game.successors(v)[digits[i]]];
        }
        let odd_wins = odd_wins_alone(game, &successors);
        for v in 0..n {
            even_wins[v] |= !odd_wins[v];
        }
        // Advance the mixed-radix counter over Even's choices.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(even_wins
                    .iter()
                    .map(|&e| if e { Owner::Even } else { Owner::Odd })
                    .collect());
            }
            digits[i] += 1;
            if digits[i] < game.successors(even_vertices[i]).len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Vertices from which some path reaches a cycle with an odd maximum.
fn odd_wins_alone(game: &ParityGame, successors: &[Vec<Vertex>]) -> Vec<bool> {
    let n = game.len();
    let mut bad = vec![false; n];
    for w in 0..n {
        let top = game.priority(w);
        if top.is_even() {
            continue;
        }
        // Does w return to itself through vertices of priority at most its own?
        let mut seen = vec![false; n];
        let mut stack: Vec<Vertex> = successors[w].clone();
        while let Some(x) = stack.pop() {
            if x == w {
                bad[w] = true;
                break;
            }
            if seen[x] || game.priority(x) > top {
                continue;
            }
            seen[x] = true;
            stack.extend(successors[x].iter().copied());
        }
    }
    let mut wins = bad.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !wins[v] && successors[v].iter().any(|&u| wins[u]) {
                wins[v] = true;
                changed = true;
            }
        }
    }
    wins
}

#[cfg(test)]
mod tests {
    use super::*;
    use Owner::{Even, Odd};

    #[test]
    fn single_vertex_games() {
        let g = ParityGame::from_rows(&[(Even, 2, &[0])]).unwrap();
        assert_eq!(solve_zielonka(&g).winners(), &[Even]);
        let g = ParityGame::from_rows(&[(Even, 1, &[0])]).unwrap();
        assert_eq!(solve_zielonka(&g).winners(), &[Odd]);
    }

    #[test]
    fn two_vertex_cycles() {
        let g = ParityGame::from_rows(&[(Even, 2, &[1]), (Odd, 1, &[0])]).unwrap();
        assert_eq!(solve_bruteforce(&g, 0).unwrap(), Even);
        let g = ParityGame::from_rows(&[(Even, 3, &[1]), (Odd, 2, &[0])]).unwrap();
        assert_eq!(solve_bruteforce(&g, 0).unwrap(), Odd);
    }

    #[test]
    fn choice_matters() {
        // Even at 0 can go to an even sink (1) or an odd sink (2).
        let g = ParityGame::from_rows(&[
            (Even, 0, &[1, 2]),
            (Odd, 4, &[1]),
            (Odd, 3, &[2]),
            (Odd, 0, &[0, 2]),
        ])
        .unwrap();
        let z = solve_zielonka(&g);
        assert_eq!(z.winners(), &[Even, Even, Odd, Odd]);
        assert_eq!(z.strategy(Even).choice(0), Some(1));
        verify_partition(&g, &z).unwrap();
        assert_eq!(solve_bruteforce_all(&g).unwrap(), z.winners());
    }

    #[test]
    fn bruteforce_refuses_large_instances() {
        let n = 21;
        let all: Vec<Vertex> = (0..n).collect();
        let rows: Vec<(Owner, u32, &[Vertex])> = (0..n).map(|_| (Even, 0, &all[..2])).collect();
        let g = ParityGame::from_rows(&rows).unwrap();
        assert!(matches!(solve_bruteforce(&g, 0), Err(Error::TooLarge(_))));
    }
}
