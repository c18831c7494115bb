use crate::decomp::{validate_dag_decomposition, DagDecomposition};
use crate::error::{Error, Result};
use crate::game::{ParityGame, Vertex};
use crate::simgame::{solve_simulation, Arena, Bag, BagId, KeepLast, NextPolicy, Record, SimConfig, SolveReport};

/// After a rejection at `v` on node `i`, continue on the lowest-id child of
/// `i` below which `v` lies.
pub struct DagNext {
    bags: Vec<Vec<Vertex>>,
    children: Vec<Vec<usize>>,
    below: Vec<Vec<bool>>,
}

impl DagNext {
    pub fn new(dd: &DagDecomposition, vertices: usize) -> Result<DagNext> {
        let mut below = Vec::with_capacity(dd.len());
        for i in 0..dd.len() {
            let mut mask = vec![false; vertices];
            for v in dd.below(i)? {
                mask[v] = true;
            }
            below.push(mask);
        }
        let children = (0..dd.len())
            .map(|i| {
                let mut c = dd.children(i).to_vec();
                c.sort_unstable();
                c
            })
            .collect();
        Ok(DagNext { bags: dd.bags().to_vec(), children, below })
    }

    pub fn bag(&self, i: usize) -> Bag {
        Bag::new(self.bags[i].iter().copied(), Some(i))
    }
}

impl NextPolicy for DagNext {
    fn next(&self, arena: &Arena, current: BagId, v: Vertex, _: &[Record]) -> Result<Vec<Bag>> {
        let i = arena
            .bag(current)
            .node()
            .ok_or_else(|| Error::Internal("set without a decomposition node".into()))?;
        let j = self.children[i]
            .iter()
            .copied()
            .find(|&j| self.below[j][v])
            .ok_or_else(|| Error::Internal(format!("vertex {v} lies below no child of node {i}")))?;
        Ok(vec![self.bag(j)])
    }
}

/// Decides the winner of `s` with the simulation game over a DAG
/// decomposition, starting from the lowest-id source whose region contains
/// `s` and is closed under the game's edges.
pub fn solve_dagwidth(game: &ParityGame, dd: &DagDecomposition, s: Vertex, config: &SimConfig) -> Result<SolveReport> {
    if s >= game.len() {
        return Err(Error::UnknownVertex(s));
    }
    let violations = validate_dag_decomposition(game, dd);
    if !violations.is_empty() {
        return Err(super::invalid(&violations));
    }
    let next = DagNext::new(dd, game.len())?;
    let source = dd
        .sources()
        .into_iter()
        .find(|&i| {
            let region = &next.below[i];
            region[s] && game.vertices().filter(|&v| region[v]).all(|v| game.successors(v).iter().all(|&u| region[u]))
        })
        .ok_or_else(|| Error::Precondition(format!("no source region contains vertex {s} and is closed under edges")))?;
    let report = solve_simulation(game, next.bag(source), s, &next, &KeepLast, config)?;
    if report.stats.max_rejects as usize > dd.len() {
        return Err(Error::Internal(format!(
            "{} rejections on a decomposition with {} nodes",
            report.stats.max_rejects,
            dd.len()
        )));
    }
    if report.stats.max_history > 1 {
        return Err(Error::Internal("more than one record kept".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::TreeDecomposition;
    use crate::game::Owner::{Even, Odd};
    use crate::oracle::solve_zielonka;

    #[test]
    fn one_node_and_chain_decompositions_match_oracle() {
        // Two blocks {0, 1} and {2, 3} joined by the edges 1 -> 2 and 3 -> 1.
        let g = ParityGame::from_rows(&[
            (Even, 1, &[1, 0]),
            (Odd, 2, &[0, 2]),
            (Even, 3, &[3]),
            (Odd, 4, &[2, 1]),
        ])
        .unwrap();
        let z = solve_zielonka(&g);
        let one = DagDecomposition::new(vec![(0..4).collect()], vec![]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2, 3]], vec![(0, 1)]).unwrap();
        let chain = DagDecomposition::from_rooted(&td.root_at(0).unwrap());
        for s in g.vertices() {
            for dd in [&one, &chain] {
                let r = solve_dagwidth(&g, dd, s, &SimConfig::default()).unwrap();
                assert_eq!(r.winner, z.winner(s), "vertex {s}");
            }
        }
    }

    #[test]
    fn invalid_decomposition_is_rejected() {
        let g = ParityGame::from_rows(&[(Even, 1, &[1]), (Odd, 2, &[0])]).unwrap();
        let dd = DagDecomposition::new(vec![vec![0]], vec![]).unwrap();
        assert!(matches!(
            solve_dagwidth(&g, &dd, 0, &SimConfig::default()),
            Err(Error::InvalidDecomposition(_))
        ));
    }
}
