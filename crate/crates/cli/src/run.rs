//! Running one solver on one start vertex, and the reports that come out.

use std::time::Instant;

use clap::ValueEnum;
use paritysim::decomp::{build_tree_decomposition_heuristic, DecompositionFile, Elimination};
use paritysim::simgame::SimConfig;
use paritysim::solvers::{solve_dagwidth, solve_nc, solve_treewidth, NcOutcome};
use paritysim::{solve_bruteforce, solve_zielonka, Owner, ParityGame, Vertex};
use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Zielonka,
    Bruteforce,
    Dagwidth,
    Treewidth,
    Nc,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Zielonka => "zielonka",
            Solver::Bruteforce => "bruteforce",
            Solver::Dagwidth => "dagwidth",
            Solver::Treewidth => "treewidth",
            Solver::Nc => "nc",
        }
    }
}

/// Everything a solver may need besides the game.
pub struct Inputs<'a> {
    pub decomposition: Option<&'a DecompositionFile>,
    /// Build a decomposition by min-fill elimination when none is given.
    pub heuristic: bool,
    pub k: Option<usize>,
    pub rounds: Option<u32>,
    pub config: SimConfig,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Stats {
    pub states: u64,
    pub rounds: u32,
    pub rejects: u32,
    pub max_history: usize,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverResult {
    pub solver: Solver,
    /// `even`, `odd` or `exceeded`; absent when the solver failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Whether the failure was running out of budget rather than bad input.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub resource: bool,
    pub stats: Stats,
}

impl SolverResult {
    /// The winner, if the solver named one.
    pub fn winner(&self) -> Option<&str> {
        self.outcome.as_deref().filter(|o| *o == "even" || *o == "odd")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub start: Vertex,
    pub results: Vec<SolverResult>,
    /// All solvers that named a winner named the same one, and none failed.
    pub agreement: bool,
}

impl RunReport {
    pub fn new(instance: String, start: Vertex, results: Vec<SolverResult>) -> RunReport {
        let failed = results.iter().any(|r| r.error.is_some());
        let mut winners = results.iter().filter_map(SolverResult::winner);
        let first = winners.next();
        let agreement = !failed && winners.all(|w| Some(w) == first);
        RunReport { instance, start, results, agreement }
    }
}

fn owner_name(owner: Owner) -> String {
    match owner {
        Owner::Even => "even",
        Owner::Odd => "odd",
    }
    .to_string()
}

pub fn run_solver(game: &ParityGame, start: Vertex, solver: Solver, inputs: &Inputs) -> SolverResult {
    let clock = Instant::now();
    let result = outcome(game, start, solver, inputs);
    let wall_ms = clock.elapsed().as_millis() as u64;
    match result {
        Ok((outcome, mut stats)) => {
            stats.wall_ms = wall_ms;
            SolverResult { solver, outcome: Some(outcome), error: None, resource: false, stats }
        }
        Err(e) => {
            let resource = e.downcast_ref::<paritysim::Error>().is_some_and(paritysim::Error::is_resource);
            SolverResult {
                solver,
                outcome: None,
                error: Some(format!("{e:#}")),
                resource,
                stats: Stats { wall_ms, ..Stats::default() },
            }
        }
    }
}

fn outcome(game: &ParityGame, start: Vertex, solver: Solver, inputs: &Inputs) -> anyhow::Result<(String, Stats)> {
    if start >= game.len() {
        return Err(paritysim::Error::UnknownVertex(start).into());
    }
    let from_search = |report: paritysim::simgame::SolveReport| {
        let stats = Stats {
            states: report.stats.explored,
            rounds: report.stats.max_round,
            rejects: report.stats.max_rejects,
            max_history: report.stats.max_history,
            wall_ms: 0,
        };
        (owner_name(report.winner), stats)
    };
    Ok(match solver {
        Solver::Zielonka => (owner_name(solve_zielonka(game).winner(start)), Stats::default()),
        Solver::Bruteforce => (owner_name(solve_bruteforce(game, start)?), Stats::default()),
        Solver::Dagwidth => {
            let dd = match inputs.decomposition {
                Some(file) => file.dag()?,
                None => heuristic(game, inputs)?.dag()?,
            };
            from_search(solve_dagwidth(game, &dd, start, &inputs.config)?)
        }
        Solver::Treewidth => {
            let td = match inputs.decomposition {
                Some(file) => file.tree()?,
                None => heuristic(game, inputs)?.tree()?,
            };
            from_search(solve_treewidth(game, &td, start, &inputs.config)?)
        }
        Solver::Nc => {
            let k = inputs.k.ok_or_else(|| anyhow::anyhow!("the nc solver needs --k"))?;
            let report = solve_nc(game, k, start, inputs.rounds, &inputs.config)?;
            let stats = Stats {
                states: report.game_side.stats.explored + report.swapped_side.stats.explored,
                rounds: report.rounds,
                rejects: report.game_side.stats.max_rejects.max(report.swapped_side.stats.max_rejects),
                max_history: report.game_side.stats.max_history.max(report.swapped_side.stats.max_history),
                wall_ms: 0,
            };
            let outcome = match report.outcome {
                NcOutcome::Winner(w) => owner_name(w),
                NcOutcome::TreewidthExceeded => "exceeded".to_string(),
            };
            (outcome, stats)
        }
    })
}

fn heuristic(game: &ParityGame, inputs: &Inputs) -> anyhow::Result<DecompositionFile> {
    if !inputs.heuristic {
        anyhow::bail!("this solver needs a decomposition (--decomp FILE or --heuristic)");
    }
    let td = build_tree_decomposition_heuristic(game, Elimination::MinFill);
    Ok(DecompositionFile {
        kind: paritysim::decomp::DecompKind::Tree,
        bags: td.bags().to_vec(),
        edges: td.edges().to_vec(),
        root: None,
    })
}
