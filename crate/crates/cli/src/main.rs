mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use paritysim::decomp::{
    parse_decomposition, validate_dag_decomposition, validate_tree_decomposition, write_tree_decomposition,
    DecompKind, DecompositionFile,
};
use paritysim::generate::{partial_ktree, KTreeParams, Repair};
use paritysim::pgsolver::parse_pgsolver_spec;
use paritysim::simgame::SimConfig;
use paritysim::{validate_game, write_pgsolver, ParityGame};
use rayon::prelude::*;

use run::{run_solver, Inputs, RunReport, Solver};

#[derive(Parser)]
#[command(name = "paritysim", version, about = "Solve, generate and cross-check parity games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game from one start vertex, or from every vertex.
    Solve {
        game: PathBuf,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long, value_enum, default_value = "zielonka")]
        solver: Solver,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Write random partial k-tree games and their tree decompositions.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Priorities are drawn from 0..d.
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Directory for `gen-<seed>.gm` and `gen-<seed>.td`; standard output
        /// if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Repair dead ends with self-loops instead of edges inside the bag.
        #[arg(long)]
        self_loops: bool,
    },
    /// Run several solvers on every game in a directory, from every vertex.
    Compare {
        corpus: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "zielonka,bruteforce,treewidth,dagwidth")]
        solvers: Vec<Solver>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Check a game file and optionally a decomposition for it.
    Validate {
        game: PathBuf,
        #[arg(long)]
        decomp: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveOpts {
    /// Decomposition file (`td` or `dd`).
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// Without --decomp, build a tree decomposition by min-fill elimination.
    #[arg(long)]
    heuristic: bool,
    /// Largest set Odd may choose (nc solver).
    #[arg(long)]
    k: Option<usize>,
    /// Round bound for the nc solver; derived from k and the game size if absent.
    #[arg(long)]
    rounds: Option<u32>,
    /// Maximum number of simulation-game states to explore.
    #[arg(long)]
    budget: Option<u64>,
    /// One JSON report per line.
    #[arg(long)]
    json: bool,
}

impl SolveOpts {
    fn config(&self) -> SimConfig {
        let mut config = SimConfig::default();
        if let Some(budget) = self.budget {
            config.budget = budget;
        }
        config
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve { game, start, solver, opts } => solve(&game, start, solver, &opts),
        Command::Generate { n, k, d, seed, count, out, self_loops } => {
            generate(n, k, d, seed, count, out.as_deref(), self_loops)
        }
        Command::Compare { corpus, solvers, opts } => compare(&corpus, &solvers, &opts),
        Command::Validate { game, decomp } => validate(&game, decomp.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_game(path: &Path) -> Result<ParityGame> {
    let text = read(path)?;
    let spec = parse_pgsolver_spec(&text).with_context(|| path.display().to_string())?;
    spec.build().with_context(|| path.display().to_string())
}

fn load_decomposition(path: &Path) -> Result<DecompositionFile> {
    parse_decomposition(&read(path)?).with_context(|| path.display().to_string())
}

fn instance_name(path: &Path) -> String {
    path.file_stem().unwrap_or(path.as_os_str()).to_string_lossy().into_owned()
}

fn solve(path: &Path, start: Option<usize>, solver: Solver, opts: &SolveOpts) -> Result<ExitCode> {
    let game = load_game(path)?;
    let decomposition = opts.decomp.as_deref().map(load_decomposition).transpose()?;
    let needs_decomposition = matches!(solver, Solver::Dagwidth | Solver::Treewidth);
    if needs_decomposition && decomposition.is_none() && !opts.heuristic {
        anyhow::bail!("the {} solver needs --decomp FILE or --heuristic", solver.name());
    }
    let inputs = Inputs {
        decomposition: decomposition.as_ref(),
        heuristic: opts.heuristic,
        k: opts.k,
        rounds: opts.rounds,
        config: opts.config(),
    };
    let starts: Vec<usize> = match start {
        Some(s) => vec![s],
        None => game.vertices().collect(),
    };
    let name = instance_name(path);
    let mut code = 0;
    for s in starts {
        let result = run_solver(&game, s, solver, &inputs);
        if result.error.is_some() {
            code = code.max(if result.resource { 2 } else { 1 });
        }
        let report = RunReport::new(name.clone(), s, vec![result]);
        if opts.json {
            println!("{}", serde_json::to_string(&report)?);
            continue;
        }
        let r = &report.results[0];
        let s = &r.stats;
        match (&r.outcome, &r.error) {
            (Some(outcome), _) => println!(
                "{}: {} (states {}, rounds {}, rejects {}, history {}, {} ms)",
                report.start,
                display_outcome(outcome),
                s.states,
                s.rounds,
                s.rejects,
                s.max_history,
                s.wall_ms
            ),
            (None, Some(e)) => eprintln!("{}: error: {e}", report.start),
            (None, None) => unreachable!("a result has an outcome or an error"),
        }
    }
    Ok(ExitCode::from(code))
}

fn display_outcome(outcome: &str) -> &str {
    match outcome {
        "even" => "Even",
        "odd" => "Odd",
        "exceeded" => "TreewidthExceeded",
        other => other,
    }
}

fn generate(n: usize, k: usize, d: u32, seed: u64, count: u64, out: Option<&Path>, self_loops: bool) -> Result<ExitCode> {
    anyhow::ensure!(n >= 1 && k >= 1 && d >= 1, "need n >= 1, k >= 1 and d >= 1");
    let mut params = KTreeParams::new(n, k, d);
    if self_loops {
        params.repair = Repair::SelfLoop;
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    for seed in seed..seed + count {
        let (game, td) = partial_ktree(&params, seed);
        let game_text = write_pgsolver(&game);
        let td_text = write_tree_decomposition(&td, None);
        match out {
            Some(dir) => {
                let stem = format!("gen-{seed}");
                fs::write(dir.join(format!("{stem}.gm")), game_text)?;
                fs::write(dir.join(format!("{stem}.td")), td_text)?;
            }
            None => print!("{game_text}{td_text}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Games in `dir` (any file not ending in `.td` or `.dd`), each with the
/// decomposition of the same stem if there is one.
fn corpus(dir: &Path) -> Result<Vec<(PathBuf, Option<PathBuf>)>> {
    let mut games = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext == "td" || ext == "dd" {
            continue;
        }
        let decomp = ["td", "dd"].iter().map(|e| path.with_extension(e)).find(|p| p.is_file());
        games.push((path, decomp));
    }
    games.sort();
    Ok(games)
}

enum Outcome {
    Reports(Vec<RunReport>),
    Failed(String),
}

fn compare_one(game: &Path, decomp: Option<&Path>, solvers: &[Solver], opts: &SolveOpts) -> Outcome {
    let loaded = load_game(game).and_then(|g| Ok((g, decomp.map(load_decomposition).transpose()?)));
    let (game_data, decomposition) = match loaded {
        Ok(x) => x,
        Err(e) => return Outcome::Failed(format!("{e:#}")),
    };
    let inputs = Inputs {
        decomposition: decomposition.as_ref(),
        heuristic: true,
        k: opts.k,
        rounds: opts.rounds,
        config: opts.config(),
    };
    let name = instance_name(game);
    let reports = game_data
        .vertices()
        .map(|s| {
            let results = solvers.iter().map(|&solver| run_solver(&game_data, s, solver, &inputs)).collect();
            RunReport::new(name.clone(), s, results)
        })
        .collect();
    Outcome::Reports(reports)
}

fn compare(dir: &Path, solvers: &[Solver], opts: &SolveOpts) -> Result<ExitCode> {
    let games = corpus(dir)?;
    let outcomes: Vec<(String, Outcome)> = games
        .par_iter()
        .map(|(game, decomp)| (instance_name(game), compare_one(game, decomp.as_deref(), solvers, opts)))
        .collect();
    let mut bad = false;
    if !opts.json {
        println!("{:<24} {:>8} {:>8} {:>8}", "instance", "starts", "agree", "problems");
    }
    for (name, outcome) in &outcomes {
        match outcome {
            Outcome::Failed(e) => {
                bad = true;
                if opts.json {
                    println!("{}", serde_json::json!({ "instance": name, "error": e }));
                } else {
                    println!("{name:<24} error: {e}");
                }
            }
            Outcome::Reports(reports) => {
                let agree = reports.iter().filter(|r| r.agreement).count();
                bad |= agree < reports.len();
                if opts.json {
                    for report in reports {
                        println!("{}", serde_json::to_string(report)?);
                    }
                    continue;
                }
                println!("{name:<24} {:>8} {:>8} {:>8}", reports.len(), agree, reports.len() - agree);
                for report in reports.iter().filter(|r| !r.agreement) {
                    let parts: Vec<String> = report
                        .results
                        .iter()
                        .map(|r| match (&r.outcome, &r.error) {
                            (Some(o), _) => format!("{}={o}", r.solver.name()),
                            (None, e) => format!("{}: error: {}", r.solver.name(), e.as_deref().unwrap_or("")),
                        })
                        .collect();
                    println!("  start {}: {}", report.start, parts.join(", "));
                }
            }
        }
    }
    Ok(if bad { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn validate(game_path: &Path, decomp: Option<&Path>) -> Result<ExitCode> {
    let mut problems: Vec<String> = Vec::new();
    let game = match parse_pgsolver_spec(&read(game_path)?) {
        Err(e) => {
            problems.push(e.to_string());
            None
        }
        Ok(spec) => {
            let violations = validate_game(&spec);
            problems.extend(violations.iter().map(ToString::to_string));
            if violations.is_empty() {
                Some(spec.build()?)
            } else {
                None
            }
        }
    };
    if let Some(path) = decomp {
        match (parse_decomposition(&read(path)?), &game) {
            (Err(e), _) => problems.push(format!("decomposition: {e}")),
            (Ok(_), None) => problems.push("decomposition not checked: the game is invalid".into()),
            (Ok(file), Some(game)) => {
                let violations = match file.kind {
                    DecompKind::Tree => file.tree().map(|td| validate_tree_decomposition(game, &td)),
                    DecompKind::Dag => file.dag().map(|dd| validate_dag_decomposition(game, &dd)),
                };
                match violations {
                    Ok(vs) => problems.extend(vs.iter().map(|v| format!("decomposition: {v}"))),
                    Err(e) => problems.push(format!("decomposition: {e}")),
                }
            }
        }
    }
    if problems.is_empty() {
        println!("OK");
        return Ok(ExitCode::SUCCESS);
    }
    for p in &problems {
        println!("{p}");
    }
    Ok(ExitCode::from(1))
}
