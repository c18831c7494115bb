use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn paritysim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paritysim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const TWO_CYCLE: &str = "parity 1;\n0 2 0 1;\n1 1 1 0;\n";

#[test]
fn solve_even_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let out = paritysim(&["solve", &game, "--start", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("0: Even"), "{}", stdout(&out));
}

#[test]
fn solve_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let out = paritysim(&["solve", &game, "--solver", "bruteforce", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> =
        stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    for (v, line) in lines.iter().enumerate() {
        assert_eq!(line["instance"], "cycle");
        assert_eq!(line["start"], v);
        assert_eq!(line["agreement"], true);
        assert_eq!(line["results"][0]["solver"], "bruteforce");
        assert_eq!(line["results"][0]["outcome"], "even");
    }
}

#[test]
fn treewidth_with_heuristic_matches_zielonka() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    for seed in 11..14 {
        let s = seed.to_string();
        let out = paritysim(&["generate", "--n", "7", "--k", "2", "--d", "3", "--seed", &s, "--out", corpus.to_str().unwrap()]);
        assert!(out.status.success());
        let game = corpus.join(format!("gen-{seed}.gm"));
        let game = game.to_str().unwrap();
        let tw = paritysim(&["solve", game, "--solver", "treewidth", "--heuristic"]);
        let z = paritysim(&["solve", game]);
        assert_eq!(tw.status.code(), Some(0));
        let winners = |o: &Output| -> Vec<String> {
            stdout(o).lines().map(|l| l.split_whitespace().nth(1).unwrap().to_string()).collect()
        };
        assert_eq!(winners(&tw), winners(&z), "seed {seed}");
    }
}

#[test]
fn nc_with_k_zero_is_exceeded() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let out = paritysim(&["solve", &game, "--solver", "nc", "--k", "0"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        assert!(line.contains("TreewidthExceeded"), "{line}");
    }
}

#[test]
fn missing_decomposition_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let out = paritysim(&["solve", &game, "--solver", "dagwidth"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--decomp"));
}

#[test]
fn invalid_game_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "dead.gm", "parity 1;\n0 0 0 1;\n1 1 1;\n");
    assert_eq!(paritysim(&["solve", &game]).status.code(), Some(1));
}

#[test]
fn budget_exhaustion_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let out = paritysim(&["solve", &game, "--solver", "nc", "--k", "2", "--budget", "1", "--start", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_single_vertex_is_a_self_loop() {
    let out = paritysim(&["generate", "--n", "1", "--k", "1", "--d", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("parity 0;"));
    let vertex: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(vertex[3], "0;", "{text}");
}

#[test]
fn generate_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let status = paritysim(&["generate", "--n", "9", "--k", "2", "--d", "4", "--seed", "5", "--count", "4", "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
    }
    for seed in 5..9 {
        for ext in ["gm", "td"] {
            let name = format!("gen-{seed}.{ext}");
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        }
        let game = a.join(format!("gen-{seed}.gm"));
        let td = a.join(format!("gen-{seed}.td"));
        let out = paritysim(&["validate", game.to_str().unwrap(), "--decomp", td.to_str().unwrap()]);
        assert_eq!(stdout(&out), "OK\n");
    }
}

#[test]
fn validate_lists_dead_ends_and_cover_holes() {
    let dir = tempfile::tempdir().unwrap();
    let dead = write(dir.path(), "dead.gm", "parity 1;\n0 0 0 1;\n1 1 1;\n");
    let out = paritysim(&["validate", &dead]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("vertex 1 has no successors"), "{}", stdout(&out));

    let game = write(dir.path(), "cycle.gm", TWO_CYCLE);
    let hole = write(dir.path(), "hole.td", "td 1 1;\nb 0 0;\n");
    let out = paritysim(&["validate", &game, "--decomp", &hole]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("decomposition:"), "{}", stdout(&out));
}

#[test]
fn compare_generated_corpus_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().to_str().unwrap();
    let out = paritysim(&["generate", "--n", "8", "--k", "2", "--d", "4", "--seed", "100", "--count", "10", "--out", corpus]);
    assert!(out.status.success());
    let out = paritysim(&["compare", corpus]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().count(), 11);
}

#[test]
fn compare_reports_bad_files_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.gm", TWO_CYCLE);
    write(dir.path(), "b.gm", "parity 0;\n0 0 0;\n");
    let out = paritysim(&["compare", dir.path().to_str().unwrap(), "--solvers", "zielonka,bruteforce"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("a ") && text.contains("b ") && text.contains("error"), "{text}");
}

#[test]
fn compare_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = paritysim(&["compare", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}
