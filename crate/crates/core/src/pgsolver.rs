//! Reading and writing games in the PGSolver text format.
//!
//! ```text
//! parity 1;
//! 0 2 0 1 "start";
//! 1 3 1 0;
//! ```
//!
//! Each vertex line is `<id> <priority> <owner> <succ>(,<succ>)* ("name")?;`
//! with owner `0` for Even and `1` for Odd. The `parity` header is optional on
//! input and always written on output. A `start <id>;` line is accepted and
//! ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{GameSpec, Owner, ParityGame, Priority, VertexDecl};

/// Parses and validates a game. Vertex ids are renumbered densely in
/// increasing id order; names are kept.
pub fn parse_pgsolver(text: &str) -> Result<ParityGame> {
    parse_pgsolver_spec(text)?.build()
}

/// Parses without validating, so callers can report every violation at once.
pub fn parse_pgsolver_spec(text: &str) -> Result<GameSpec> {
    let mut spec = GameSpec::default();
    let mut seen_vertex = false;
    for (index, raw) in text.split('\n').enumerate() {
        let line_no = index + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| Error::Syntax { line: line_no, message: message.to_string() };
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| syntax("missing terminating ';'"))?
            .trim_end();

        if let Some(rest) = body.strip_prefix("parity") {
            if seen_vertex || !spec.vertices.is_empty() {
                return Err(syntax("header must come before vertex lines"));
            }
            rest.trim()
                .parse::<u64>()
                .map_err(|_| syntax("expected 'parity <max-id>;'"))?;
            continue;
        }
        if let Some(rest) = body.strip_prefix("start") {
            rest.trim()
                .parse::<u64>()
                .map_err(|_| syntax("expected 'start <id>;'"))?;
            continue;
        }

        let (fields, name) = split_name(body).map_err(&syntax)?;
        let tokens: Vec<&str> = fields.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len() > 4 {
            return Err(syntax("expected '<id> <priority> <owner> <successors>'"));
        }
        let id = tokens[0].parse::<u64>().map_err(|_| syntax("bad vertex id"))?;
        let priority = tokens[1].parse::<u32>().map_err(|_| syntax("bad priority"))?;
        let owner = match tokens[2] {
            "0" => Owner::Even,
            "1" => Owner::Odd,
            _ => return Err(syntax("owner must be 0 or 1")),
        };
        let successors = match tokens.get(3) {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|s| s.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| syntax("bad successor list"))?,
        };
        seen_vertex = true;
        spec.vertices.push(VertexDecl {
            id,
            priority: Priority(priority),
            owner,
            successors,
            name,
        });
    }
    Ok(spec)
}

fn split_name(body: &str) -> std::result::Result<(&str, Option<String>), &'static str> {
    let Some(open) = body.find('"') else {
        return Ok((body, None));
    };
    if !body.ends_with('"') || open == body.len() - 1 {
        return Err("unterminated vertex name");
    }
    let quoted = &body[open + 1..body.len() - 1];
    let mut name = String::with_capacity(quoted.len());
    let mut chars = quoted.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => name.push(chars.next().ok_or("dangling escape in vertex name")?),
            '"' => return Err("unescaped quote in vertex name"),
            _ => name.push(ch),
        }
    }
    Ok((&body[..open], Some(name)))
}

/// Writes the canonical form: a `parity` header, then one line per vertex in
/// id order, `\n` line endings.
pub fn write_pgsolver(game: &ParityGame) -> String {
    let mut out = String::new();
    let max_id = game.len().saturating_sub(1);
    writeln!(out, "parity {max_id};").unwrap();
    for v in game.vertices() {
        write!(out, "{} {} {} ", v, game.priority(v), game.owner(v).index()).unwrap();
        let succ: Vec<String> = game.successors(v).iter().map(|s| s.to_string()).collect();
        out.push_str(&succ.join(","));
        if let Some(name) = game.name(v) {
            out.push_str(" \"");
            for ch in name.chars() {
                if ch == '"' || ch == '\\' {
                    out.push('\\');
                }
                out.push(ch);
            }
            out.push('"');
        }
        out.push_str(";\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Violation;

    #[test]
    fn parses_two_vertex_example() {
        let g = parse_pgsolver("parity 1;\n0 2 0 1;\n1 3 1 0;").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.owner(0), Owner::Even);
        assert_eq!(g.owner(1), Owner::Odd);
        assert_eq!(g.priority(1), Priority(3));
        assert_eq!(g.successors(0), &[1]);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "parity 1;\n0 2 0 1;\n1 3 1 0;\n";
        let g = parse_pgsolver(text).unwrap();
        assert_eq!(write_pgsolver(&g), text);
    }

    #[test]
    fn header_is_optional_and_crlf_tolerated() {
        let g = parse_pgsolver("0 2 0 1;\r\n1 3 1 0,1;\r\n").unwrap();
        assert_eq!(g.successors(1), &[0, 1]);
    }

    #[test]
    fn empty_successor_list_is_a_dead_end() {
        match parse_pgsolver("0 2 0;\n") {
            Err(Error::InvalidGame(v)) => assert_eq!(v, vec![Violation::DeadEnd(0)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse_pgsolver("parity 1;\n0 2 0 1;\n1 x 1 0;\n") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_pgsolver("0 2 0 1\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_pgsolver("0 2 5 0;\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn names_round_trip_with_escapes() {
        let text = "parity 0;\n0 4 1 0 \"a \\\"quoted\\\" \\\\ name\";\n";
        let g = parse_pgsolver(text).unwrap();
        assert_eq!(g.name(0), Some("a \"quoted\" \\ name"));
        assert_eq!(write_pgsolver(&g), text);
    }

    #[test]
    fn sparse_ids_are_renumbered_and_start_is_ignored() {
        let g = parse_pgsolver("parity 20;\nstart 20;\n20 1 1 5;\n5 0 0 20;\n").unwrap();
        assert_eq!(write_pgsolver(&g), "parity 1;\n0 0 0 1;\n1 1 1 0;\n");
    }
}
