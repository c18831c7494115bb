//! Text format for decompositions.
//!
//! ```text
//! td 3 2;
//! b 0 0,1;
//! b 1 1,2;
//! b 2 2;
//! e 0 1;
//! e 1 2;
//! rooted 0;
//! ```
//!
//! The header is `td <nodes> <width>;` for tree decompositions and
//! `dd <nodes> <width>;` for DAG decompositions, where edges are directed.
//! Node ids must be exactly `0..nodes`. Vertex ids are the dense game
//! indices. An empty bag is written `b <id>;`.

use std::fmt::Write as _;

use super::dag::DagDecomposition;
use super::treedec::{RootedTreeDecomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::game::Vertex;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DecompKind {
    Tree,
    Dag,
}

/// The contents of a decomposition file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionFile {
    pub kind: DecompKind,
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
    pub root: Option<usize>,
}

impl DecompositionFile {
    pub fn tree(&self) -> Result<TreeDecomposition> {
        if self.kind != DecompKind::Tree {
            return Err(Error::InvalidDecomposition("expected a tree decomposition".into()));
        }
        TreeDecomposition::new(self.bags.clone(), self.edges.clone())
    }

    /// A DAG decomposition: taken as is for `dd` files, or oriented away
    /// from the root (node 0 if none is marked) for `td` files.
    pub fn dag(&self) -> Result<DagDecomposition> {
        match self.kind {
            DecompKind::Dag => DagDecomposition::new(self.bags.clone(), self.edges.clone()),
            DecompKind::Tree => {
                let rooted = self.tree()?.root_at(self.root.unwrap_or(0))?;
                Ok(DagDecomposition::from_rooted(&rooted))
            }
        }
    }
}

pub fn parse_decomposition(text: &str) -> Result<DecompositionFile> {
    let mut header: Option<(DecompKind, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut edges = Vec::new();
    let mut root = None;
    for (index, raw) in text.split('\n').enumerate() {
        let line_no = index + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax { line: line_no, message };
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| syntax("missing terminating ';'".into()))?;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let number = |t: &str| t.parse::<usize>().map_err(|_| syntax(format!("bad number '{t}'")));
        match (tokens.first().copied(), &header) {
            (Some(kw @ ("td" | "dd")), None) => {
                if tokens.len() != 3 {
                    return Err(syntax(format!("expected '{kw} <nodes> <width>;'")));
                }
                let kind = if kw == "td" { DecompKind::Tree } else { DecompKind::Dag };
                let nodes = number(tokens[1])?;
                header = Some((kind, nodes, number(tokens[2])?));
                bags = vec![None; nodes];
            }
            (Some(_), None) => return Err(syntax("missing 'td' or 'dd' header".into())),
            (Some("b"), Some(_)) => {
                if tokens.len() < 2 || tokens.len() > 3 {
                    return Err(syntax("expected 'b <node> <v>(,<v>)*;'".into()));
                }
                let node = number(tokens[1])?;
                let slot = bags
                    .get_mut(node)
                    .ok_or_else(|| syntax(format!("node {node} out of range")))?;
                if slot.is_some() {
                    return Err(syntax(format!("bag {node} given twice")));
                }
                let vertices = match tokens.get(2) {
                    None => Vec::new(),
                    Some(list) => list.split(',').map(number).collect::<Result<Vec<_>>>()?,
                };
                *slot = Some(vertices);
            }
            (Some("e"), Some(_)) => {
                if tokens.len() != 3 {
                    return Err(syntax("expected 'e <i> <j>;'".into()));
                }
                let (a, b) = (number(tokens[1])?, number(tokens[2])?);
                if a >= bags.len() || b >= bags.len() {
                    return Err(syntax(format!("edge ({a}, {b}) names an unknown node")));
                }
                edges.push((a, b));
            }
            (Some("rooted"), Some(_)) => {
                if tokens.len() != 2 {
                    return Err(syntax("expected 'rooted <node>;'".into()));
                }
                let r = number(tokens[1])?;
                if r >= bags.len() {
                    return Err(syntax(format!("root {r} is not a node")));
                }
                root = Some(r);
            }
            _ => return Err(syntax(format!("unrecognised line '{line}'"))),
        }
    }
    let Some((kind, _, width)) = header else {
        return Err(Error::Syntax { line: 1, message: "empty decomposition file".into() });
    };
    let bags: Vec<Vec<Vertex>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or_else(|| Error::InvalidDecomposition(format!("bag {i} is missing")))
        })
        .collect::<Result<_>>()?;
    let actual = bags.iter().map(|b| {
        let mut s = b.clone();
        s.sort_unstable();
        s.dedup();
        s.len()
    });
    let actual = actual.max().unwrap_or(0);
    if actual != width {
        return Err(Error::InvalidDecomposition(format!(
            "header declares width {width} but the largest bag has {actual} vertices"
        )));
    }
    Ok(DecompositionFile { kind, bags, edges, root })
}

fn write_parts(
    out: &mut String,
    kind: &str,
    bags: &[Vec<Vertex>],
    edges: &[(usize, usize)],
    root: Option<usize>,
) {
    let width = bags.iter().map(Vec::len).max().unwrap_or(0);
    writeln!(out, "{kind} {} {width};", bags.len()).unwrap();
    for (i, bag) in bags.iter().enumerate() {
        if bag.is_empty() {
            writeln!(out, "b {i};").unwrap();
        } else {
            let list: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
            writeln!(out, "b {i} {};", list.join(",")).unwrap();
        }
    }
    for &(a, b) in edges {
        writeln!(out, "e {a} {b};").unwrap();
    }
    if let Some(r) = root {
        writeln!(out, "rooted {r};").unwrap();
    }
}

pub fn write_tree_decomposition(td: &TreeDecomposition, root: Option<usize>) -> String {
    let mut out = String::new();
    write_parts(&mut out, "td", td.bags(), td.edges(), root);
    out
}

pub fn write_rooted_decomposition(rtd: &RootedTreeDecomposition) -> String {
    write_tree_decomposition(rtd.base(), Some(rtd.root()))
}

pub fn write_dag_decomposition(dd: &DagDecomposition) -> String {
    let mut out = String::new();
    write_parts(&mut out, "dd", dd.bags(), dd.edges(), None);
    out
}
