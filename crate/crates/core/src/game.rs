//! Parity games, the significance ordering on priorities, positional
//! strategies and the plays they induce.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a vertex in a [`ParityGame`]. Vertices are always dense, `0..n`.
pub type Vertex = usize;

/// A vertex priority. The derived `Ord` is the natural order on integers, which
/// is what `max` over a path uses; [`Priority::cmp_significance`] gives the
/// order in which Even prefers priorities.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Priority(pub u32);

impl Priority {
    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }

    /// Compares two priorities by how attractive they are to Even: every odd
    /// priority is below every even one, odd priorities descend and even
    /// priorities ascend.
    pub fn cmp_significance(self, other: Priority) -> Ordering {
        match (self.is_even(), other.is_even()) {
            (false, true) => Ordering::Less,
            (true, false) => Ordering::Greater,
            (true, true) => self.0.cmp(&other.0),
            (false, false) => other.0.cmp(&self.0),
        }
    }

    /// The player that wins a play whose largest recurring priority is `self`.
    pub fn winner(self) -> Owner {
        if self.is_even() {
            Owner::Even
        } else {
            Owner::Odd
        }
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Free-function form of [`Priority::cmp_significance`].
pub fn cmp_significance(a: Priority, b: Priority) -> Ordering {
    a.cmp_significance(b)
}

/// The two players.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Even,
    Odd,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Even => Owner::Odd,
            Owner::Odd => Owner::Even,
        }
    }

    /// PGSolver encoding: 0 for Even, 1 for Odd.
    pub fn index(self) -> u8 {
        match self {
            Owner::Even => 0,
            Owner::Odd => 1,
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Even => write!(f, "Even"),
            Owner::Odd => write!(f, "Odd"),
        }
    }
}

/// A structural problem found by [`validate_game`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DeadEnd(u64),
    DanglingEdge { from: u64, to: u64 },
    DuplicateId(u64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DeadEnd(v) => write!(f, "vertex {v} has no successors"),
            Violation::DanglingEdge { from, to } => {
                write!(f, "vertex {from} has an edge to unknown vertex {to}")
            }
            Violation::DuplicateId(v) => write!(f, "vertex id {v} declared twice"),
        }
    }
}

/// One vertex declaration as it appears in an input file, before ids are
/// checked and made dense.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexDecl {
    pub id: u64,
    pub priority: Priority,
    pub owner: Owner,
    pub successors: Vec<u64>,
    pub name: Option<String>,
}

/// Unchecked game description.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameSpec {
    pub vertices: Vec<VertexDecl>,
}

/// Reports dead ends, edges to undeclared ids and duplicate ids.
pub fn validate_game(spec: &GameSpec) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for decl in &spec.vertices {
        if !seen.insert(decl.id) {
            violations.push(Violation::DuplicateId(decl.id));
        }
    }
    for decl in &spec.vertices {
        if decl.successors.is_empty() {
            violations.push(Violation::DeadEnd(decl.id));
        }
        for &to in &decl.successors {
            if !seen.contains(&to) {
                violations.push(Violation::DanglingEdge { from: decl.id, to });
            }
        }
    }
    violations
}

impl GameSpec {
    /// Validates the description and renumbers vertices densely in increasing
    /// id order.
    pub fn build(&self) -> Result<ParityGame> {
        let violations = validate_game(self);
        if !violations.is_empty() {
            return Err(Error::InvalidGame(violations));
        }
        let mut order: Vec<&VertexDecl> = self.vertices.iter().collect();
        order.sort_by_key(|d| d.id);
        let index: BTreeMap<u64, Vertex> =
            order.iter().enumerate().map(|(i, d)| (d.id, i)).collect();
        let mut game = ParityGame::default();
        for decl in order {
            let successors = decl.successors.iter().map(|s| index[s]).collect();
            game.push_vertex(decl.owner, decl.priority, successors, decl.name.clone());
        }
        Ok(game)
    }
}

/// A finite parity game without dead ends. Vertices are `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    owners: Vec<Owner>,
    priorities: Vec<Priority>,
    successors: Vec<Vec<Vertex>>,
    names: Vec<Option<String>>,
}

impl ParityGame {
    /// Builds a game from parallel per-vertex arrays, rejecting dead ends and
    /// dangling edges.
    pub fn new(
        owners: Vec<Owner>,
        priorities: Vec<Priority>,
        successors: Vec<Vec<Vertex>>,
    ) -> Result<ParityGame> {
        let n = owners.len();
        if priorities.len() != n || successors.len() != n {
            return Err(Error::Precondition(
                "owner, priority and successor arrays differ in length".into(),
            ));
        }
        let spec = GameSpec {
            vertices: (0..n)
                .map(|v| VertexDecl {
                    id: v as u64,
                    priority: priorities[v],
                    owner: owners[v],
                    successors: successors[v].iter().map(|&s| s as u64).collect(),
                    name: None,
                })
                .collect(),
        };
        spec.build()
    }

    /// Convenience constructor used heavily in tests: `(owner, priority, successors)`.
    pub fn from_rows(rows: &[(Owner, u32, &[Vertex])]) -> Result<ParityGame> {
        ParityGame::new(
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| Priority(r.1)).collect(),
            rows.iter().map(|r| r.2.to_vec()).collect(),
        )
    }

    fn push_vertex(
        &mut self,
        owner: Owner,
        priority: Priority,
        successors: Vec<Vertex>,
        name: Option<String>,
    ) {
        self.owners.push(owner);
        self.priorities.push(priority);
        self.successors.push(successors);
        self.names.push(name);
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    pub fn owner(&self, v: Vertex) -> Owner {
        self.owners[v]
    }

    pub fn priority(&self, v: Vertex) -> Priority {
        self.priorities[v]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.successors[v]
    }

    pub fn name(&self, v: Vertex) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn set_name(&mut self, v: Vertex, name: Option<String>) {
        self.names[v] = name;
    }

    pub fn has_edge(&self, from: Vertex, to: Vertex) -> bool {
        self.successors[from].contains(&to)
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// The priorities that occur in the game, ascending.
    pub fn priority_set(&self) -> Vec<Priority> {
        let set: BTreeSet<Priority> = self.priorities.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn predecessors(&self) -> Vec<Vec<Vertex>> {
        let mut preds = vec![Vec::new(); self.len()];
        for v in self.vertices() {
            for &u in &self.successors[v] {
                preds[u].push(v);
            }
        }
        preds
    }

    /// Back to an unchecked description, keeping names.
    pub fn to_spec(&self) -> GameSpec {
        GameSpec {
            vertices: self
                .vertices()
                .map(|v| VertexDecl {
                    id: v as u64,
                    priority: self.priorities[v],
                    owner: self.owners[v],
                    successors: self.successors[v].iter().map(|&s| s as u64).collect(),
                    name: self.names[v].clone(),
                })
                .collect(),
        }
    }
}

/// A positional strategy: one chosen successor for every vertex of `owner`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    owner: Owner,
    choice: Vec<Option<Vertex>>,
}

impl Strategy {
    /// `choice[v]` must be `Some` exactly for the owner's vertices.
    pub fn new(game: &ParityGame, owner: Owner, choice: Vec<Option<Vertex>>) -> Result<Strategy> {
        let strategy = Strategy { owner, choice };
        strategy.check(game)?;
        Ok(strategy)
    }

    /// Builds a strategy by asking `pick` for the successor of every owned vertex.
    pub fn from_fn(
        game: &ParityGame,
        owner: Owner,
        mut pick: impl FnMut(Vertex) -> Vertex,
    ) -> Result<Strategy> {
        let choice = game
            .vertices()
            .map(|v| (game.owner(v) == owner).then(|| pick(v)))
            .collect();
        Strategy::new(game, owner, choice)
    }

    /// Picks the first listed successor everywhere.
    pub fn first_successor(game: &ParityGame, owner: Owner) -> Strategy {
        Strategy::from_fn(game, owner, |v| game.successors(v)[0])
            .expect("first successor is always a valid choice")
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    /// The chosen successor of an owned vertex.
    pub fn choice(&self, v: Vertex) -> Option<Vertex> {
        self.choice.get(v).copied().flatten()
    }

    pub fn check(&self, game: &ParityGame) -> Result<()> {
        if self.choice.len() != game.len() {
            return Err(Error::InvalidStrategy(format!(
                "strategy covers {} vertices, game has {}",
                self.choice.len(),
                game.len()
            )));
        }
        for v in game.vertices() {
            match (game.owner(v) == self.owner, self.choice[v]) {
                (true, None) => {
                    return Err(Error::InvalidStrategy(format!("no choice at vertex {v}")))
                }
                (true, Some(u)) if !game.has_edge(v, u) => {
                    return Err(Error::InvalidStrategy(format!("({v}, {u}) is not an edge")))
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidStrategy(format!(
                        "vertex {v} is not owned by {}",
                        self.owner
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Keeps every edge of the opponent and only the chosen edge of the
/// strategy owner.
pub fn restrict(game: &ParityGame, strategy: &Strategy) -> Result<ParityGame> {
    strategy.check(game)?;
    let mut restricted = game.clone();
    for v in game.vertices() {
        if let Some(u) = strategy.choice(v) {
            restricted.successors[v] = vec![u];
        }
    }
    Ok(restricted)
}

/// An eventually periodic play: `prefix` followed by `cycle` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    /// The priorities seen infinitely often.
    pub fn recurring_priorities(&self, game: &ParityGame) -> BTreeSet<Priority> {
        self.cycle.iter().map(|&v| game.priority(v)).collect()
    }

    pub fn winner(&self, game: &ParityGame) -> Owner {
        self.recurring_priorities(game)
            .last()
            .expect("a lasso cycle is never empty")
            .winner()
    }
}

/// Follows both strategies from `start` until a vertex repeats.
pub fn play(
    game: &ParityGame,
    start: Vertex,
    even: &Strategy,
    odd: &Strategy,
) -> Result<(Lasso, Owner)> {
    if start >= game.len() {
        return Err(Error::UnknownVertex(start));
    }
    if even.owner() != Owner::Even || odd.owner() != Owner::Odd {
        return Err(Error::InvalidStrategy("strategies passed for the wrong players".into()));
    }
    even.check(game)?;
    odd.check(game)?;
    let mut position = vec![usize::MAX; game.len()];
    let mut path = Vec::new();
    let mut v = start;
    while position[v] == usize::MAX {
        position[v] = path.len();
        path.push(v);
        v = match game.owner(v) {
            Owner::Even => even.choice(v),
            Owner::Odd => odd.choice(v),
        }
        .expect("checked strategies are total");
    }
    let cycle = path.split_off(position[v]);
    let lasso = Lasso { prefix: path, cycle };
    let winner = lasso.winner(game);
    Ok((lasso, winner))
}
