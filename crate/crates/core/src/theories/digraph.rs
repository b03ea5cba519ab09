//! Henson digraphs: oriented loopless digraphs omitting a fixed finite set of
//! tournaments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{check_equalities, contract, Model, SolveResult, TheorySolver, VarIndex};
use crate::error::{Result, SolveError};
use crate::formulas::{collapse_equalities, AtomKind, Instance, Variable};

/// A finite digraph on vertices `0..labels.len()`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digraph {
    labels: Vec<String>,
    arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn new(labels: Vec<String>, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let arcs: BTreeSet<_> = arcs.into_iter().collect();
        if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u >= labels.len() || v >= labels.len()) {
            return Err(SolveError::InvalidArgument(format!(
                "arc ({u}, {v}) leaves the vertex set"
            )));
        }
        Ok(Digraph { labels, arcs })
    }

    /// Vertices labelled `0..n`.
    pub fn unlabelled(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Digraph::new((0..n).map(|i| i.to_string()).collect(), arcs)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn is_tournament(&self) -> bool {
        let n = self.order();
        (0..n).all(|u| !self.has_arc(u, u))
            && (0..n).all(|u| ((u + 1)..n).all(|v| self.has_arc(u, v) != self.has_arc(v, u)))
    }

    /// No loops and no pair joined in both directions.
    pub fn is_oriented(&self) -> bool {
        self.arcs.iter().all(|&(u, v)| u != v && !self.has_arc(v, u))
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.order();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &self.arcs {
            adj[u][v] = true;
        }
        adj
    }

    /// Parses `a>b,b>c,c>a`: each `u>v` is an arc from `u` to `v`.
    pub fn parse_tournament(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut arcs = Vec::new();
        let index = |name: &str, labels: &mut Vec<String>| {
            labels.iter().position(|l| l == name).unwrap_or_else(|| {
                labels.push(name.to_string());
                labels.len() - 1
            })
        };
        for arc in text.split(',') {
            let (u, v) = arc
                .split_once('>')
                .filter(|(u, v)| Variable::is_valid_name(u) && Variable::is_valid_name(v))
                .ok_or_else(|| SolveError::InvalidArgument(format!("bad arc `{arc}`")))?;
            let (u, v) = (index(u, &mut labels), index(v, &mut labels));
            arcs.push((u, v));
        }
        // relabel in sorted label order so equal arc lists compare equal
        let mut sorted = labels.clone();
        sorted.sort();
        let pos = |i: usize| sorted.iter().position(|l| *l == labels[i]).expect("label present");
        let arcs: Vec<_> = arcs.into_iter().map(|(u, v)| (pos(u), pos(v))).collect();
        let g = Digraph::new(sorted, arcs)?;
        if g.order() < 2 || !g.is_tournament() {
            return Err(SolveError::InvalidArgument(format!("`{text}` is not a tournament")));
        }
        Ok(g)
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Arc list in the `u>v,...` syntax.
impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(u, v)) in self.arcs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}>{}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }
}

/// The forbidden tournaments of a Henson digraph.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TournamentSet {
    tournaments: Vec<Digraph>,
}

impl TournamentSet {
    pub fn new(tournaments: Vec<Digraph>) -> Result<Self> {
        if let Some(bad) = tournaments.iter().find(|t| t.order() < 2 || !t.is_tournament()) {
            return Err(SolveError::InvalidArgument(format!("{bad} is not a tournament")));
        }
        Ok(TournamentSet { tournaments })
    }

    /// Semicolon-separated tournaments.
    pub fn parse(text: &str) -> Result<Self> {
        TournamentSet::new(text.split(';').map(Digraph::parse_tournament).collect::<Result<_>>()?)
    }

    /// The directed 3-cycle.
    pub fn c3() -> Self {
        TournamentSet::parse("a>b,b>c,c>a").expect("valid tournament")
    }

    /// The transitive tournament on three vertices.
    pub fn transitive3() -> Self {
        TournamentSet::parse("a>b,b>c,a>c").expect("valid tournament")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Digraph> + '_ {
        self.tournaments.iter()
    }
}

impl fmt::Display for TournamentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tournaments.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// An injective map from `pattern` into the digraph `adj` that matches every
/// pattern arc and no reverse arc.
pub(crate) fn find_embedding(pattern: &Digraph, adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    fn extend(pattern: &Digraph, adj: &[Vec<bool>], image: &mut Vec<usize>) -> bool {
        let u = image.len();
        if u == pattern.order() {
            return true;
        }
        for cand in 0..adj.len() {
            if image.contains(&cand) {
                continue;
            }
            let fits = image
                .iter()
                .enumerate()
                .all(|(w, &img)| adj[cand][img] == pattern.has_arc(u, w) && adj[img][cand] == pattern.has_arc(w, u));
            if fits {
                image.push(cand);
                if extend(pattern, adj, image) {
                    return true;
                }
                image.pop();
            }
        }
        false
    }
    let mut image = Vec::with_capacity(pattern.order());
    extend(pattern, adj, &mut image).then_some(image)
}

/// A vertex of a Henson digraph witness, or the extra looped vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Loop,
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphModel {
    /// The finite digraph realising the asserted arcs. The loop vertex, when
    /// used, is not part of it: it carries only its own loop.
    pub graph: Digraph,
    pub assignment: BTreeMap<Variable, Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HensonSolver {
    pub forbidden: TournamentSet,
    /// Adds an isolated vertex `a` with `E(a, a)`.
    pub loop_vertex: bool,
}

impl HensonSolver {
    pub fn new(forbidden: TournamentSet) -> Self {
        HensonSolver {
            forbidden,
            loop_vertex: false,
        }
    }

    pub fn with_loop_vertex(forbidden: TournamentSet) -> Self {
        HensonSolver {
            forbidden,
            loop_vertex: true,
        }
    }
}

pub(crate) fn check_edge_atoms(inst: &Instance) -> Result<()> {
    for atom in inst.atoms() {
        if let AtomKind::Rel(sym) = &atom.kind {
            if &*sym.name != "E" || atom.args.len() != 2 {
                return Err(contract("henson", atom));
            }
        }
    }
    Ok(())
}

/// Decides an instance over `E`, `=`, `!=` in the Henson digraph omitting
/// `forbidden`.
///
/// After collapsing equalities the instance is unsatisfiable exactly when it
/// has a reflexive disequality, a loop, a pair of opposite arcs, or an
/// induced copy of a forbidden tournament. Otherwise the asserted arcs
/// themselves form a witness.
pub fn henson_decide(inst: &Instance, forbidden: &TournamentSet) -> Result<SolveResult<Model>> {
    check_edge_atoms(inst)?;
    let (collapsed, var_map) = collapse_equalities(inst);
    let vars = VarIndex::from_vars(var_map.values().cloned().collect());
    let n = vars.len();
    let mut adj = vec![vec![false; n]; n];
    for atom in collapsed.atoms() {
        let (a, b) = (vars.of(&atom.args[0]), vars.of(&atom.args[1]));
        match atom.kind {
            AtomKind::Neq if a == b => return Ok(SolveResult::Unsat),
            AtomKind::Rel(_) => {
                if a == b {
                    return Ok(SolveResult::Unsat);
                }
                adj[a][b] = true;
            }
            _ => {}
        }
    }
    if (0..n).any(|a| ((a + 1)..n).any(|b| adj[a][b] && adj[b][a])) {
        return Ok(SolveResult::Unsat);
    }
    if forbidden.iter().any(|t| find_embedding(t, &adj).is_some()) {
        return Ok(SolveResult::Unsat);
    }
    let arcs = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| adj[a][b]);
    let graph = Digraph::new(vars.vars.iter().map(|v| v.to_string()).collect(), arcs)?;
    let assignment = vars
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Vertex::Node(i)))
        .collect();
    let model = Model::Digraph(DigraphModel { graph, assignment });
    Ok(SolveResult::Sat(model.pull_back(&var_map)))
}

impl TheorySolver for HensonSolver {
    fn name(&self) -> &'static str {
        if self.loop_vertex {
            "henson with loop vertex"
        } else {
            "henson"
        }
    }

    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>> {
        if self.loop_vertex {
            crate::henson::component_label_solve(inst, &self.forbidden)
        } else {
            henson_decide(inst, &self.forbidden)
        }
    }

    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()> {
        check_edge_atoms(inst)?;
        let Model::Digraph(d) = model else {
            return Err(SolveError::Witness("henson theory expects a digraph".into()));
        };
        if !d.graph.is_oriented() {
            return Err(SolveError::Witness(
                "witness digraph has a loop or opposite arcs".into(),
            ));
        }
        let adj = d.graph.adjacency();
        if let Some(t) = self.forbidden.iter().find(|t| find_embedding(t, &adj).is_some()) {
            return Err(SolveError::Witness(format!("witness digraph embeds {t}")));
        }
        for v in d.assignment.values() {
            match v {
                Vertex::Loop if !self.loop_vertex => {
                    return Err(SolveError::Witness("loop vertex is not available".into()))
                }
                Vertex::Node(i) if *i >= d.graph.order() => {
                    return Err(SolveError::Witness(format!("vertex {i} does not exist")))
                }
                _ => {}
            }
        }
        check_equalities(inst, model)?;
        for atom in inst.atoms().filter(|a| a.is_rel()) {
            let ok = match (d.assignment[&atom.args[0]], d.assignment[&atom.args[1]]) {
                (Vertex::Loop, Vertex::Loop) => true,
                (Vertex::Node(a), Vertex::Node(b)) => d.graph.has_arc(a, b),
                _ => false,
            };
            if !ok {
                return Err(SolveError::Witness(format!("{atom:?} is violated")));
            }
        }
        Ok(())
    }
}
