//! Decision procedures for single theories behind one contract.
//!
//! A pure instance for a theory contains that theory's relational atoms plus
//! any `Eq`/`Neq` atoms. Every solver returns either `Unsat` or a [`Model`]
//! that can be replayed against each atom of the instance it decided.

mod digraph;
mod equality;
mod point_algebra;
mod temporal;
mod weak_order;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub(crate) use digraph::check_edge_atoms;
pub use digraph::{henson_decide, Digraph, DigraphModel, HensonSolver, TournamentSet, Vertex};
pub use equality::{eq_decide, EqualitySolver};
pub use point_algebra::{pa_decide, PointAlgebraSolver};
pub use temporal::{temporal_decide, TemporalSolver};
pub use weak_order::{relation_from_predicate, Rel3, TemporalRelation, WeakOrder, MAX_PREDICATE_ARITY};

use crate::error::{Result, SolveError};
use crate::formulas::{Atom, AtomKind, Instance, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

/// `Sat` carries a witness that can be checked against the decided instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult<W> {
    Sat(W),
    Unsat,
}

impl<W> SolveResult<W> {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn verdict(&self) -> Verdict {
        if self.is_sat() {
            Verdict::Sat
        } else {
            Verdict::Unsat
        }
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            SolveResult::Sat(w) => Some(w),
            SolveResult::Unsat => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> SolveResult<V> {
        match self {
            SolveResult::Sat(w) => SolveResult::Sat(f(w)),
            SolveResult::Unsat => SolveResult::Unsat,
        }
    }
}

/// A finite certificate assigning every variable of an instance a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    /// Equality theory: one block index per variable.
    Blocks(BTreeMap<Variable, usize>),
    /// Order theories: the rank of each variable in a weak order.
    Ranks(BTreeMap<Variable, usize>),
    /// Henson digraphs: a finite digraph and a vertex per variable.
    Digraph(DigraphModel),
}

/// A value as printed in witness output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Index(usize),
    Loop,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Index(i) => write!(f, "{i}"),
            Value::Loop => f.write_str("a"),
        }
    }
}

impl Model {
    pub fn value(&self, var: &Variable) -> Option<Value> {
        match self {
            Model::Blocks(m) | Model::Ranks(m) => m.get(var).map(|&i| Value::Index(i)),
            Model::Digraph(d) => d.assignment.get(var).map(|v| match v {
                Vertex::Loop => Value::Loop,
                Vertex::Node(i) => Value::Index(*i),
            }),
        }
    }

    pub fn variables(&self) -> Vec<Variable> {
        match self {
            Model::Blocks(m) | Model::Ranks(m) => m.keys().cloned().collect(),
            Model::Digraph(d) => d.assignment.keys().cloned().collect(),
        }
    }

    /// Whether two assigned variables receive the same value.
    pub fn same(&self, x: &Variable, y: &Variable) -> Option<bool> {
        Some(self.value(x)? == self.value(y)?)
    }

    /// Extends the model along a variable renaming: each key of `var_map`
    /// gets the value of its image.
    pub fn pull_back(&self, var_map: &BTreeMap<Variable, Variable>) -> Model {
        fn pull<T: Clone>(m: &BTreeMap<Variable, T>, var_map: &BTreeMap<Variable, Variable>) -> BTreeMap<Variable, T> {
            let mut out = m.clone();
            for (from, to) in var_map {
                if let Some(v) = m.get(to) {
                    out.insert(from.clone(), v.clone());
                }
            }
            out
        }
        match self {
            Model::Blocks(m) => Model::Blocks(pull(m, var_map)),
            Model::Ranks(m) => Model::Ranks(pull(m, var_map)),
            Model::Digraph(d) => Model::Digraph(DigraphModel {
                graph: d.graph.clone(),
                assignment: pull(&d.assignment, var_map),
            }),
        }
    }
}

/// Uniform contract for a decision procedure of one theory.
pub trait TheorySolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>>;

    /// Replays `model` against every atom of `inst`.
    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()>;

    /// `x = y` is entailed iff adding `x != y` makes the instance unsatisfiable.
    fn entails_eq(&self, inst: &Instance, x: &Variable, y: &Variable) -> Result<bool> {
        let probe = inst.with([Atom::neq(x.clone(), y.clone())]);
        Ok(!self.decide(&probe)?.is_sat())
    }
}

/// The built-in theories. Each variant owns its solver configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryKind {
    Equality,
    PointAlgebra,
    Temporal(TemporalSolver),
    Henson(HensonSolver),
}

impl TheoryKind {
    /// Arity of a relation symbol owned by this theory.
    pub fn arity_of(&self, name: &str) -> Option<usize> {
        match self {
            TheoryKind::Equality => None,
            TheoryKind::PointAlgebra => matches!(name, "lt" | "leq").then_some(2),
            TheoryKind::Temporal(t) => t.relation(name).map(|r| r.arity()),
            TheoryKind::Henson(_) => (name == "E").then_some(2),
        }
    }

    /// Relation symbol names owned by this theory, sorted.
    pub fn relation_names(&self) -> Vec<String> {
        match self {
            TheoryKind::Equality => vec![],
            TheoryKind::PointAlgebra => vec!["leq".into(), "lt".into()],
            TheoryKind::Temporal(t) => t.relation_names(),
            TheoryKind::Henson(_) => vec!["E".into()],
        }
    }

    pub fn default_convexity(&self) -> bool {
        matches!(self, TheoryKind::Equality | TheoryKind::PointAlgebra)
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            TheoryKind::Equality => "equality",
            TheoryKind::PointAlgebra => "point_algebra",
            TheoryKind::Temporal(_) => "temporal",
            TheoryKind::Henson(_) => "henson",
        }
    }

    fn solver(&self) -> &dyn TheorySolver {
        match self {
            TheoryKind::Equality => &EqualitySolver,
            TheoryKind::PointAlgebra => &PointAlgebraSolver,
            TheoryKind::Temporal(t) => t,
            TheoryKind::Henson(h) => h,
        }
    }
}

impl TheorySolver for TheoryKind {
    fn name(&self) -> &'static str {
        self.solver().name()
    }

    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>> {
        self.solver().decide(inst)
    }

    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()> {
        self.solver().check_model(inst, model)
    }
}

/// Checks Eq/Neq atoms against value equality and reports uncovered variables.
pub(crate) fn check_equalities(inst: &Instance, model: &Model) -> Result<()> {
    for var in inst.variables() {
        if model.value(&var).is_none() {
            return Err(SolveError::Witness(format!("variable {var} has no value")));
        }
    }
    for atom in inst.atoms() {
        let want_same = match atom.kind {
            AtomKind::Eq => true,
            AtomKind::Neq => false,
            AtomKind::Rel(_) => continue,
        };
        if model.same(&atom.args[0], &atom.args[1]) != Some(want_same) {
            return Err(SolveError::Witness(format!("{atom:?} is violated")));
        }
    }
    Ok(())
}

pub(crate) fn contract(solver: &'static str, atom: &Atom) -> SolveError {
    SolveError::Contract {
        solver,
        atom: format!("{atom:?}"),
    }
}

/// Sorted variable list with a name-to-index lookup.
pub(crate) struct VarIndex {
    pub vars: Vec<Variable>,
    index: BTreeMap<Variable, usize>,
}

impl VarIndex {
    pub fn new(inst: &Instance) -> Self {
        VarIndex::from_vars(inst.variables())
    }

    pub fn from_vars(vars: BTreeSet<Variable>) -> Self {
        let vars: Vec<Variable> = vars.into_iter().collect();
        let index = vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        VarIndex { vars, index }
    }

    pub fn of(&self, v: &Variable) -> usize {
        self.index[v]
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }
}
