//! Signatures, atoms and instances, plus the two structural rewrites every
//! solver relies on: equality collapse and splitting by signature.

mod parse;
mod render;

pub use parse::{parse_problem, ParseError, ParseErrorKind};
pub use render::render_problem;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::theories::TheoryKind;
use crate::union_find::UnionFind;

/// A variable name. Compared by exact string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        Variable(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Letters, digits and `_`, not starting with a digit.
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Variable {
    fn from(name: &str) -> Self {
        Variable::new(name)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoryId(Arc<str>);

impl TheoryId {
    pub fn new(name: impl AsRef<str>) -> Self {
        TheoryId(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TheoryId {
    fn from(name: &str) -> Self {
        TheoryId::new(name)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSymbol {
    pub theory: TheoryId,
    pub name: Arc<str>,
    pub arity: usize,
}

impl RelationSymbol {
    pub fn new(theory: impl Into<TheoryId>, name: &str, arity: usize) -> Self {
        assert!(arity >= 1, "relation symbols have positive arity");
        RelationSymbol {
            theory: theory.into(),
            name: Arc::from(name),
            arity,
        }
    }
}

impl fmt::Debug for RelationSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}/{}", self.theory, self.name, self.arity)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AtomKind {
    Rel(RelationSymbol),
    Eq,
    Neq,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    pub args: Vec<Variable>,
}

impl Atom {
    pub fn rel(symbol: RelationSymbol, args: Vec<Variable>) -> Self {
        assert_eq!(symbol.arity, args.len(), "arity mismatch for {symbol:?}");
        Atom {
            kind: AtomKind::Rel(symbol),
            args,
        }
    }

    pub fn eq(x: impl Into<Variable>, y: impl Into<Variable>) -> Self {
        Atom {
            kind: AtomKind::Eq,
            args: vec![x.into(), y.into()],
        }
    }

    pub fn neq(x: impl Into<Variable>, y: impl Into<Variable>) -> Self {
        Atom {
            kind: AtomKind::Neq,
            args: vec![x.into(), y.into()],
        }
    }

    pub fn symbol(&self) -> Option<&RelationSymbol> {
        match &self.kind {
            AtomKind::Rel(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_eq(&self) -> bool {
        matches!(self.kind, AtomKind::Eq)
    }

    pub fn is_neq(&self) -> bool {
        matches!(self.kind, AtomKind::Neq)
    }

    pub fn is_rel(&self) -> bool {
        matches!(self.kind, AtomKind::Rel(_))
    }

    fn renamed(&self, map: &BTreeMap<Variable, Variable>) -> Atom {
        Atom {
            kind: self.kind.clone(),
            args: self.args.iter().map(|v| map.get(v).unwrap_or(v).clone()).collect(),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AtomKind::Eq => write!(f, "{}={}", self.args[0], self.args[1]),
            AtomKind::Neq => write!(f, "{}!={}", self.args[0], self.args[1]),
            AtomKind::Rel(s) => {
                write!(f, "{}(", s.name)?;
                for (i, a) in self.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A finite conjunction of atoms. The variable set is derived from the atoms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    atoms: BTreeSet<Atom>,
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Instance {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.atoms.insert(atom)
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Atom>) -> Instance {
        let mut out = self.clone();
        out.atoms.extend(extra);
        out
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.atoms.iter().flat_map(|a| a.args.iter().cloned()).collect()
    }

    pub fn rename(&self, map: &BTreeMap<Variable, Variable>) -> Instance {
        Instance::from_atoms(self.atoms.iter().map(|a| a.renamed(map)))
    }

    pub fn is_subset(&self, other: &Instance) -> bool {
        self.atoms.is_subset(&other.atoms)
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms.iter()).finish()
    }
}

impl FromIterator<Atom> for Instance {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        Instance::from_atoms(iter)
    }
}

/// An existentially quantified conjunction with an ordered list of free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    free_vars: Vec<Variable>,
    existential_vars: BTreeSet<Variable>,
    body: Instance,
}

impl PPFormula {
    /// Every body variable not listed as free becomes existential.
    pub fn new(free_vars: Vec<Variable>, body: Instance) -> Result<Self, String> {
        let distinct: BTreeSet<_> = free_vars.iter().cloned().collect();
        if distinct.len() != free_vars.len() {
            return Err("free variables must be distinct".into());
        }
        let existential_vars = body.variables().into_iter().filter(|v| !distinct.contains(v)).collect();
        Ok(PPFormula {
            free_vars,
            existential_vars,
            body,
        })
    }

    pub fn free_vars(&self) -> &[Variable] {
        &self.free_vars
    }

    pub fn existential_vars(&self) -> &BTreeSet<Variable> {
        &self.existential_vars
    }

    pub fn body(&self) -> &Instance {
        &self.body
    }
}

/// A declared theory: its decision-procedure kind (which fixes the relation
/// symbols it owns) and whether it is declared convex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryDecl {
    pub kind: TheoryKind,
    pub convex: bool,
}

impl TheoryDecl {
    pub fn new(kind: TheoryKind) -> Self {
        let convex = kind.default_convexity();
        TheoryDecl { kind, convex }
    }

    pub fn with_convex(mut self, convex: bool) -> Self {
        self.convex = convex;
        self
    }
}

/// Theory declarations together with the instance to decide.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub theories: BTreeMap<TheoryId, TheoryDecl>,
    pub instance: Instance,
}

impl Problem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_theory(mut self, id: impl Into<TheoryId>, decl: TheoryDecl) -> Self {
        self.theories.insert(id.into(), decl);
        self
    }

    pub fn with_instance(mut self, instance: Instance) -> Self {
        self.instance = instance;
        self
    }

    /// Resolves `name/arity` to a symbol owned by theory `id`.
    pub fn symbol(&self, id: &str, name: &str) -> Option<RelationSymbol> {
        let (tid, decl) = self.theories.get_key_value(&TheoryId::new(id))?;
        let arity = decl.kind.arity_of(name)?;
        Some(RelationSymbol {
            theory: tid.clone(),
            name: Arc::from(name),
            arity,
        })
    }

    pub fn theory_ids(&self) -> Vec<TheoryId> {
        self.theories.keys().cloned().collect()
    }
}

/// Replaces every equality class by its lexicographically least member and
/// drops the `Eq` atoms. `Neq(v, v)` survives if both sides collapse.
pub fn collapse_equalities(inst: &Instance) -> (Instance, BTreeMap<Variable, Variable>) {
    let vars: Vec<Variable> = inst.variables().into_iter().collect();
    let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(vars.len());
    for atom in inst.atoms().filter(|a| a.is_eq()) {
        uf.union(index[&atom.args[0]], index[&atom.args[1]]);
    }
    // vars is sorted, so the first member seen of each class is the least
    let mut least: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..vars.len() {
        least.entry(uf.find(i)).or_insert(i);
    }
    let var_map: BTreeMap<Variable, Variable> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), vars[least[&uf.find(i)]].clone()))
        .collect();
    let collapsed = Instance::from_atoms(inst.atoms().filter(|a| !a.is_eq()).map(|a| a.renamed(&var_map)));
    (collapsed, var_map)
}

/// Result of routing atoms to their theories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub parts: BTreeMap<TheoryId, Instance>,
    pub shared: BTreeSet<Variable>,
}

/// Routes each relational atom to its theory and copies every `Eq`/`Neq`
/// atom into every part. A variable is shared when it occurs in relational
/// atoms of at least two distinct theories.
pub fn split_by_signature(inst: &Instance, theories: &[TheoryId]) -> Split {
    let mut parts: BTreeMap<TheoryId, Instance> = theories.iter().map(|t| (t.clone(), Instance::new())).collect();
    let mut owners: BTreeMap<&Variable, BTreeSet<&TheoryId>> = BTreeMap::new();
    for atom in inst.atoms() {
        match &atom.kind {
            AtomKind::Rel(sym) => {
                parts
                    .get_mut(&sym.theory)
                    .unwrap_or_else(|| panic!("atom {atom:?} belongs to no declared theory"))
                    .insert(atom.clone());
                for v in &atom.args {
                    owners.entry(v).or_default().insert(&sym.theory);
                }
            }
            AtomKind::Eq | AtomKind::Neq => {
                for part in parts.values_mut() {
                    part.insert(atom.clone());
                }
            }
        }
    }
    let shared = owners
        .into_iter()
        .filter(|(_, ts)| ts.len() >= 2)
        .map(|(v, _)| v.clone())
        .collect();
    Split { parts, shared }
}
