//! Nelson-Oppen style combination.
//!
//! The instance is first collapsed along its `Eq` atoms and split into one
//! pure part per theory. Two procedures decide the result:
//!
//! * [`solve_convex`] propagates entailed equalities between interface
//!   variables until no theory entails a new one. Complete when every theory
//!   is convex.
//! * [`solve_complete`] searches arrangements (equality patterns) of the
//!   interface variables. Once the interface variables are fixed pairwise
//!   equal or distinct, each theory can be checked on its own; this holds for
//!   every theory pair shipped here.
//!
//! The interface is every variable that can occur in two parts: variables in
//! relational atoms of two theories, plus every variable of an `Eq`/`Neq`
//! atom, since those atoms are copied into all parts.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Result, SolveError};
use crate::formulas::{
    collapse_equalities, split_by_signature, Atom, Instance, Problem, TheoryDecl, TheoryId, Variable,
};
use crate::oracle::PartitionIterator;
use crate::theories::{Model, SolveResult, TheoryKind, TheorySolver};
use crate::union_find::UnionFind;

/// Theory id used for the implicit equality theory of a problem that
/// declares none.
pub const IMPLICIT_EQUALITY: &str = "_eq";

/// Per-theory models plus the equality pattern of the interface variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedWitness {
    /// Block index per variable; variables in one block are equal.
    pub arrangement: BTreeMap<Variable, usize>,
    pub models: BTreeMap<TheoryId, Model>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Explore arrangements concurrently. Verdicts are unaffected; the
    /// witness may differ from the sequential one.
    pub parallel: bool,
}

/// A problem prepared for combination.
#[derive(Clone, Debug)]
pub struct CombinedProblem {
    problem: Problem,
    collapsed: Instance,
    var_map: BTreeMap<Variable, Variable>,
    parts: BTreeMap<TheoryId, Instance>,
    shared: BTreeSet<Variable>,
    interface: Vec<Variable>,
    /// Representatives that occur only in `Eq` atoms.
    vanished: Vec<Variable>,
}

/// Adds an equality theory when none is declared, so `Eq`/`Neq` atoms
/// always belong to some part.
pub fn with_implicit_theory(problem: &Problem) -> Problem {
    let mut p = problem.clone();
    if p.theories.is_empty() {
        p.theories
            .insert(TheoryId::new(IMPLICIT_EQUALITY), TheoryDecl::new(TheoryKind::Equality));
    }
    p
}

impl CombinedProblem {
    pub fn new(problem: Problem) -> Result<Self> {
        let problem = with_implicit_theory(&problem);
        for atom in problem.instance.atoms() {
            if let Some(sym) = atom.symbol() {
                let decl = problem
                    .theories
                    .get(&sym.theory)
                    .ok_or_else(|| SolveError::UnknownTheory(sym.theory.to_string()))?;
                match decl.kind.arity_of(&sym.name) {
                    None => return Err(SolveError::UnresolvedRelation(sym.name.to_string())),
                    Some(k) if k != atom.args.len() => {
                        return Err(SolveError::ArityMismatch {
                            name: sym.name.to_string(),
                            expected: k,
                            found: atom.args.len(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        let (collapsed, var_map) = collapse_equalities(&problem.instance);
        let split = split_by_signature(&collapsed, &problem.theory_ids());
        let present = collapsed.variables();
        let mut interface: BTreeSet<Variable> = BTreeSet::new();
        if problem.theories.len() >= 2 {
            interface.extend(split.shared.iter().cloned());
            for atom in problem.instance.atoms().filter(|a| !a.is_rel()) {
                interface.extend(atom.args.iter().map(|v| var_map[v].clone()));
            }
        }
        let vanished = var_map
            .values()
            .filter(|r| !present.contains(*r) && !interface.contains(*r))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(CombinedProblem {
            problem,
            collapsed,
            var_map,
            parts: split.parts,
            shared: split.shared,
            interface: interface.into_iter().collect(),
            vanished,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn collapsed(&self) -> &Instance {
        &self.collapsed
    }

    pub fn var_map(&self) -> &BTreeMap<Variable, Variable> {
        &self.var_map
    }

    pub fn parts(&self) -> &BTreeMap<TheoryId, Instance> {
        &self.parts
    }

    /// Variables in relational atoms of at least two theories.
    pub fn shared(&self) -> &BTreeSet<Variable> {
        &self.shared
    }

    /// The variables whose equality pattern the engines decide.
    pub fn interface(&self) -> &[Variable] {
        &self.interface
    }

    pub fn solver(&self, tid: &TheoryId) -> &TheoryKind {
        &self.problem.theories[tid].kind
    }

    pub fn is_convex(&self, tid: &TheoryId) -> bool {
        self.problem.theories[tid].convex
    }

    fn all_convex(&self) -> bool {
        self.problem.theories.values().all(|d| d.convex)
    }

    /// Decides every part extended by `extra`, stopping at the first
    /// unsatisfiable one.
    fn decide_parts(&self, extra: &[Atom]) -> Result<Option<BTreeMap<TheoryId, Model>>> {
        let mut models = BTreeMap::new();
        for (tid, part) in &self.parts {
            match self.solver(tid).decide(&part.with(extra.iter().cloned()))? {
                SolveResult::Sat(m) => {
                    models.insert(tid.clone(), m);
                }
                SolveResult::Unsat => return Ok(None),
            }
        }
        Ok(Some(models))
    }

    /// Assembles a witness over the original variables from models of the
    /// parts decided with the atoms induced by a full arrangement.
    fn witness(&self, blocks: &BTreeMap<Variable, usize>, models: BTreeMap<TheoryId, Model>) -> CombinedWitness {
        let models = models
            .into_iter()
            .map(|(tid, m)| (tid, m.pull_back(&self.var_map)))
            .collect();
        let arrangement = self
            .var_map
            .iter()
            .filter_map(|(v, rep)| blocks.get(rep).map(|&b| (v.clone(), b)))
            .collect();
        CombinedWitness { arrangement, models }
    }
}

/// Atoms induced by a partition of the interface given as a block index per
/// interface variable: `Eq` inside blocks (including the reflexive ones, so
/// every interface variable occurs) and `Neq` between block leaders.
fn arrangement_atoms(vars: &[Variable], block: &[usize]) -> Vec<Atom> {
    let mut leader: BTreeMap<usize, &Variable> = BTreeMap::new();
    let mut atoms = Vec::new();
    for (v, &b) in vars.iter().zip(block) {
        let l = *leader.entry(b).or_insert(v);
        atoms.push(Atom::eq(l.clone(), v.clone()));
    }
    let leaders: Vec<&Variable> = leader.values().copied().collect();
    for (i, a) in leaders.iter().enumerate() {
        for b in &leaders[i + 1..] {
            atoms.push(Atom::neq((*a).clone(), (*b).clone()));
        }
    }
    atoms
}

fn presence_atoms(vars: &[Variable]) -> impl Iterator<Item = Atom> + '_ {
    vars.iter().map(|v| Atom::eq(v.clone(), v.clone()))
}

fn normalize(block: &[usize]) -> Vec<usize> {
    let mut renumber = BTreeMap::new();
    block
        .iter()
        .map(|b| {
            let next = renumber.len();
            *renumber.entry(*b).or_insert(next)
        })
        .collect()
}

/// One round of equality propagation: every `Eq(x, y)` between interface
/// variables, not already implied by `learned`, that some theory's part
/// together with `learned` entails. Empty at a fixpoint.
pub fn propagate_step(problem: &CombinedProblem, learned: &BTreeSet<Atom>) -> Result<BTreeSet<Atom>> {
    let vars = problem.interface();
    let idx: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(vars.len());
    for a in learned {
        if let (Some(&i), Some(&j)) = (idx.get(&a.args[0]), idx.get(&a.args[1])) {
            uf.union(i, j);
        }
    }
    let mut found = BTreeSet::new();
    for (tid, part) in problem.parts() {
        let solver = problem.solver(tid);
        // learned equalities are applied by substitution
        let (inst, var_map) = collapse_equalities(&part.with(learned.iter().cloned()));
        let present = inst.variables();
        for i in 0..vars.len() {
            for j in (i + 1)..vars.len() {
                if uf.same(i, j) {
                    continue;
                }
                let (Some(x), Some(y)) = (var_map.get(&vars[i]), var_map.get(&vars[j])) else {
                    continue;
                };
                if x == y || !present.contains(x) || !present.contains(y) {
                    continue;
                }
                if solver.entails_eq(&inst, x, y)? {
                    debug_assert!(solver.entails_eq(&part.with(learned.iter().cloned()), &vars[i], &vars[j])?);
                    found.insert(Atom::eq(vars[i].clone(), vars[j].clone()));
                }
            }
        }
    }
    Ok(found)
}

/// Equality propagation to fixpoint. Requires every theory to be declared
/// convex.
pub fn solve_convex(problem: &CombinedProblem) -> Result<SolveResult<CombinedWitness>> {
    if let Some(tid) = problem.problem.theories.iter().find(|(_, d)| !d.convex).map(|(t, _)| t) {
        return Err(SolveError::ConvexityNotDeclared(tid.clone()));
    }
    let mut learned: BTreeSet<Atom> = BTreeSet::new();
    loop {
        for (tid, part) in problem.parts() {
            let (inst, _) = collapse_equalities(&part.with(learned.iter().cloned()));
            if !problem.solver(tid).decide(&inst)?.is_sat() {
                return Ok(SolveResult::Unsat);
            }
        }
        let new = propagate_step(problem, &learned)?;
        if new.is_empty() {
            break;
        }
        learned.extend(new);
    }

    // Everything not entailed equal is made distinct; convexity guarantees
    // each part stays satisfiable.
    let vars = problem.interface();
    let idx: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(vars.len());
    for a in &learned {
        uf.union(idx[&a.args[0]], idx[&a.args[1]]);
    }
    let block = normalize(&(0..vars.len()).map(|i| uf.find(i)).collect::<Vec<_>>());
    let mut extra = arrangement_atoms(vars, &block);
    extra.extend(presence_atoms(&problem.vanished));
    let mut models = BTreeMap::new();
    for (tid, part) in problem.parts() {
        match problem.solver(tid).decide(&part.with(extra.iter().cloned()))? {
            SolveResult::Sat(m) => {
                models.insert(tid.clone(), m);
            }
            SolveResult::Unsat => return Err(SolveError::ConvexityRefuted(tid.clone())),
        }
    }
    let blocks = vars.iter().cloned().zip(block).collect();
    Ok(SolveResult::Sat(problem.witness(&blocks, models)))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairStatus {
    Same,
    Distinct,
}

struct ArrangementSearch<'a> {
    problem: &'a CombinedProblem,
    vars: &'a [Variable],
}

impl ArrangementSearch<'_> {
    /// Classes and decided disequalities implied by the pair decisions.
    fn closure(&self, decided: &BTreeMap<(usize, usize), PairStatus>) -> (UnionFind, Vec<(usize, usize)>) {
        let mut uf = UnionFind::new(self.vars.len());
        for (&(i, j), &s) in decided {
            if s == PairStatus::Same {
                uf.union(i, j);
            }
        }
        let distinct = decided
            .iter()
            .filter(|(_, &s)| s == PairStatus::Distinct)
            .map(|(&(i, j), _)| (i, j))
            .collect();
        (uf, distinct)
    }

    fn atoms(&self, decided: &BTreeMap<(usize, usize), PairStatus>) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = decided
            .iter()
            .map(|(&(i, j), &s)| {
                let (x, y) = (self.vars[i].clone(), self.vars[j].clone());
                match s {
                    PairStatus::Same => Atom::eq(x, y),
                    PairStatus::Distinct => Atom::neq(x, y),
                }
            })
            .collect();
        atoms.extend(presence_atoms(self.vars));
        atoms.extend(presence_atoms(&self.problem.vanished));
        atoms
    }

    fn undecided(&self, uf: &mut UnionFind, distinct: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let n = self.vars.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if uf.same(i, j) {
                    continue;
                }
                let (ri, rj) = (uf.find(i), uf.find(j));
                let separated = distinct.iter().any(|&(a, b)| {
                    let (ra, rb) = (uf.find(a), uf.find(b));
                    (ra == ri && rb == rj) || (ra == rj && rb == ri)
                });
                if !separated {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn search(&self, mut decided: BTreeMap<(usize, usize), PairStatus>) -> Result<Option<CombinedWitness>> {
        loop {
            let atoms = self.atoms(&decided);
            let Some(models) = self.problem.decide_parts(&atoms)? else {
                return Ok(None);
            };
            let (mut uf, distinct) = self.closure(&decided);
            let open = self.undecided(&mut uf, &distinct);
            if open.is_empty() {
                let block = normalize(&(0..self.vars.len()).map(|i| uf.find(i)).collect::<Vec<_>>());
                let blocks = self.vars.iter().cloned().zip(block).collect();
                return Ok(Some(self.problem.witness(&blocks, models)));
            }

            // Prune with entailed equalities: their `Neq` branch is dead.
            let mut forced = None;
            'find: for (tid, part) in self.problem.parts() {
                let inst = part.with(atoms.iter().cloned());
                for &(i, j) in &open {
                    if self
                        .problem
                        .solver(tid)
                        .entails_eq(&inst, &self.vars[i], &self.vars[j])?
                    {
                        forced = Some((i, j));
                        break 'find;
                    }
                }
            }
            if let Some(pair) = forced {
                decided.insert(pair, PairStatus::Same);
                continue;
            }

            let pair = open[0];
            for status in [PairStatus::Same, PairStatus::Distinct] {
                let mut branch = decided.clone();
                branch.insert(pair, status);
                if let Some(w) = self.search(branch)? {
                    return Ok(Some(w));
                }
            }
            return Ok(None);
        }
    }
}

/// Complete search over arrangements of the interface variables.
pub fn solve_complete(problem: &CombinedProblem) -> Result<SolveResult<CombinedWitness>> {
    solve_complete_with(problem, SolveOptions::default())
}

pub fn solve_complete_with(problem: &CombinedProblem, options: SolveOptions) -> Result<SolveResult<CombinedWitness>> {
    let vars = problem.interface();
    if options.parallel && vars.len() >= 2 {
        if let Ok(partitions) = PartitionIterator::new(vars.len()) {
            let partitions: Vec<Vec<usize>> = partitions.collect();
            let found = partitions
                .par_iter()
                .map(|block| -> Result<Option<CombinedWitness>> {
                    let mut extra = arrangement_atoms(vars, block);
                    extra.extend(presence_atoms(&problem.vanished));
                    Ok(problem.decide_parts(&extra)?.map(|models| {
                        let blocks = vars.iter().cloned().zip(block.iter().copied()).collect();
                        problem.witness(&blocks, models)
                    }))
                })
                .find_any(|r| !matches!(r, Ok(None)));
            return match found {
                Some(Ok(Some(w))) => Ok(SolveResult::Sat(w)),
                Some(Err(e)) => Err(e),
                _ => Ok(SolveResult::Unsat),
            };
        }
    }
    let search = ArrangementSearch { problem, vars };
    Ok(match search.search(BTreeMap::new())? {
        Some(w) => SolveResult::Sat(w),
        None => SolveResult::Unsat,
    })
}

/// Convex propagation when every theory is declared convex, arrangement
/// search otherwise.
pub fn solve_auto(problem: &CombinedProblem) -> Result<SolveResult<CombinedWitness>> {
    solve_auto_with(problem, SolveOptions::default())
}

pub fn solve_auto_with(problem: &CombinedProblem, options: SolveOptions) -> Result<SolveResult<CombinedWitness>> {
    if problem.all_convex() {
        solve_convex(problem)
    } else {
        solve_complete_with(problem, options)
    }
}

/// Replays a combined witness against the original problem: every model
/// satisfies its theory's part, and models and arrangement agree on which
/// common variables are equal.
pub fn check_combined_witness(problem: &Problem, witness: &CombinedWitness) -> Result<()> {
    let problem = with_implicit_theory(problem);
    let split = split_by_signature(&problem.instance, &problem.theory_ids());
    for (tid, part) in &split.parts {
        let model = witness
            .models
            .get(tid)
            .ok_or_else(|| SolveError::Witness(format!("no model for theory {tid}")))?;
        problem.theories[tid].kind.check_model(part, model)?;
    }
    let domains: Vec<(&TheoryId, BTreeSet<Variable>)> = split.parts.iter().map(|(t, p)| (t, p.variables())).collect();
    for (a, (ta, va)) in domains.iter().enumerate() {
        for (tb, vb) in &domains[a + 1..] {
            let common: Vec<&Variable> = va.intersection(vb).collect();
            for (i, x) in common.iter().enumerate() {
                for y in &common[i + 1..] {
                    if witness.models[*ta].same(x, y) != witness.models[*tb].same(x, y) {
                        return Err(SolveError::Witness(format!(
                            "models of {ta} and {tb} disagree on whether {x} = {y}"
                        )));
                    }
                }
            }
        }
    }
    let arranged: Vec<(&Variable, usize)> = witness.arrangement.iter().map(|(v, &b)| (v, b)).collect();
    for (tid, model) in &witness.models {
        for (i, &(x, bx)) in arranged.iter().enumerate() {
            for &(y, by) in &arranged[i + 1..] {
                if let Some(same) = model.same(x, y) {
                    if same != (bx == by) {
                        return Err(SolveError::Witness(format!(
                            "model of {tid} contradicts the arrangement on {x}, {y}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::RelationSymbol;
    use crate::theories::{TemporalSolver, Verdict};

    fn pa(t: &str, rel: &str, a: &str, b: &str) -> Atom {
        Atom::rel(RelationSymbol::new(t, rel, 2), vec![a.into(), b.into()])
    }

    fn mi(t: &str, a: &str, b: &str, c: &str) -> Atom {
        Atom::rel(RelationSymbol::new(t, "mi", 3), vec![a.into(), b.into(), c.into()])
    }

    fn pa_eq(atoms: Vec<Atom>) -> Problem {
        Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_theory("t2", TheoryDecl::new(TheoryKind::Equality))
            .with_instance(Instance::from_atoms(atoms))
    }

    fn two_orders(atoms: Vec<Atom>) -> Problem {
        Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_theory("t2", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_instance(Instance::from_atoms(atoms))
    }

    fn mi_eq(atoms: Vec<Atom>) -> Problem {
        Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::Temporal(TemporalSolver::with_mi())))
            .with_theory("t2", TheoryDecl::new(TheoryKind::Equality))
            .with_instance(Instance::from_atoms(atoms))
    }

    fn all_modes(p: &Problem) -> Verdict {
        let cp = CombinedProblem::new(p.clone()).unwrap();
        let complete = solve_complete(&cp).unwrap();
        if let Some(w) = complete.witness() {
            check_combined_witness(p, w).unwrap();
        }
        let par = solve_complete_with(&cp, SolveOptions { parallel: true }).unwrap();
        assert_eq!(par.verdict(), complete.verdict());
        if let Some(w) = par.witness() {
            check_combined_witness(p, w).unwrap();
        }
        if cp.all_convex() {
            let convex = solve_convex(&cp).unwrap();
            assert_eq!(convex.verdict(), complete.verdict());
            if let Some(w) = convex.witness() {
                check_combined_witness(p, w).unwrap();
            }
        }
        complete.verdict()
    }

    #[test]
    fn propagation_first_step() {
        let p = two_orders(vec![
            pa("t1", "leq", "x", "y"),
            pa("t1", "leq", "y", "x"),
            pa("t2", "lt", "x", "z"),
            pa("t2", "lt", "y", "z"),
        ]);
        let cp = CombinedProblem::new(p).unwrap();
        let step = propagate_step(&cp, &BTreeSet::new()).unwrap();
        assert_eq!(step, [Atom::eq("x", "y")].into_iter().collect());
        let learned = step;
        assert!(propagate_step(&cp, &learned).unwrap().is_empty());
    }

    #[test]
    fn propagation_through_mi() {
        let p = Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::Temporal(TemporalSolver::with_mi())))
            .with_theory("t2", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_instance(Instance::from_atoms([
                mi("t1", "x", "y", "z"),
                pa("t1", "leq", "x", "y"),
                pa("t1", "leq", "x", "z"),
                pa("t2", "lt", "x", "w"),
                pa("t2", "lt", "y", "w"),
            ]));
        let cp = CombinedProblem::new(p).unwrap();
        let step = propagate_step(&cp, &BTreeSet::new()).unwrap();
        assert_eq!(step, [Atom::eq("x", "y")].into_iter().collect());
    }

    #[test]
    fn convex_propagates_into_equality() {
        let p = pa_eq(vec![
            pa("t1", "leq", "x", "y"),
            pa("t1", "leq", "y", "x"),
            Atom::neq("x", "y"),
        ]);
        assert_eq!(all_modes(&p), Verdict::Unsat);
    }

    #[test]
    fn convex_sat() {
        let p = pa_eq(vec![pa("t1", "lt", "x", "y"), Atom::neq("y", "z")]);
        assert_eq!(all_modes(&p), Verdict::Sat);
    }

    #[test]
    fn independent_orders() {
        let p = two_orders(vec![pa("t1", "lt", "x", "y"), pa("t2", "lt", "y", "x")]);
        assert_eq!(all_modes(&p), Verdict::Sat);
    }

    #[test]
    fn disequality_between_unshared_variables() {
        // t1 forces x = y, t2 forces y = w; only y is shared through
        // relational atoms, the disequality links x and w
        let p = two_orders(vec![
            pa("t1", "leq", "x", "y"),
            pa("t1", "leq", "y", "x"),
            pa("t2", "leq", "y", "w"),
            pa("t2", "leq", "w", "y"),
            Atom::neq("x", "w"),
        ]);
        assert_eq!(all_modes(&p), Verdict::Unsat);
    }

    #[test]
    fn equalities_collapse_before_splitting() {
        let p = two_orders(vec![
            pa("t1", "leq", "x", "y"),
            pa("t1", "leq", "y", "x"),
            Atom::eq("x", "u"),
            Atom::eq("y", "v"),
            pa("t2", "lt", "u", "v"),
        ]);
        assert_eq!(all_modes(&p), Verdict::Unsat);
    }

    #[test]
    fn mi_needs_case_split() {
        let base = vec![
            mi("t1", "a", "b", "c"),
            mi("t1", "c", "d", "a"),
            pa("t1", "leq", "a", "b"),
            pa("t1", "leq", "c", "d"),
            Atom::neq("a", "b"),
        ];
        let p = mi_eq(base.clone());
        assert_eq!(all_modes(&p), Verdict::Sat);
        let cp = CombinedProblem::new(p).unwrap();
        let w = solve_complete(&cp).unwrap();
        let w = w.witness().unwrap();
        assert_eq!(
            w.models[&TheoryId::new("t1")].same(&"c".into(), &"d".into()),
            Some(true)
        );

        let mut unsat = base;
        unsat.push(Atom::neq("c", "d"));
        assert_eq!(all_modes(&mi_eq(unsat)), Verdict::Unsat);
    }

    #[test]
    fn empty_problem() {
        assert_eq!(all_modes(&Problem::new()), Verdict::Sat);
        assert_eq!(all_modes(&pa_eq(vec![])), Verdict::Sat);
    }

    #[test]
    fn only_equality_atoms_without_theories() {
        let p = Problem::new().with_instance(Instance::from_atoms([Atom::eq("x", "y"), Atom::neq("y", "x")]));
        assert_eq!(all_modes(&p), Verdict::Unsat);
        let p = Problem::new().with_instance(Instance::from_atoms([Atom::eq("x", "y"), Atom::neq("y", "z")]));
        assert_eq!(all_modes(&p), Verdict::Sat);
    }

    #[test]
    fn convex_mode_refuses_undeclared() {
        let p = mi_eq(vec![mi("t1", "a", "b", "c")]);
        let cp = CombinedProblem::new(p).unwrap();
        assert!(matches!(solve_convex(&cp), Err(SolveError::ConvexityNotDeclared(_))));
        assert!(solve_auto(&cp).unwrap().is_sat());
    }

    #[test]
    fn convex_mode_detects_false_declaration() {
        let mut p = mi_eq(vec![
            mi("t1", "a", "b", "c"),
            mi("t1", "c", "d", "a"),
            pa("t1", "leq", "a", "b"),
            pa("t1", "leq", "c", "d"),
        ]);
        p.theories.get_mut(&TheoryId::new("t1")).unwrap().convex = true;
        p.instance = p.instance.with(["a", "b", "c", "d"].map(|v| Atom::neq(v, "z")));
        let cp = CombinedProblem::new(p).unwrap();
        assert!(matches!(solve_convex(&cp), Err(SolveError::ConvexityRefuted(_))));
    }

    #[test]
    fn unknown_theory() {
        let p = Problem::new().with_instance(Instance::from_atoms([pa("nope", "lt", "x", "y")]));
        assert!(CombinedProblem::new(p).is_err());
    }
}
