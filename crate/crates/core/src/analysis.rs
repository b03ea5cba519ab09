//! Bounded refutation of convexity and verification of cross-prevention
//! formulas.
//!
//! A theory with `!=` in its signature is convex iff no instance `S` admits
//! two disequalities that are separately consistent with `S` but jointly
//! inconsistent. [`probe_convexity`] searches small instances for such a
//! triple; a hit proves non-convexity, a miss proves nothing.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, SolveError};
use crate::formulas::{Atom, Instance, PPFormula, RelationSymbol, TheoryId, Variable};
use crate::oracle::brute_decide_theory;
use crate::theories::{Model, SolveResult, TheoryKind, TheorySolver};

/// Largest instance dimensions accepted in exhaustive mode.
pub const EXHAUSTIVE_MAX_VARS: usize = 5;
pub const EXHAUSTIVE_MAX_ATOMS: usize = 5;

const CHUNK: usize = 2048;

/// An instance with two disequalities that are each satisfiable with it but
/// not together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityWitness {
    instance: Instance,
    pair1: (Variable, Variable),
    pair2: (Variable, Variable),
    results: [SolveResult<Model>; 3],
}

impl ConvexityWitness {
    /// Decides the three extensions of `instance` with `solver`; fails unless
    /// they come out SAT, SAT, UNSAT.
    pub fn new(
        solver: &TheoryKind,
        instance: Instance,
        pair1: (Variable, Variable),
        pair2: (Variable, Variable),
    ) -> Result<Self> {
        let results = [
            solver.decide(&instance.with([neq(&pair1)]))?,
            solver.decide(&instance.with([neq(&pair2)]))?,
            solver.decide(&instance.with([neq(&pair1), neq(&pair2)]))?,
        ];
        if !(results[0].is_sat() && results[1].is_sat() && !results[2].is_sat()) {
            return Err(SolveError::Witness(format!(
                "{instance:?} with {pair1:?}, {pair2:?} does not refute convexity"
            )));
        }
        Ok(ConvexityWitness {
            instance,
            pair1,
            pair2,
            results,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn pair1(&self) -> &(Variable, Variable) {
        &self.pair1
    }

    pub fn pair2(&self) -> &(Variable, Variable) {
        &self.pair2
    }

    /// Results for `S ∪ {pair1 !=}`, `S ∪ {pair2 !=}` and both.
    pub fn results(&self) -> &[SolveResult<Model>; 3] {
        &self.results
    }

    /// Replays the three verdicts with the brute-force oracle.
    pub fn confirm_with_oracle(&self, kind: &TheoryKind) -> Result<bool> {
        let s = &self.instance;
        Ok(brute_decide_theory(kind, &s.with([neq(&self.pair1)]))?.is_sat()
            && brute_decide_theory(kind, &s.with([neq(&self.pair2)]))?.is_sat()
            && !brute_decide_theory(kind, &s.with([neq(&self.pair1), neq(&self.pair2)]))?.is_sat())
    }
}

fn neq(pair: &(Variable, Variable)) -> Atom {
    Atom::neq(pair.0.clone(), pair.1.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

/// Relation symbols to probe, each `(name, arity)` in `theory`. `!=` is
/// always part of the atom universe; `=` never is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub theory: TheoryId,
    pub relations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(theory: impl Into<TheoryId>, relations: &[(&str, usize)]) -> Self {
        Signature {
            theory: theory.into(),
            relations: relations.iter().map(|&(n, k)| (n.to_string(), k)).collect(),
        }
    }

    /// Every relation the solver knows.
    pub fn of_solver(theory: impl Into<TheoryId>, solver: &TheoryKind) -> Self {
        let relations = solver
            .relation_names()
            .into_iter()
            .filter_map(|n| Some((n.clone(), solver.arity_of(&n)?)))
            .collect();
        Signature {
            theory: theory.into(),
            relations,
        }
    }
}

/// Probe variables `a`, `b`, ... in order.
pub fn probe_variables(k: usize) -> Vec<Variable> {
    (0..k)
        .map(|i| {
            let c = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                Variable::new(c.to_string())
            } else {
                Variable::new(format!("{c}{}", i / 26))
            }
        })
        .collect()
}

/// Atoms over `vars` with pairwise distinct arguments, sorted.
pub fn atom_universe(signature: &Signature, vars: &[Variable]) -> Vec<Atom> {
    let mut atoms = BTreeSet::new();
    for (name, arity) in &signature.relations {
        let sym = RelationSymbol::new(signature.theory.clone(), name.as_str(), *arity);
        for args in vars.iter().cloned().permutations(*arity) {
            atoms.insert(Atom::rel(sym.clone(), args));
        }
    }
    for (x, y) in vars.iter().tuple_combinations() {
        atoms.insert(Atom::neq(x.clone(), y.clone()));
    }
    atoms.into_iter().collect()
}

/// The first `(pair1, pair2)` refuting convexity for `instance`, pairs in
/// lexicographic order.
fn test_candidate(solver: &TheoryKind, instance: &Instance, vars: &[Variable]) -> Result<Option<ConvexityWitness>> {
    if !solver.decide(instance)?.is_sat() {
        return Ok(None);
    }
    let pairs: Vec<(Variable, Variable)> = vars.iter().cloned().tuple_combinations().collect();
    let mut separately = Vec::with_capacity(pairs.len());
    for p in &pairs {
        separately.push(solver.decide(&instance.with([neq(p)]))?.is_sat());
    }
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            if separately[i]
                && separately[j]
                && !solver
                    .decide(&instance.with([neq(&pairs[i]), neq(&pairs[j])]))?
                    .is_sat()
            {
                return ConvexityWitness::new(solver, instance.clone(), pairs[i].clone(), pairs[j].clone()).map(Some);
            }
        }
    }
    Ok(None)
}

/// Evaluates candidates concurrently, reporting the earliest hit in
/// candidate order.
fn first_hit(
    solver: &TheoryKind,
    candidates: impl Iterator<Item = (Instance, Vec<Variable>)>,
) -> Result<Option<ConvexityWitness>> {
    let mut candidates = candidates.peekable();
    while candidates.peek().is_some() {
        let chunk: Vec<_> = candidates.by_ref().take(CHUNK).collect();
        let results: Vec<Result<Option<ConvexityWitness>>> = chunk
            .par_iter()
            .map(|(inst, vars)| test_candidate(solver, inst, vars))
            .collect();
        for r in results {
            if let Some(w) = r? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Searches instances of at most `max_vars` variables and `max_atoms` atoms
/// for a refutation of convexity.
///
/// Exhaustive mode visits instances by number of variables, then by atom
/// count, then by atom set in lexicographic order, and reports the first
/// refutation in that order. Only instances using every one of their
/// variables are visited; the rest are renamings of smaller ones.
pub fn probe_convexity(
    solver: &TheoryKind,
    signature: &Signature,
    max_vars: usize,
    max_atoms: usize,
    mode: ProbeMode,
) -> Result<Option<ConvexityWitness>> {
    for (name, arity) in &signature.relations {
        match solver.arity_of(name) {
            None => return Err(SolveError::UnresolvedRelation(name.clone())),
            Some(k) if k != *arity => {
                return Err(SolveError::ArityMismatch {
                    name: name.clone(),
                    expected: k,
                    found: *arity,
                })
            }
            Some(_) => {}
        }
    }
    match mode {
        ProbeMode::Exhaustive => {
            if max_vars > EXHAUSTIVE_MAX_VARS {
                return Err(SolveError::BoundExceeded {
                    what: "probe variables",
                    found: max_vars,
                    bound: EXHAUSTIVE_MAX_VARS,
                });
            }
            if max_atoms > EXHAUSTIVE_MAX_ATOMS {
                return Err(SolveError::BoundExceeded {
                    what: "probe atoms",
                    found: max_atoms,
                    bound: EXHAUSTIVE_MAX_ATOMS,
                });
            }
            for k in 1..=max_vars {
                let vars = probe_variables(k);
                let universe = atom_universe(signature, &vars);
                for size in 1..=max_atoms {
                    let candidates = universe
                        .iter()
                        .cloned()
                        .combinations(size)
                        .map(Instance::from_atoms)
                        .filter(|inst| inst.variables().len() == k)
                        .map(|inst| (inst, vars.clone()));
                    if let Some(w) = first_hit(solver, candidates)? {
                        return Ok(Some(w));
                    }
                }
            }
            Ok(None)
        }
        ProbeMode::Random { count, seed } => {
            if max_vars < 2 || max_atoms == 0 {
                return Ok(None);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let universes: Vec<Vec<Atom>> = (0..=max_vars)
                .map(|k| atom_universe(signature, &probe_variables(k)))
                .collect();
            let candidates: Vec<(Instance, Vec<Variable>)> = (0..count)
                .map(|_| {
                    let k = rng.gen_range(2..=max_vars);
                    let size = rng.gen_range(1..=max_atoms);
                    let atoms = universes[k].choose_multiple(&mut rng, size).cloned();
                    (Instance::from_atoms(atoms), probe_variables(k))
                })
                .collect();
            first_hit(solver, candidates.into_iter())
        }
    }
}

/// One of the three conditions of a cross-prevention check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub holds: bool,
    /// The instance whose satisfiability decides the condition.
    pub instance: Instance,
    pub result: SolveResult<Model>,
}

/// Outcome of checking a pp-formula `φ(x, y, u, v)` against the three
/// conditions for preventing binary injective polymorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossPreventionReport {
    pub formula: PPFormula,
    /// `φ ∧ x = y` with `x, u, v` pairwise distinct is satisfiable.
    pub cond1: Condition,
    /// `φ ∧ u = v` with `x, y, u` pairwise distinct is satisfiable.
    pub cond2: Condition,
    /// `φ ∧ x = y ∧ u = v` is unsatisfiable.
    pub cond3: Condition,
}

impl CrossPreventionReport {
    pub fn passes(&self) -> bool {
        self.cond1.holds && self.cond2.holds && self.cond3.holds
    }
}

fn pairwise_distinct(vars: [&Variable; 3]) -> [Atom; 3] {
    [
        Atom::neq(vars[0].clone(), vars[1].clone()),
        Atom::neq(vars[0].clone(), vars[2].clone()),
        Atom::neq(vars[1].clone(), vars[2].clone()),
    ]
}

pub fn check_cross_prevention(solver: &TheoryKind, formula: &PPFormula) -> Result<CrossPreventionReport> {
    let [x, y, u, v] = formula.free_vars() else {
        return Err(SolveError::InvalidArgument(format!(
            "a cross-prevention formula has four free variables, found {}",
            formula.free_vars().len()
        )));
    };
    let body = formula.body();
    let condition = |extra: Vec<Atom>, want_sat: bool| -> Result<Condition> {
        let instance = body.with(extra);
        let result = solver.decide(&instance)?;
        Ok(Condition {
            holds: result.is_sat() == want_sat,
            instance,
            result,
        })
    };
    let mut c1 = vec![Atom::eq(x.clone(), y.clone())];
    c1.extend(pairwise_distinct([x, u, v]));
    let mut c2 = vec![Atom::eq(u.clone(), v.clone())];
    c2.extend(pairwise_distinct([x, y, u]));
    let c3 = vec![Atom::eq(x.clone(), y.clone()), Atom::eq(u.clone(), v.clone())];
    Ok(CrossPreventionReport {
        formula: formula.clone(),
        cond1: condition(c1, true)?,
        cond2: condition(c2, true)?,
        cond3: condition(c3, false)?,
    })
}
