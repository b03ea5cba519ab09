//! The two reductions between a Henson digraph `B` and the combination of
//! `B1` (`B` plus an isolated looped vertex `a`) with pure equality.
//!
//! [`build_s_star`] maps an instance `S` of `B` to `S*`, which adds a fresh
//! looped variable `x0` that must differ from every variable of `S`: `S*` is
//! satisfiable in the combination exactly when `S` is satisfiable in `B`.
//! [`component_label_solve`] decides any instance of the combination by
//! sending each unsatisfiable weakly connected component to `a`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, SolveError};
use crate::formulas::{
    collapse_equalities, Atom, AtomKind, Instance, Problem, RelationSymbol, TheoryDecl, TheoryId, Variable,
};
use crate::theories::check_edge_atoms;
use crate::theories::{
    henson_decide, Digraph, DigraphModel, HensonSolver, Model, SolveResult, TheoryKind, TournamentSet, Vertex,
};
use crate::union_find::UnionFind;

/// An instance over `E`, `=` and `!=` of a Henson digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HensonProblem {
    pub theory: TheoryId,
    pub forbidden: TournamentSet,
    pub instance: Instance,
}

impl HensonProblem {
    pub fn new(theory: impl Into<TheoryId>, forbidden: TournamentSet, instance: Instance) -> Result<Self> {
        let theory = theory.into();
        check_edge_atoms(&instance)?;
        if let Some(sym) = instance.atoms().filter_map(Atom::symbol).find(|s| s.theory != theory) {
            return Err(SolveError::UnknownTheory(sym.theory.to_string()));
        }
        Ok(HensonProblem {
            theory,
            forbidden,
            instance,
        })
    }

    /// Reads the single Henson theory of a parsed problem. Equality theories
    /// may be declared alongside; they carry no relational atoms.
    pub fn from_problem(problem: &Problem) -> Result<Self> {
        let mut henson = problem.theories.iter().filter_map(|(tid, d)| match &d.kind {
            TheoryKind::Henson(h) => Some((tid, h)),
            _ => None,
        });
        let (tid, solver) = henson
            .next()
            .ok_or_else(|| SolveError::InvalidArgument("no henson theory declared".into()))?;
        if henson.next().is_some() {
            return Err(SolveError::InvalidArgument(
                "more than one henson theory declared".into(),
            ));
        }
        HensonProblem::new(tid.clone(), solver.forbidden.clone(), problem.instance.clone())
    }

    /// The instance as a problem over `B` alone.
    pub fn to_problem(&self) -> Problem {
        Problem::new()
            .with_theory(
                self.theory.clone(),
                TheoryDecl::new(TheoryKind::Henson(HensonSolver::new(self.forbidden.clone()))),
            )
            .with_instance(self.instance.clone())
    }

    pub fn decide(&self) -> Result<SolveResult<Model>> {
        henson_decide(&self.instance, &self.forbidden)
    }

    /// `S*` as a problem over `B1` combined with an equality theory.
    pub fn s_star_problem(&self) -> Problem {
        combination_problem(
            &self.theory,
            &self.forbidden,
            build_s_star(&self.instance, &self.theory),
        )
    }
}

/// The theory of Proposition 5.1's combination: `B1` under `theory` and an
/// equality theory named `eq` (or `eq_1`, ... when `theory` is `eq`).
pub fn combination_problem(theory: &TheoryId, forbidden: &TournamentSet, instance: Instance) -> Problem {
    let mut eq = String::from("eq");
    let mut k = 0;
    while eq == theory.name() {
        k += 1;
        eq = format!("eq_{k}");
    }
    Problem::new()
        .with_theory(
            theory.clone(),
            TheoryDecl::new(TheoryKind::Henson(HensonSolver::with_loop_vertex(forbidden.clone()))),
        )
        .with_theory(eq.as_str(), TheoryDecl::new(TheoryKind::Equality))
        .with_instance(instance)
}

/// `x0`, or `x0_1`, `x0_2`, ... if taken.
pub fn fresh_variable(inst: &Instance) -> Variable {
    let vars = inst.variables();
    let mut name = String::from("x0");
    let mut k = 0;
    while vars.contains(&Variable::new(name.as_str())) {
        k += 1;
        name = format!("x0_{k}");
    }
    Variable::new(name)
}

/// `S* = S ∪ {E(x0, x0)} ∪ {x0 != v : v in S}` with `x0` fresh and the new
/// edge atom in `theory`.
pub fn build_s_star(inst: &Instance, theory: &TheoryId) -> Instance {
    let x0 = fresh_variable(inst);
    let mut out = inst.clone();
    for v in inst.variables() {
        out.insert(Atom::neq(x0.clone(), v));
    }
    out.insert(Atom::rel(
        RelationSymbol::new(theory.clone(), "E", 2),
        vec![x0.clone(), x0.clone()],
    ));
    assert!(
        !out.atoms().any(|a| a.is_eq() && a.args.contains(&x0)),
        "the fresh variable must never be merged"
    );
    out
}

/// Decides an instance of `B1` combined with equality.
///
/// Every weakly connected component of the collapsed edge atoms maps
/// either entirely to `a` or entirely into `B`. A component goes to `a`
/// exactly when it has no solution in `B`, and the instance is unsatisfiable
/// exactly when some disequality has both ends on `a`.
pub fn component_label_solve(inst: &Instance, forbidden: &TournamentSet) -> Result<SolveResult<Model>> {
    check_edge_atoms(inst)?;
    let (collapsed, var_map) = collapse_equalities(inst);
    if collapsed.atoms().any(|a| a.is_neq() && a.args[0] == a.args[1]) {
        return Ok(SolveResult::Unsat);
    }
    let reps: Vec<Variable> = var_map.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&Variable, usize> = reps.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(reps.len());
    let edges: Vec<&Atom> = collapsed.atoms().filter(|a| a.is_rel()).collect();
    for e in &edges {
        uf.union(index[&e.args[0]], index[&e.args[1]]);
    }

    let mut components: BTreeMap<usize, Vec<&Atom>> = BTreeMap::new();
    for e in &edges {
        components.entry(uf.find(index[&e.args[0]])).or_default().push(e);
    }
    let mut on_loop = vec![false; reps.len()];
    for (root, atoms) in &components {
        let sub = Instance::from_atoms(atoms.iter().map(|a| (*a).clone()));
        on_loop[*root] = !henson_decide(&sub, forbidden)?.is_sat();
    }
    let labelled = |v: &Variable, uf: &mut UnionFind| on_loop[uf.find(index[v])];
    for atom in collapsed.atoms().filter(|a| a.is_neq()) {
        if labelled(&atom.args[0], &mut uf) && labelled(&atom.args[1], &mut uf) {
            return Ok(SolveResult::Unsat);
        }
    }

    let free: Vec<&Variable> = reps.iter().filter(|v| !labelled(v, &mut uf)).collect();
    let node: BTreeMap<&Variable, usize> = free.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let arcs: Vec<(usize, usize)> = edges
        .iter()
        .filter_map(|e| Some((*node.get(&e.args[0])?, *node.get(&e.args[1])?)))
        .collect();
    let graph = Digraph::new(free.iter().map(|v| v.to_string()).collect(), arcs)?;
    let assignment = reps
        .iter()
        .map(|v| {
            let vertex = node.get(v).map_or(Vertex::Loop, |&i| Vertex::Node(i));
            (v.clone(), vertex)
        })
        .collect();
    let model = Model::Digraph(DigraphModel { graph, assignment });
    Ok(SolveResult::Sat(model.pull_back(&var_map)))
}

/// The theories of an instance's edge atoms.
pub fn edge_theories(inst: &Instance) -> BTreeSet<TheoryId> {
    inst.atoms()
        .filter_map(|a| match &a.kind {
            AtomKind::Rel(sym) => Some(sym.theory.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theories::TheorySolver;

    fn e(a: &str, b: &str) -> Atom {
        Atom::rel(RelationSymbol::new("h", "E", 2), vec![a.into(), b.into()])
    }

    fn solve(atoms: Vec<Atom>) -> SolveResult<Model> {
        let inst = Instance::from_atoms(atoms);
        let res = component_label_solve(&inst, &TournamentSet::c3()).unwrap();
        if let Some(m) = res.witness() {
            HensonSolver::with_loop_vertex(TournamentSet::c3())
                .check_model(&inst, m)
                .unwrap();
        }
        res
    }

    #[test]
    fn s_star_construction() {
        let s = Instance::from_atoms([Atom::rel(
            RelationSymbol::new("h", "E", 2),
            vec!["x1".into(), "x2".into()],
        )]);
        let star = build_s_star(&s, &TheoryId::new("h"));
        let expected = Instance::from_atoms([
            e("x0", "x0"),
            Atom::neq("x0", "x1"),
            Atom::neq("x0", "x2"),
            e("x1", "x2"),
        ]);
        assert_eq!(star, expected);
        assert_eq!(star.len(), s.len() + 1 + 2);

        assert_eq!(
            build_s_star(&Instance::new(), &TheoryId::new("h")),
            Instance::from_atoms([e("x0", "x0")])
        );
    }

    #[test]
    fn fresh_name_avoids_collisions() {
        let s = Instance::from_atoms([e("x0", "x0_1")]);
        assert_eq!(fresh_variable(&s), Variable::new("x0_2"));
    }

    #[test]
    fn looped_pair_joined_by_disequality() {
        assert_eq!(
            solve(vec![e("x", "x"), Atom::neq("x", "y"), e("y", "y")]),
            SolveResult::Unsat
        );
    }

    #[test]
    fn one_loop_and_a_free_vertex() {
        let res = solve(vec![e("x", "x"), Atom::neq("x", "y")]);
        let Some(Model::Digraph(d)) = res.witness() else {
            panic!("expected SAT")
        };
        assert_eq!(d.assignment[&Variable::new("x")], Vertex::Loop);
        assert_ne!(d.assignment[&Variable::new("y")], Vertex::Loop);
    }

    #[test]
    fn triangle_goes_to_the_loop() {
        let triangle = vec![e("x", "y"), e("y", "z"), e("z", "x")];
        assert!(solve(triangle.clone()).is_sat());
        let mut atoms = triangle;
        atoms.extend([Atom::neq("x", "w"), e("w", "w")]);
        assert_eq!(solve(atoms), SolveResult::Unsat);
    }

    #[test]
    fn disequality_inside_a_looped_component() {
        assert_eq!(
            solve(vec![e("x", "y"), e("y", "x"), Atom::neq("x", "y")]),
            SolveResult::Unsat
        );
        assert!(solve(vec![e("x", "y"), e("y", "x")]).is_sat());
    }

    #[test]
    fn equalities_are_collapsed_first() {
        assert_eq!(
            solve(vec![e("x", "y"), Atom::eq("x", "y"), Atom::neq("y", "z"), e("z", "z")]),
            SolveResult::Unsat
        );
        assert_eq!(solve(vec![Atom::eq("x", "y"), Atom::neq("x", "y")]), SolveResult::Unsat);
    }

    #[test]
    fn round_trip_on_small_instances() {
        let forbidden = TournamentSet::c3();
        let cases = [
            vec![e("x1", "x2"), e("x2", "x3"), e("x3", "x1")],
            vec![e("x1", "x2"), e("x2", "x3"), e("x1", "x3")],
            vec![e("x1", "x2"), e("x2", "x1")],
            vec![],
        ];
        for atoms in cases {
            let p = HensonProblem::new("h", forbidden.clone(), Instance::from_atoms(atoms)).unwrap();
            let star = build_s_star(&p.instance, &p.theory);
            assert_eq!(
                p.decide().unwrap().is_sat(),
                component_label_solve(&star, &forbidden).unwrap().is_sat(),
                "{:?}",
                p.instance
            );
        }
    }

    #[test]
    fn problem_conversions() {
        let p = HensonProblem::new("h", TournamentSet::c3(), Instance::from_atoms([e("x", "y")])).unwrap();
        let back = HensonProblem::from_problem(&p.to_problem()).unwrap();
        assert_eq!(back, p);
        let star = p.s_star_problem();
        assert_eq!(star.theories.len(), 2);
        assert_eq!(
            edge_theories(&star.instance),
            [TheoryId::new("h")].into_iter().collect()
        );
        let lt = Atom::rel(RelationSymbol::new("h", "lt", 2), vec!["x".into(), "y".into()]);
        assert!(HensonProblem::new("h", TournamentSet::c3(), Instance::from_atoms([lt])).is_err());
    }
}
