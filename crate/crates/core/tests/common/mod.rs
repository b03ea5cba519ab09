#![allow(dead_code)]

use itertools::Itertools;
use qcsp::theories::{HensonSolver, TemporalSolver, TournamentSet};
use qcsp::{Atom, Instance, Problem, RelationSymbol, TheoryDecl, TheoryKind, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

pub fn vars(n: usize) -> Vec<Variable> {
    VARS[..n].iter().map(|&v| Variable::new(v)).collect()
}

pub fn rel(theory: &str, name: &str, args: &[&Variable]) -> Atom {
    Atom::rel(
        RelationSymbol::new(theory, name, args.len()),
        args.iter().map(|&v| v.clone()).collect(),
    )
}

/// `lt`/`leq` of `theory` on ordered pairs of distinct variables, then `=`
/// and `!=` on unordered pairs.
pub fn binary_universe(theory: &str, n: usize) -> Vec<Atom> {
    let vs = vars(n);
    let mut atoms = Vec::new();
    for name in ["lt", "leq"] {
        for (a, b) in vs.iter().tuple_combinations() {
            atoms.push(rel(theory, name, &[a, b]));
            atoms.push(rel(theory, name, &[b, a]));
        }
    }
    for (a, b) in vs.iter().tuple_combinations() {
        atoms.push(Atom::eq(a.clone(), b.clone()));
        atoms.push(Atom::neq(a.clone(), b.clone()));
    }
    atoms
}

/// Every set of at most `max_atoms` atoms from the binary universe on four
/// variables.
pub fn binary_family(theory: &str, max_atoms: usize) -> Vec<Instance> {
    let universe = binary_universe(theory, 4);
    (0..=max_atoms)
        .flat_map(|k| universe.iter().cloned().combinations(k).map(Instance::from_atoms))
        .collect()
}

pub fn pa_eq(inst: Instance) -> Problem {
    Problem::new()
        .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
        .with_theory("t2", TheoryDecl::new(TheoryKind::Equality))
        .with_instance(inst)
}

pub fn pa_pa(inst: Instance) -> Problem {
    Problem::new()
        .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
        .with_theory("t2", TheoryDecl::new(TheoryKind::PointAlgebra))
        .with_instance(inst)
}

pub fn mi_eq(inst: Instance) -> Problem {
    Problem::new()
        .with_theory("t1", TheoryDecl::new(TheoryKind::Temporal(TemporalSolver::with_mi())))
        .with_theory("t2", TheoryDecl::new(TheoryKind::Equality))
        .with_instance(inst)
}

pub fn b1_eq(inst: Instance) -> Problem {
    Problem::new()
        .with_theory(
            "h",
            TheoryDecl::new(TheoryKind::Henson(HensonSolver::with_loop_vertex(TournamentSet::c3()))),
        )
        .with_theory("eq", TheoryDecl::new(TheoryKind::Equality))
        .with_instance(inst)
}

fn pick<'a, R: Rng>(rng: &mut R, vs: &'a [Variable]) -> &'a Variable {
    vs.choose(rng).expect("nonempty")
}

/// Random binary atoms over at most `max_vars` variables, relational atoms
/// drawn from `theories`.
pub fn random_binary<R: Rng>(rng: &mut R, theories: &[&str], max_vars: usize, max_atoms: usize) -> Instance {
    let vs = vars(rng.gen_range(1..=max_vars));
    let count = rng.gen_range(1..=max_atoms);
    (0..count)
        .map(|_| {
            let (a, b) = (pick(rng, &vs), pick(rng, &vs));
            match rng.gen_range(0..6) {
                0 | 1 => rel(theories.choose(rng).unwrap(), "lt", &[a, b]),
                2 | 3 => rel(theories.choose(rng).unwrap(), "leq", &[a, b]),
                4 => Atom::eq(a.clone(), b.clone()),
                _ => Atom::neq(a.clone(), b.clone()),
            }
        })
        .collect()
}

/// Random atoms over `mi`, `lt`, `leq` and `!=` in theory `theory`, plus
/// `=`/`!=` when `with_eq`.
pub fn random_temporal<R: Rng>(
    rng: &mut R,
    theory: &str,
    max_vars: usize,
    max_atoms: usize,
    with_eq: bool,
) -> Instance {
    let vs = vars(rng.gen_range(1..=max_vars));
    let count = rng.gen_range(1..=max_atoms);
    (0..count)
        .map(|_| {
            let (a, b, c) = (pick(rng, &vs), pick(rng, &vs), pick(rng, &vs));
            match rng.gen_range(0..if with_eq { 5 } else { 4 }) {
                0 => rel(theory, "mi", &[a, b, c]),
                1 => rel(theory, "lt", &[a, b]),
                2 => rel(theory, "leq", &[a, b]),
                3 => Atom::neq(a.clone(), b.clone()),
                _ => Atom::eq(a.clone(), b.clone()),
            }
        })
        .collect()
}

pub fn edge(theory: &str, a: &Variable, b: &Variable) -> Atom {
    rel(theory, "E", &[a, b])
}

/// Every arc set without loops on `n` vertices `x1..xn`.
pub fn arc_subsets(n: usize) -> impl Iterator<Item = Instance> {
    let vs: Vec<Variable> = (1..=n).map(|i| Variable::new(format!("x{i}"))).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(a, b))| edge("h", &vs[a], &vs[b]))
            .collect()
    })
}

/// Arc sets (loops allowed) on `n` variables with every set of at most
/// `max_neq` disequalities between distinct variables.
pub fn b1_exhaustive(n: usize, max_neq: usize) -> Vec<Instance> {
    let vs = vars(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let neqs: Vec<Atom> = vs
        .iter()
        .tuple_combinations()
        .map(|(a, b)| Atom::neq(a.clone(), b.clone()))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let arcs: Vec<Atom> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(a, b))| edge("h", &vs[a], &vs[b]))
            .collect();
        for k in 0..=max_neq.min(neqs.len()) {
            for chosen in neqs.iter().cloned().combinations(k) {
                out.push(Instance::from_atoms(arcs.iter().cloned().chain(chosen)));
            }
        }
    }
    out
}

/// A random instance of `B1` with equality: arcs (loops allowed) and at most
/// `max_neq` disequalities between distinct variables on exactly `n`
/// variables.
pub fn random_b1<R: Rng>(rng: &mut R, n: usize, max_neq: usize) -> Instance {
    let vs = vars(n);
    let mut atoms = Vec::new();
    let density: f64 = rng.gen_range(0.05..0.5);
    for a in &vs {
        for b in &vs {
            let p = if a == b { density / 4.0 } else { density };
            if rng.gen_bool(p) {
                atoms.push(edge("h", a, b));
            }
        }
    }
    let neqs: Vec<(&Variable, &Variable)> = vs.iter().tuple_combinations().collect();
    for _ in 0..rng.gen_range(0..=max_neq) {
        let (a, b) = neqs.choose(rng).unwrap();
        atoms.push(Atom::neq((*a).clone(), (*b).clone()));
    }
    Instance::from_atoms(atoms)
}
