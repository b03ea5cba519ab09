mod common;

use qcsp::combine::{
    check_combined_witness, solve_auto, solve_complete, solve_complete_with, CombinedProblem, SolveOptions,
};
use qcsp::oracle::{brute_decide_theory, superpose_bruteforce};
use qcsp::theories::{henson_decide, HensonSolver, TemporalSolver, TournamentSet};
use qcsp::{Atom, Instance, Problem, TheoryKind, TheorySolver, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;

fn engine(p: &Problem, options: SolveOptions) -> Verdict {
    let cp = CombinedProblem::new(p.clone()).unwrap();
    let res = solve_complete_with(&cp, options).unwrap();
    if let Some(w) = res.witness() {
        check_combined_witness(p, w).unwrap_or_else(|e| panic!("{:?}: {e}", p.instance));
    }
    res.verdict()
}

fn oracle(p: &Problem) -> Verdict {
    let res = superpose_bruteforce(p).unwrap();
    if let Some(w) = res.witness() {
        check_combined_witness(p, w).unwrap_or_else(|e| panic!("oracle witness {:?}: {e}", p.instance));
    }
    res.verdict()
}

fn assert_agree(problems: &[Problem]) {
    problems.par_iter().for_each(|p| {
        let expected = oracle(p);
        assert_eq!(engine(p, SolveOptions::default()), expected, "{:?}", p.instance);
        assert_eq!(engine(p, SolveOptions { parallel: true }), expected, "{:?}", p.instance);
    });
}

#[test]
fn two_point_algebras_on_three_variables() {
    // relational atoms of either theory on every pair, plus = and !=
    let mut universe = binary_universe("t1", 3);
    universe.extend(binary_universe("t2", 3).into_iter().filter(|a| a.is_rel()));
    let problems: Vec<Problem> = (0..=3)
        .flat_map(|k| {
            itertools::Itertools::combinations(universe.iter().cloned(), k)
                .map(|atoms| pa_pa(Instance::from_atoms(atoms)))
        })
        .collect();
    assert_agree(&problems);
}

#[test]
fn two_point_algebras_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let problems: Vec<Problem> = (0..4000)
        .map(|_| pa_pa(random_binary(&mut rng, &["t1", "t2"], 5, 8)))
        .collect();
    assert_agree(&problems);
}

#[test]
fn temporal_with_equality_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let problems: Vec<Problem> = (0..3000)
        .map(|_| mi_eq(random_temporal(&mut rng, "t1", 5, 7, true)))
        .collect();
    assert_agree(&problems);
}

#[test]
fn temporal_with_point_algebra_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let problems: Vec<Problem> = (0..3000)
        .map(|_| {
            let mut inst = random_temporal(&mut rng, "t1", 5, 5, true);
            for a in random_binary(&mut rng, &["t2"], 5, 3).atoms() {
                inst.insert(a.clone());
            }
            Problem::new()
                .with_theory(
                    "t1",
                    qcsp::TheoryDecl::new(TheoryKind::Temporal(TemporalSolver::with_mi())),
                )
                .with_theory("t2", qcsp::TheoryDecl::new(TheoryKind::PointAlgebra))
                .with_instance(inst)
        })
        .collect();
    assert_agree(&problems);
}

#[test]
fn henson_with_equality_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let problems: Vec<Problem> = (0..2000)
        .map(|_| {
            let mut inst = random_b1(&mut rng, 4, 3);
            if rng_bool(&mut rng) {
                inst.insert(Atom::eq("x", "y"));
            }
            b1_eq(inst)
        })
        .collect();
    assert_agree(&problems);
}

fn rng_bool(rng: &mut ChaCha8Rng) -> bool {
    rand::Rng::gen_bool(rng, 0.3)
}

#[test]
fn temporal_decide_matches_enumeration_with_equalities() {
    let kind = TheoryKind::Temporal(TemporalSolver::with_mi());
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let family: Vec<Instance> = (0..5000).map(|_| random_temporal(&mut rng, "t", 6, 9, true)).collect();
    family.par_iter().for_each(|inst| {
        let fast = kind.decide(inst).unwrap();
        if let Some(m) = fast.witness() {
            kind.check_model(inst, m).unwrap();
        }
        assert_eq!(
            fast.verdict(),
            brute_decide_theory(&kind, inst).unwrap().verdict(),
            "{inst:?}"
        );
    });
}

#[test]
fn henson_decide_matches_completion_oracle() {
    // exhaustive over arc subsets (loops included) on three vertices, with
    // and without one disequality, for both shipped tournament sets
    for forbidden in [TournamentSet::c3(), TournamentSet::transitive3()] {
        let kind = TheoryKind::Henson(HensonSolver::new(forbidden.clone()));
        let family = b1_exhaustive(3, 1);
        family.par_iter().for_each(|inst| {
            let fast = henson_decide(inst, &forbidden).unwrap();
            if let Some(m) = fast.witness() {
                kind.check_model(inst, m).unwrap();
            }
            assert_eq!(
                fast.verdict(),
                brute_decide_theory(&kind, inst).unwrap().verdict(),
                "{inst:?}"
            );
        });
    }
}

#[test]
fn henson_decide_matches_completion_oracle_on_four_vertices() {
    let forbidden = TournamentSet::c3();
    let kind = TheoryKind::Henson(HensonSolver::new(forbidden.clone()));
    let family: Vec<Instance> = arc_subsets(4).collect();
    family.par_iter().for_each(|inst| {
        assert_eq!(
            henson_decide(inst, &forbidden).unwrap().verdict(),
            brute_decide_theory(&kind, inst).unwrap().verdict(),
            "{inst:?}"
        );
    });
}

#[test]
fn disequalities_preserve_loopless_satisfiability() {
    let forbidden = TournamentSet::c3();
    for n in 0..=5 {
        let family: Vec<Instance> = arc_subsets(n).collect();
        family.par_iter().for_each(|inst| {
            if !henson_decide(inst, &forbidden).unwrap().is_sat() {
                return;
            }
            let vs: Vec<_> = inst.variables().into_iter().collect();
            let mut all = inst.clone();
            for (i, a) in vs.iter().enumerate() {
                for b in &vs[i + 1..] {
                    all.insert(Atom::neq(a.clone(), b.clone()));
                }
            }
            assert!(henson_decide(&all, &forbidden).unwrap().is_sat(), "{all:?}");
        });
    }
}

#[test]
fn auto_mode_picks_a_sound_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..500 {
        let p = mi_eq(random_temporal(&mut rng, "t1", 4, 5, true));
        let cp = CombinedProblem::new(p.clone()).unwrap();
        assert_eq!(
            solve_auto(&cp).unwrap().verdict(),
            solve_complete(&cp).unwrap().verdict()
        );
        let p = pa_eq(random_binary(&mut rng, &["t1"], 5, 6));
        let cp = CombinedProblem::new(p.clone()).unwrap();
        assert_eq!(solve_auto(&cp).unwrap().verdict(), oracle(&p));
    }
}
