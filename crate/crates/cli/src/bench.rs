//! Convex propagation against arrangement search on seeded families with a
//! growing number of shared variables.

use std::io::Write;
use std::time::{Duration, Instant};

use qcsp::combine::{solve_complete, solve_complete_with, solve_convex, CombinedProblem, SolveOptions};
use qcsp::oracle::superpose_bruteforce;
use qcsp::theories::TemporalSolver;
use qcsp::{Atom, Instance, Problem, RelationSymbol, TheoryDecl, TheoryKind, Variable, Verdict};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIZES: std::ops::RangeInclusive<usize> = 2..=6;
const INSTANCES_PER_SIZE: usize = 8;
const ORACLE_MAX_VARS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Two point algebras, both convex.
    Convex,
    /// `R_mi` temporal theory with a point algebra.
    Mi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Convex => "pa+pa",
            Family::Mi => "mi+pa",
        }
    }

    pub fn mode(self) -> &'static str {
        match self {
            Family::Convex => "convex",
            Family::Mi => "complete",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub family: Family,
    pub shared: usize,
    pub median: Duration,
    pub verdicts: Vec<Verdict>,
    pub agree: bool,
}

fn rel(theory: &str, name: &str, args: &[&Variable]) -> Atom {
    Atom::rel(
        RelationSymbol::new(theory, name, args.len()),
        args.iter().map(|&v| v.clone()).collect(),
    )
}

/// An instance whose `shared` variables `s0..` all occur in both theories,
/// with one private variable per theory.
pub fn instance(family: Family, shared: usize, rng: &mut ChaCha8Rng) -> Problem {
    let s: Vec<Variable> = (0..shared).map(|i| Variable::new(format!("s{i}"))).collect();
    let (p, q) = (Variable::new("p"), Variable::new("q"));
    let left: Vec<&Variable> = s.iter().chain([&p]).collect();
    let right: Vec<&Variable> = s.iter().chain([&q]).collect();
    let mut atoms = Vec::new();
    for v in &s {
        let other = loop {
            let o = *left.choose(rng).unwrap();
            if o != v {
                break o;
            }
        };
        atoms.push(match family {
            Family::Convex => rel("t1", if rng.gen_bool(0.5) { "lt" } else { "leq" }, &[v, other]),
            Family::Mi => {
                let third = *left.choose(rng).unwrap();
                rel("t1", "mi", &[v, other, third])
            }
        });
        let other = loop {
            let o = *right.choose(rng).unwrap();
            if o != v {
                break o;
            }
        };
        let name = if rng.gen_bool(0.3) { "lt" } else { "leq" };
        atoms.push(if rng.gen_bool(0.5) {
            rel("t2", name, &[v, other])
        } else {
            rel("t2", name, &[other, v])
        });
    }
    for _ in 0..shared / 2 {
        let pair: Vec<&&Variable> = left.choose_multiple(rng, 2).collect();
        atoms.push(rel("t1", "leq", &[pair[0], pair[1]]));
    }
    if shared >= 2 && rng.gen_bool(0.5) {
        let pair: Vec<&Variable> = s.choose_multiple(rng, 2).collect();
        atoms.push(Atom::neq(pair[0].clone(), pair[1].clone()));
    }
    let t1 = match family {
        Family::Convex => TheoryKind::PointAlgebra,
        Family::Mi => TheoryKind::Temporal(TemporalSolver::with_mi()),
    };
    Problem::new()
        .with_theory("t1", TheoryDecl::new(t1))
        .with_theory("t2", TheoryDecl::new(TheoryKind::PointAlgebra))
        .with_instance(Instance::from_atoms(atoms))
}

fn solve_all(problems: &[CombinedProblem], family: Family) -> qcsp::Result<Vec<Verdict>> {
    problems
        .iter()
        .map(|cp| {
            Ok(match family {
                Family::Convex => solve_convex(cp)?.verdict(),
                Family::Mi => solve_complete(cp)?.verdict(),
            })
        })
        .collect()
}

/// Verdicts of the other procedures: arrangement search for the convex
/// family; parallel search and, on small instances, the oracle for `R_mi`.
fn reference_agrees(problems: &[CombinedProblem], family: Family, verdicts: &[Verdict]) -> qcsp::Result<bool> {
    for (cp, v) in problems.iter().zip(verdicts) {
        let others = match family {
            Family::Convex => vec![solve_complete(cp)?.verdict()],
            Family::Mi => {
                let mut o = vec![solve_complete_with(cp, SolveOptions { parallel: true })?.verdict()];
                if cp.problem().instance.variables().len() <= ORACLE_MAX_VARS {
                    o.push(superpose_bruteforce(cp.problem())?.verdict());
                }
                o
            }
        };
        if others.iter().any(|o| o != v) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn run(seed: u64, runs: usize) -> qcsp::Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for family in [Family::Convex, Family::Mi] {
        for shared in SIZES {
            let problems: Vec<CombinedProblem> = (0..INSTANCES_PER_SIZE)
                .map(|_| CombinedProblem::new(instance(family, shared, &mut rng)))
                .collect::<qcsp::Result<_>>()?;
            let mut times = Vec::with_capacity(runs);
            let mut verdicts = Vec::new();
            for _ in 0..runs.max(1) {
                let start = Instant::now();
                verdicts = solve_all(&problems, family)?;
                times.push(start.elapsed());
            }
            times.sort();
            let agree = reference_agrees(&problems, family, &verdicts)?;
            rows.push(BenchRow {
                family,
                shared,
                median: times[times.len() / 2],
                verdicts,
                agree,
            });
        }
    }
    Ok(rows)
}

/// Satisfiable instances out of the row's family, e.g. `5/8`.
fn sat_count(r: &BenchRow) -> String {
    let sat = r.verdicts.iter().filter(|v| **v == Verdict::Sat).count();
    format!("{sat}/{}", r.verdicts.len())
}

fn micros(d: Duration) -> String {
    format!("{:.1}", d.as_secs_f64() * 1e6)
}

pub fn print_table(rows: &[BenchRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<8} {:>6} {:<9} {:>14} {:>6} {:>5}",
        "family", "shared", "mode", "median_us", "agree", "sat"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<8} {:>6} {:<9} {:>14} {:>6} {:>5}",
            r.family.name(),
            r.shared,
            r.family.mode(),
            micros(r.median),
            if r.agree { "yes" } else { "no" },
            sat_count(r)
        )?;
    }
    Ok(())
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "shared_vars", "mode", "median_us", "agree", "sat"])?;
    for r in rows {
        w.write_record([
            r.family.name().to_string(),
            r.shared.to_string(),
            r.family.mode().to_string(),
            micros(r.median),
            if r.agree { "yes" } else { "no" }.to_string(),
            sat_count(r),
        ])?;
    }
    w.flush()?;
    Ok(())
}
