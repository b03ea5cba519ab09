//! Line protocol for witnesses.
//!
//! ```text
//! arrangement <var> <block>
//! model <tid> <var> <value>
//! arc <tid> <from> <to>
//! ```
//!
//! `arc` lines appear for Henson theories only and list the arcs of the
//! witness digraph between vertex indices; the looped vertex is printed as
//! `a`.

use std::collections::BTreeMap;

use qcsp::combine::{with_implicit_theory, CombinedWitness};
use qcsp::theories::{Digraph, DigraphModel, Vertex};
use qcsp::{Model, Problem, TheoryId, TheoryKind, Variable};

pub fn model_lines(tid: &TheoryId, model: &Model) -> Vec<String> {
    let mut out: Vec<String> = model
        .variables()
        .iter()
        .map(|v| format!("model {tid} {v} {}", model.value(v).expect("assigned")))
        .collect();
    if let Model::Digraph(d) = model {
        out.extend(d.graph.arcs().iter().map(|(u, v)| format!("arc {tid} {u} {v}")));
    }
    out
}

pub fn witness_lines(w: &CombinedWitness) -> Vec<String> {
    let mut out: Vec<String> = w
        .arrangement
        .iter()
        .map(|(v, b)| format!("arrangement {v} {b}"))
        .collect();
    for (tid, model) in &w.models {
        out.extend(model_lines(tid, model));
    }
    out
}

#[derive(Default)]
struct Pending {
    values: BTreeMap<Variable, Option<usize>>,
    arcs: Vec<(usize, usize)>,
}

fn index(word: &str) -> Result<usize, String> {
    word.parse()
        .map_err(|_| format!("`{word}` is not a vertex or block index"))
}

/// Reads witness lines back, typing each model by its theory in `problem`.
/// Theories without any line get an empty model.
pub fn parse_witness(problem: &Problem, lines: &[&str]) -> Result<CombinedWitness, String> {
    let problem = with_implicit_theory(problem);
    let mut arrangement = BTreeMap::new();
    let mut pending: BTreeMap<TheoryId, Pending> = BTreeMap::new();
    for line in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["arrangement", v, b] => {
                arrangement.insert(Variable::new(v), index(b)?);
            }
            ["model", tid, v, value] => {
                let value = if *value == "a" { None } else { Some(index(value)?) };
                pending
                    .entry(TheoryId::new(tid))
                    .or_default()
                    .values
                    .insert(Variable::new(v), value);
            }
            ["arc", tid, u, v] => {
                pending
                    .entry(TheoryId::new(tid))
                    .or_default()
                    .arcs
                    .push((index(u)?, index(v)?));
            }
            _ => return Err(format!("malformed witness line `{line}`")),
        }
    }
    for tid in problem.theories.keys() {
        pending.entry(tid.clone()).or_default();
    }
    let mut models = BTreeMap::new();
    for (tid, p) in pending {
        let decl = problem
            .theories
            .get(&tid)
            .ok_or_else(|| format!("witness mentions undeclared theory {tid}"))?;
        let plain = || -> Result<BTreeMap<Variable, usize>, String> {
            p.values
                .iter()
                .map(|(v, x)| {
                    x.map(|x| (v.clone(), x))
                        .ok_or_else(|| format!("{v} cannot take the loop vertex"))
                })
                .collect()
        };
        let model = match decl.kind {
            TheoryKind::Equality => Model::Blocks(plain()?),
            TheoryKind::PointAlgebra | TheoryKind::Temporal(_) => Model::Ranks(plain()?),
            TheoryKind::Henson(_) => {
                let order = p
                    .values
                    .values()
                    .flatten()
                    .copied()
                    .chain(p.arcs.iter().flat_map(|&(u, v)| [u, v]))
                    .max()
                    .map_or(0, |m| m + 1);
                let graph = Digraph::unlabelled(order, p.arcs.iter().copied()).map_err(|e| e.to_string())?;
                let assignment = p
                    .values
                    .iter()
                    .map(|(v, x)| (v.clone(), x.map_or(Vertex::Loop, Vertex::Node)))
                    .collect();
                Model::Digraph(DigraphModel { graph, assignment })
            }
        };
        models.insert(tid, model);
    }
    Ok(CombinedWitness { arrangement, models })
}
