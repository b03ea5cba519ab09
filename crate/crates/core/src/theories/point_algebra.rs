use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{check_equalities, contract, Model, SolveResult, TheorySolver, VarIndex};
use crate::error::{Result, SolveError};
use crate::formulas::{AtomKind, Instance};
use crate::union_find::UnionFind;

/// `(Q; <, <=)` with equality and disequality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PointAlgebraSolver;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    Lt,
    Leq,
}

fn order_of(name: &str) -> Option<Order> {
    match name {
        "lt" => Some(Order::Lt),
        "leq" => Some(Order::Leq),
        _ => None,
    }
}

/// Strongly connected components, numbered in reverse topological order.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next_index);
        s.low[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.adj[v] {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().expect("tarjan stack underflow");
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == v {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }

    let n = adj.len();
    let mut s = State {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![usize::MAX; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}

pub fn pa_decide(inst: &Instance) -> Result<SolveResult<Model>> {
    let vars = VarIndex::new(inst);
    let n = vars.len();
    let mut uf = UnionFind::new(n);
    let mut arcs = Vec::new();
    for atom in inst.atoms() {
        match &atom.kind {
            AtomKind::Eq => {
                uf.union(vars.of(&atom.args[0]), vars.of(&atom.args[1]));
            }
            AtomKind::Neq => {}
            AtomKind::Rel(sym) => {
                let order = order_of(&sym.name).ok_or_else(|| contract("point algebra", atom))?;
                if atom.args.len() != 2 {
                    return Err(SolveError::ArityMismatch {
                        name: sym.name.to_string(),
                        expected: 2,
                        found: atom.args.len(),
                    });
                }
                arcs.push((vars.of(&atom.args[0]), vars.of(&atom.args[1]), order));
            }
        }
    }

    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in &arcs {
        adj[uf.find(a)].push(uf.find(b));
    }
    let comp = tarjan(&adj);
    let scc = |uf: &mut UnionFind, v: usize| comp[uf.find(v)];

    for &(a, b, order) in &arcs {
        if order == Order::Lt && scc(&mut uf, a) == scc(&mut uf, b) {
            return Ok(SolveResult::Unsat);
        }
    }
    for atom in inst.atoms().filter(|a| a.is_neq()) {
        let (a, b) = (vars.of(&atom.args[0]), vars.of(&atom.args[1]));
        if scc(&mut uf, a) == scc(&mut uf, b) {
            return Ok(SolveResult::Unsat);
        }
    }

    // Topological order of the condensation; among ready components the one
    // holding the least variable name goes first.
    let ncomp = comp.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |m| m + 1);
    let mut least = vec![usize::MAX; ncomp];
    let mut comp_of_var = vec![0; n];
    for (v, slot) in comp_of_var.iter_mut().enumerate() {
        let c = scc(&mut uf, v);
        *slot = c;
        least[c] = least[c].min(v);
    }
    let mut succ = vec![Vec::new(); ncomp];
    let mut indeg = vec![0usize; ncomp];
    for &(a, b, _) in &arcs {
        let (ca, cb) = (comp_of_var[a], comp_of_var[b]);
        if ca != cb {
            succ[ca].push(cb);
            indeg[cb] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..ncomp)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((least[c], c)))
        .collect();
    let mut rank_of_comp = vec![0; ncomp];
    let mut next = 0;
    while let Some(Reverse((_, c))) = ready.pop() {
        rank_of_comp[c] = next;
        next += 1;
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push(Reverse((least[d], d)));
            }
        }
    }
    debug_assert_eq!(next, ncomp);

    let ranks: BTreeMap<_, _> = vars
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), rank_of_comp[comp_of_var[i]]))
        .collect();
    Ok(SolveResult::Sat(Model::Ranks(ranks)))
}

impl TheorySolver for PointAlgebraSolver {
    fn name(&self) -> &'static str {
        "point algebra"
    }

    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>> {
        pa_decide(inst)
    }

    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()> {
        let Model::Ranks(ranks) = model else {
            return Err(SolveError::Witness("point algebra expects ranks".into()));
        };
        check_equalities(inst, model)?;
        for atom in inst.atoms() {
            if let AtomKind::Rel(sym) = &atom.kind {
                let order = order_of(&sym.name).ok_or_else(|| contract("point algebra", atom))?;
                let (a, b) = (ranks[&atom.args[0]], ranks[&atom.args[1]]);
                let ok = match order {
                    Order::Lt => a < b,
                    Order::Leq => a <= b,
                };
                if !ok {
                    return Err(SolveError::Witness(format!("{atom:?} is violated")));
                }
            }
        }
        Ok(())
    }
}
