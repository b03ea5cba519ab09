//! Brute-force ground truth.
//!
//! Everything here decides by enumerating finite candidate models and
//! evaluating atoms directly. None of it calls into the solvers of
//! [`crate::theories`] or [`crate::combine`], so agreement between the two is
//! meaningful evidence.

use std::collections::BTreeMap;

use crate::combine::CombinedWitness;
use crate::error::{Result, SolveError};
use crate::formulas::{split_by_signature, AtomKind, Instance, Problem, TheoryId, Variable};
use crate::theories::{Digraph, DigraphModel, Model, SolveResult, TheoryKind, Vertex, WeakOrder};

pub const MAX_WEAK_ORDER_SIZE: usize = 8;
pub const MAX_PARTITION_SIZE: usize = 10;
pub const DEFAULT_ORACLE_BOUND: usize = 8;

/// Variable limit for the brute-force deciders: `QCSP_ORACLE_BOUND` if set,
/// otherwise [`DEFAULT_ORACLE_BOUND`].
pub fn oracle_bound() -> usize {
    std::env::var("QCSP_ORACLE_BOUND")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ORACLE_BOUND)
}

fn check_bound(what: &'static str, found: usize, bound: usize) -> Result<()> {
    if found > bound {
        Err(SolveError::BoundExceeded { what, found, bound })
    } else {
        Ok(())
    }
}

/// Rank lists of all weak orders on `n` positions, in lexicographic order.
#[derive(Clone, Debug)]
pub struct WeakOrders {
    ranks: Vec<u8>,
    done: bool,
}

/// Number of ranks below the maximum that do not occur.
fn gaps(prefix: &[u8]) -> usize {
    let Some(&max) = prefix.iter().max() else { return 0 };
    let mut seen = vec![false; max as usize + 1];
    for &r in prefix {
        seen[r as usize] = true;
    }
    seen.iter().filter(|s| !**s).count()
}

/// Lexicographically least contiguous completion of `prefix` to length `n`.
fn complete(prefix: &mut Vec<u8>, n: usize) {
    let max = prefix.iter().max().copied();
    let mut seen = vec![false; max.map_or(0, |m| m as usize + 1)];
    for &r in prefix.iter() {
        seen[r as usize] = true;
    }
    let missing: Vec<u8> = (0..seen.len()).filter(|&r| !seen[r]).map(|r| r as u8).collect();
    let free = n - prefix.len() - missing.len();
    prefix.extend(std::iter::repeat_n(0, free));
    prefix.extend(missing);
}

impl WeakOrders {
    fn new(n: usize) -> Self {
        let mut ranks = Vec::with_capacity(n);
        complete(&mut ranks, n);
        WeakOrders { ranks, done: false }
    }
}

impl Iterator for WeakOrders {
    type Item = WeakOrder;

    fn next(&mut self) -> Option<WeakOrder> {
        if self.done {
            return None;
        }
        let current = WeakOrder::from_ranks_unchecked(self.ranks.clone());
        let n = self.ranks.len();
        // advance: bump the rightmost position that still admits a completion
        self.done = true;
        for i in (0..n).rev() {
            let mut prefix = self.ranks[..i].to_vec();
            let mut v = self.ranks[i] + 1;
            while (v as usize) < n {
                prefix.push(v);
                if gaps(&prefix) < n - i {
                    complete(&mut prefix, n);
                    self.ranks = prefix;
                    self.done = false;
                    return Some(current);
                }
                prefix.pop();
                v += 1;
            }
        }
        Some(current)
    }
}

pub fn enumerate_weak_orders(n: usize) -> Result<WeakOrders> {
    check_bound("weak order size", n, MAX_WEAK_ORDER_SIZE)?;
    Ok(WeakOrders::new(n))
}

/// Set partitions of `0..n` as restricted growth strings: element `i` lies in
/// block `rgs[i]`, and every block index is at most one more than all earlier
/// ones.
#[derive(Clone, Debug)]
pub struct PartitionIterator {
    rgs: Vec<usize>,
    done: bool,
}

impl PartitionIterator {
    pub fn new(n: usize) -> Result<Self> {
        check_bound("partition size", n, MAX_PARTITION_SIZE)?;
        Ok(PartitionIterator {
            rgs: vec![0; n],
            done: false,
        })
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.rgs.clone();
        let n = self.rgs.len();
        let mut prefix_max = vec![0; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.rgs[i - 1]);
        }
        self.done = true;
        for i in (1..n).rev() {
            if self.rgs[i] <= prefix_max[i] {
                self.rgs[i] += 1;
                for r in &mut self.rgs[i + 1..] {
                    *r = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(current)
    }
}

pub fn enumerate_partitions(n: usize) -> Result<PartitionIterator> {
    PartitionIterator::new(n)
}

fn values_agree_on_equalities(inst: &Instance, value: impl Fn(&Variable) -> usize) -> bool {
    inst.atoms().all(|a| match a.kind {
        AtomKind::Eq => value(&a.args[0]) == value(&a.args[1]),
        AtomKind::Neq => value(&a.args[0]) != value(&a.args[1]),
        AtomKind::Rel(_) => true,
    })
}

fn brute_equality(vars: &[Variable], inst: &Instance, injective: bool) -> Result<SolveResult<Model>> {
    if let Some(a) = inst.atoms().find(|a| a.is_rel()) {
        return Err(SolveError::Contract {
            solver: "equality oracle",
            atom: format!("{a:?}"),
        });
    }
    for rgs in PartitionIterator::new(vars.len())? {
        if injective && rgs.iter().enumerate().any(|(i, &b)| b != i) {
            continue;
        }
        let blocks: BTreeMap<Variable, usize> = vars.iter().cloned().zip(rgs).collect();
        if values_agree_on_equalities(inst, |v| blocks[v]) {
            return Ok(SolveResult::Sat(Model::Blocks(blocks)));
        }
    }
    Ok(SolveResult::Unsat)
}

fn brute_order(kind: &TheoryKind, vars: &[Variable], inst: &Instance, injective: bool) -> Result<SolveResult<Model>> {
    for wo in enumerate_weak_orders(vars.len())? {
        let ranks: BTreeMap<Variable, usize> = vars
            .iter()
            .cloned()
            .zip(wo.ranks().iter().map(|&r| r as usize))
            .collect();
        if injective && !ranks.is_empty() && wo.ranks().iter().max().map(|&m| m as usize + 1) != Some(ranks.len()) {
            continue;
        }
        if !values_agree_on_equalities(inst, |v| ranks[v]) {
            continue;
        }
        let mut ok = true;
        for atom in inst.atoms() {
            let AtomKind::Rel(sym) = &atom.kind else { continue };
            let vals: Vec<usize> = atom.args.iter().map(|v| ranks[v]).collect();
            let holds = match kind {
                TheoryKind::PointAlgebra => match &*sym.name {
                    "lt" => vals[0] < vals[1],
                    "leq" => vals[0] <= vals[1],
                    _ => {
                        return Err(SolveError::Contract {
                            solver: "point algebra oracle",
                            atom: format!("{atom:?}"),
                        })
                    }
                },
                TheoryKind::Temporal(t) => {
                    let rel = t
                        .relation(&sym.name)
                        .ok_or_else(|| SolveError::UnresolvedRelation(sym.name.to_string()))?;
                    if rel.arity() != vals.len() {
                        return Err(SolveError::ArityMismatch {
                            name: sym.name.to_string(),
                            expected: rel.arity(),
                            found: vals.len(),
                        });
                    }
                    rel.contains(&WeakOrder::of_values(&vals))
                }
                _ => unreachable!("order oracle on {kind:?}"),
            };
            if !holds {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SolveResult::Sat(Model::Ranks(ranks)));
        }
    }
    Ok(SolveResult::Unsat)
}

/// Whether some tournament of `forbidden` appears as an induced subgraph,
/// checked over every vertex subset and every bijection.
fn embeds_any(forbidden: &crate::theories::TournamentSet, n: usize, arc: &dyn Fn(usize, usize) -> bool) -> bool {
    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }
    for t in forbidden.iter() {
        let k = t.order();
        if k > n {
            continue;
        }
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            for image in permutations(&subset) {
                let matches = (0..k).all(|u| (0..k).all(|w| u == w || arc(image[u], image[w]) == t.has_arc(u, w)));
                if matches {
                    return true;
                }
            }
        }
    }
    false
}

fn brute_henson(
    forbidden: &crate::theories::TournamentSet,
    loop_vertex: bool,
    vars: &[Variable],
    inst: &Instance,
    injective: bool,
) -> Result<SolveResult<Model>> {
    for atom in inst.atoms() {
        if let AtomKind::Rel(sym) = &atom.kind {
            if &*sym.name != "E" {
                return Err(SolveError::Contract {
                    solver: "henson oracle",
                    atom: format!("{atom:?}"),
                });
            }
        }
    }
    let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = inst
        .atoms()
        .filter(|a| a.is_rel())
        .map(|a| (index[&a.args[0]], index[&a.args[1]]))
        .collect();
    for rgs in PartitionIterator::new(vars.len())? {
        if injective && rgs.iter().enumerate().any(|(i, &b)| b != i) {
            continue;
        }
        if !values_agree_on_equalities(inst, |v| rgs[index[v]]) {
            continue;
        }
        let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
        let loop_choices: Vec<Option<usize>> = if loop_vertex {
            std::iter::once(None).chain((0..nblocks).map(Some)).collect()
        } else {
            vec![None]
        };
        for looped in loop_choices {
            // E between blocks: both looped, or an arc between distinct plain blocks
            let mut asserted = vec![vec![false; nblocks]; nblocks];
            let mut ok = true;
            for &(x, y) in &edges {
                let (bx, by) = (rgs[x], rgs[y]);
                match (Some(bx) == looped, Some(by) == looped) {
                    (true, true) => {}
                    (false, false) if bx != by => asserted[bx][by] = true,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let plain: Vec<usize> = (0..nblocks).filter(|&b| Some(b) != looped).collect();
            if let Some(arcs) = oriented_completion(forbidden, &plain, &asserted) {
                let pos = |b: usize| plain.iter().position(|&p| p == b).expect("plain block");
                let graph = Digraph::unlabelled(plain.len(), arcs.into_iter().map(|(u, v)| (pos(u), pos(v))))?;
                let assignment = vars
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let b = rgs[i];
                        let vertex = if Some(b) == looped {
                            Vertex::Loop
                        } else {
                            Vertex::Node(pos(b))
                        };
                        (v.clone(), vertex)
                    })
                    .collect();
                return Ok(SolveResult::Sat(Model::Digraph(DigraphModel { graph, assignment })));
            }
        }
    }
    Ok(SolveResult::Unsat)
}

/// Searches every oriented arc superset of `asserted` on the blocks `plain`
/// for one that omits the forbidden tournaments.
fn oriented_completion(
    forbidden: &crate::theories::TournamentSet,
    plain: &[usize],
    asserted: &[Vec<bool>],
) -> Option<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (i, &u) in plain.iter().enumerate() {
        for &v in &plain[i + 1..] {
            let options: Vec<Option<(usize, usize)>> = match (asserted[u][v], asserted[v][u]) {
                (true, true) => return None,
                (true, false) => vec![Some((u, v))],
                (false, true) => vec![Some((v, u))],
                (false, false) => vec![None, Some((u, v)), Some((v, u))],
            };
            pairs.push(options);
        }
    }
    let mut choice = vec![0usize; pairs.len()];
    let n = plain.len();
    loop {
        let arcs: Vec<(usize, usize)> = pairs.iter().zip(&choice).filter_map(|(opts, &c)| opts[c]).collect();
        let local = |b: usize| plain.iter().position(|&p| p == b).expect("plain block");
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &arcs {
            adj[local(u)][local(v)] = true;
        }
        if !embeds_any(forbidden, n, &|a, b| adj[a][b]) {
            return Some(arcs);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < pairs[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn brute_decide(kind: &TheoryKind, inst: &Instance, injective: bool, bound: usize) -> Result<SolveResult<Model>> {
    let vars: Vec<Variable> = inst.variables().into_iter().collect();
    check_bound("oracle variables", vars.len(), bound)?;
    match kind {
        TheoryKind::Equality => brute_equality(&vars, inst, injective),
        TheoryKind::PointAlgebra | TheoryKind::Temporal(_) => brute_order(kind, &vars, inst, injective),
        TheoryKind::Henson(h) => brute_henson(&h.forbidden, h.loop_vertex, &vars, inst, injective),
    }
}

/// Decides a pure instance of one theory by enumerating candidate models.
///
/// Equality searches partitions; the order theories search weak orders over
/// all variables; Henson theories search partitions, an optional block sent
/// to the loop vertex, and oriented arc supersets of the asserted arcs.
pub fn brute_decide_theory(kind: &TheoryKind, inst: &Instance) -> Result<SolveResult<Model>> {
    brute_decide(kind, inst, false, oracle_bound())
}

/// Decides the combined problem from the definition: some partition of all
/// variables respects the `Eq`/`Neq` atoms and makes every theory's part
/// satisfiable with its blocks sent to pairwise distinct values.
pub fn superpose_bruteforce(problem: &Problem) -> Result<SolveResult<CombinedWitness>> {
    superpose_bruteforce_with_bound(problem, oracle_bound())
}

pub fn superpose_bruteforce_with_bound(problem: &Problem, bound: usize) -> Result<SolveResult<CombinedWitness>> {
    let inst = &problem.instance;
    let vars: Vec<Variable> = inst.variables().into_iter().collect();
    check_bound("oracle variables", vars.len(), bound)?;
    let ids: Vec<TheoryId> = problem.theory_ids();
    for atom in inst.atoms() {
        if let Some(sym) = atom.symbol() {
            if !problem.theories.contains_key(&sym.theory) {
                return Err(SolveError::UnknownTheory(sym.theory.to_string()));
            }
        }
    }
    let split = split_by_signature(inst, &ids);

    'partitions: for rgs in PartitionIterator::new(vars.len())? {
        let block: BTreeMap<Variable, usize> = vars.iter().cloned().zip(rgs.iter().copied()).collect();
        if !values_agree_on_equalities(inst, |v| block[v]) {
            continue;
        }
        // every block is named by its first (least) variable
        let mut rep_of_block: BTreeMap<usize, Variable> = BTreeMap::new();
        for v in &vars {
            rep_of_block.entry(block[v]).or_insert_with(|| v.clone());
        }
        let rename: BTreeMap<Variable, Variable> = vars
            .iter()
            .map(|v| (v.clone(), rep_of_block[&block[v]].clone()))
            .collect();
        let mut models = BTreeMap::new();
        for (tid, part) in &split.parts {
            let collapsed = part.rename(&rename);
            match brute_decide(&problem.theories[tid].kind, &collapsed, true, bound)? {
                SolveResult::Sat(m) => {
                    models.insert(tid.clone(), m.pull_back(&rename));
                }
                SolveResult::Unsat => continue 'partitions,
            }
        }
        return Ok(SolveResult::Sat(CombinedWitness {
            arrangement: block,
            models,
        }));
    }
    Ok(SolveResult::Unsat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{Atom, RelationSymbol};
    use crate::theories::{HensonSolver, TemporalSolver, TournamentSet};

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn ordered_bell(n: usize) -> u64 {
        let mut a = vec![1u64];
        for m in 1..=n as u64 {
            a.push((1..=m).map(|k| binomial(m, k) * a[(m - k) as usize]).sum());
        }
        a[n]
    }

    fn bell(n: usize) -> u64 {
        let mut b = vec![1u64];
        for m in 0..n as u64 {
            b.push((0..=m).map(|k| binomial(m, k) * b[k as usize]).sum());
        }
        b[n]
    }

    #[test]
    fn weak_order_counts() {
        for n in 0..=MAX_WEAK_ORDER_SIZE {
            assert_eq!(
                enumerate_weak_orders(n).unwrap().count() as u64,
                ordered_bell(n),
                "n = {n}"
            );
        }
        assert_eq!((1..=5).map(ordered_bell).collect::<Vec<_>>(), vec![1, 3, 13, 75, 541]);
    }

    #[test]
    fn weak_orders_sorted_and_distinct() {
        let all: Vec<WeakOrder> = enumerate_weak_orders(4).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let two: Vec<String> = enumerate_weak_orders(2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(two, ["0/0", "0/1", "1/0"]);
        assert_eq!(enumerate_weak_orders(0).unwrap().count(), 1);
    }

    #[test]
    fn partition_counts() {
        for n in 0..=8 {
            assert_eq!(enumerate_partitions(n).unwrap().count() as u64, bell(n), "n = {n}");
        }
        assert_eq!((1..=5).map(bell).collect::<Vec<_>>(), vec![1, 2, 5, 15, 52]);
        assert_eq!(enumerate_partitions(0).unwrap().count(), 1);
    }

    #[test]
    fn bounds_are_errors() {
        assert!(enumerate_weak_orders(9).is_err());
        assert!(enumerate_partitions(11).is_err());
    }

    fn e(a: &str, b: &str) -> Atom {
        Atom::rel(RelationSymbol::new("h", "E", 2), vec![a.into(), b.into()])
    }

    #[test]
    fn temporal_mi_below_both() {
        let kind = TheoryKind::Temporal(TemporalSolver::with_mi());
        let sym = |n: &str, k| RelationSymbol::new("t", n, k);
        let inst = Instance::from_atoms([
            Atom::rel(sym("mi", 3), vec!["x".into(), "y".into(), "z".into()]),
            Atom::rel(sym("lt", 2), vec!["x".into(), "y".into()]),
            Atom::rel(sym("lt", 2), vec!["x".into(), "z".into()]),
        ]);
        assert_eq!(brute_decide_theory(&kind, &inst).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn henson_loop_vertex() {
        let b1 = TheoryKind::Henson(HensonSolver::with_loop_vertex(TournamentSet::c3()));
        let inst = Instance::from_atoms([e("x", "x")]);
        let res = brute_decide_theory(&b1, &inst).unwrap();
        let Some(Model::Digraph(d)) = res.witness() else {
            panic!()
        };
        assert_eq!(d.assignment[&Variable::new("x")], Vertex::Loop);

        let b = TheoryKind::Henson(HensonSolver::new(TournamentSet::c3()));
        assert_eq!(brute_decide_theory(&b, &inst).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn henson_completion_examples() {
        let b = TheoryKind::Henson(HensonSolver::new(TournamentSet::c3()));
        let decide = |atoms: Vec<Atom>| brute_decide_theory(&b, &Instance::from_atoms(atoms)).unwrap().verdict();
        use crate::theories::Verdict::*;
        assert_eq!(decide(vec![e("x", "y"), e("y", "z"), e("z", "x")]), Unsat);
        assert_eq!(decide(vec![e("x", "y"), e("y", "z")]), Sat);
        assert_eq!(decide(vec![e("x", "y"), e("y", "x"), e("y", "z"), e("z", "x")]), Unsat);
    }

    #[test]
    fn superposition_examples() {
        use crate::formulas::TheoryDecl;
        let pa = |t: &str, n: &str, a: &str, b: &str| Atom::rel(RelationSymbol::new(t, n, 2), vec![a.into(), b.into()]);
        let problem = Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_theory("t2", TheoryDecl::new(TheoryKind::PointAlgebra));
        let sat = problem.clone().with_instance(Instance::from_atoms([
            pa("t1", "lt", "x", "y"),
            pa("t2", "lt", "y", "x"),
        ]));
        assert!(superpose_bruteforce(&sat).unwrap().is_sat());

        let problem = Problem::new()
            .with_theory("t1", TheoryDecl::new(TheoryKind::PointAlgebra))
            .with_theory("t2", TheoryDecl::new(TheoryKind::Equality));
        let unsat = problem.clone().with_instance(Instance::from_atoms([
            pa("t1", "leq", "x", "y"),
            pa("t1", "leq", "y", "x"),
            Atom::neq("x", "y"),
        ]));
        assert_eq!(superpose_bruteforce(&unsat).unwrap(), SolveResult::Unsat);
        assert!(superpose_bruteforce(&problem).unwrap().is_sat());
    }

    #[test]
    fn superposition_bound() {
        let inst = Instance::from_atoms((0..5).map(|i| Atom::neq(format!("v{i}").as_str(), "w")));
        let p = Problem::new().with_instance(inst);
        assert!(matches!(
            superpose_bruteforce_with_bound(&p, 4),
            Err(SolveError::BoundExceeded { .. })
        ));
    }
}
