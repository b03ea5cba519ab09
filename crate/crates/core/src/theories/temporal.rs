use std::collections::BTreeMap;

use super::{check_equalities, Model, SolveResult, TemporalRelation, TheorySolver, VarIndex, WeakOrder};
use crate::error::{Result, SolveError};
use crate::formulas::{Atom, AtomKind, Instance};

const LT: u8 = 1;
const EQ: u8 = 2;
const GT: u8 = 4;
const ANY: u8 = LT | EQ | GT;

/// First-order reducts of `(Q; <)` given by order types. `lt` and `leq` are
/// always available; further relations are declared by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalSolver {
    declared: BTreeMap<String, TemporalRelation>,
    all: BTreeMap<String, TemporalRelation>,
}

impl Default for TemporalSolver {
    fn default() -> Self {
        Self::new(BTreeMap::new())
    }
}

impl TemporalSolver {
    pub fn new(declared: BTreeMap<String, TemporalRelation>) -> Self {
        let mut all = declared.clone();
        all.entry("lt".into()).or_insert_with(TemporalRelation::lt);
        all.entry("leq".into()).or_insert_with(TemporalRelation::leq);
        TemporalSolver { declared, all }
    }

    /// `lt`, `leq` and `mi` (the relation `x >= y or x > z`).
    pub fn with_mi() -> Self {
        Self::new([("mi".to_string(), TemporalRelation::mi())].into_iter().collect())
    }

    pub fn relation(&self, name: &str) -> Option<&TemporalRelation> {
        self.all.get(name)
    }

    /// Relations declared explicitly, without the implicit `lt`/`leq`.
    pub fn declared(&self) -> &BTreeMap<String, TemporalRelation> {
        &self.declared
    }

    pub fn relation_names(&self) -> Vec<String> {
        self.all.keys().cloned().collect()
    }

    fn resolve<'a>(&'a self, atom: &Atom) -> Result<Option<&'a TemporalRelation>> {
        let AtomKind::Rel(sym) = &atom.kind else {
            return Ok(None);
        };
        let rel = self
            .relation(&sym.name)
            .ok_or_else(|| SolveError::UnresolvedRelation(sym.name.to_string()))?;
        if rel.arity() != atom.args.len() {
            return Err(SolveError::ArityMismatch {
                name: sym.name.to_string(),
                expected: rel.arity(),
                found: atom.args.len(),
            });
        }
        Ok(Some(rel))
    }
}

pub fn temporal_decide(inst: &Instance, solver: &TemporalSolver) -> Result<SolveResult<Model>> {
    solver.decide(inst)
}

fn compose_basic(a: u8, b: u8) -> u8 {
    match (a, b) {
        (EQ, x) | (x, EQ) => x,
        (LT, LT) => LT,
        (GT, GT) => GT,
        _ => ANY,
    }
}

fn converse(m: u8) -> u8 {
    (m & EQ) | ((m & LT) << 2) | ((m & GT) >> 2)
}

/// Composition of disjunctive relations, indexed by the two masks.
fn compose_table() -> [[u8; 8]; 8] {
    let mut t = [[0u8; 8]; 8];
    for (a, row) in t.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for x in [LT, EQ, GT] {
                for y in [LT, EQ, GT] {
                    if a as u8 & x != 0 && b as u8 & y != 0 {
                        *cell |= compose_basic(x, y);
                    }
                }
            }
        }
    }
    t
}

struct Search<'a> {
    n: usize,
    constraints: Vec<(&'a TemporalRelation, Vec<usize>)>,
    compose: [[u8; 8]; 8],
}

impl Search<'_> {
    fn set(&self, m: &mut [u8], i: usize, j: usize, v: u8) {
        m[i * self.n + j] = v;
        m[j * self.n + i] = converse(v);
    }

    /// Path consistency plus per-constraint filtering, to fixpoint.
    /// Returns false on a wipe-out.
    fn propagate(&self, m: &mut [u8]) -> bool {
        let n = self.n;
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut cur = m[i * n + j];
                    for k in 0..n {
                        if k != i && k != j {
                            cur &= self.compose[m[i * n + k] as usize][m[k * n + j] as usize];
                        }
                    }
                    if cur != m[i * n + j] {
                        if cur == 0 {
                            return false;
                        }
                        self.set(m, i, j, cur);
                        changed = true;
                    }
                }
            }
            for (rel, args) in &self.constraints {
                let k = args.len();
                let mut support = vec![0u8; k * k];
                let mut any = false;
                for ot in rel.allowed() {
                    let fits = (0..k).all(|p| {
                        ((p + 1)..k).all(|q| {
                            let r = ot.relation(p, q).bit();
                            m[args[p] * n + args[q]] & r != 0
                        })
                    });
                    if fits {
                        any = true;
                        for p in 0..k {
                            for q in (p + 1)..k {
                                support[p * k + q] |= ot.relation(p, q).bit();
                            }
                        }
                    }
                }
                if !any {
                    return false;
                }
                for p in 0..k {
                    for q in (p + 1)..k {
                        let (a, b) = (args[p], args[q]);
                        if a == b {
                            continue;
                        }
                        let cur = m[a * n + b] & support[p * k + q];
                        if cur != m[a * n + b] {
                            if cur == 0 {
                                return false;
                            }
                            self.set(m, a, b, cur);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn solve(&self, mut m: Vec<u8>) -> Option<Vec<u8>> {
        if !self.propagate(&mut m) {
            return None;
        }
        let n = self.n;
        let open = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .find(|&(i, j)| !m[i * n + j].is_power_of_two());
        let Some((i, j)) = open else {
            return Some(m);
        };
        for status in [LT, EQ, GT] {
            if m[i * n + j] & status != 0 {
                let mut branch = m.clone();
                self.set(&mut branch, i, j, status);
                if let Some(found) = self.solve(branch) {
                    return Some(found);
                }
            }
        }
        None
    }
}

impl TheorySolver for TemporalSolver {
    fn name(&self) -> &'static str {
        "temporal"
    }

    /// Branch-and-prune over the pairwise statuses `<`, `=`, `>` of the
    /// lexicographically smallest undecided pair.
    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>> {
        let vars = VarIndex::new(inst);
        let n = vars.len();
        let mut masks = vec![ANY; n * n];
        for i in 0..n {
            masks[i * n + i] = EQ;
        }
        let mut constraints = Vec::new();
        for atom in inst.atoms() {
            let args: Vec<usize> = atom.args.iter().map(|v| vars.of(v)).collect();
            let fixed = match &atom.kind {
                AtomKind::Eq => EQ,
                AtomKind::Neq => LT | GT,
                AtomKind::Rel(_) => {
                    let rel = self.resolve(atom)?.expect("relational atom");
                    constraints.push((rel, args));
                    continue;
                }
            };
            let (a, b) = (args[0], args[1]);
            let cur = masks[a * n + b] & fixed;
            if cur == 0 {
                return Ok(SolveResult::Unsat);
            }
            masks[a * n + b] = cur;
            masks[b * n + a] = converse(cur);
        }
        let search = Search {
            n,
            constraints,
            compose: compose_table(),
        };
        let Some(solved) = search.solve(masks) else {
            return Ok(SolveResult::Unsat);
        };

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| match solved[a * n + b] {
            LT => std::cmp::Ordering::Less,
            GT => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        });
        let mut rank = vec![0usize; n];
        for w in 1..order.len() {
            let (prev, cur) = (order[w - 1], order[w]);
            rank[cur] = rank[prev] + usize::from(solved[prev * n + cur] == LT);
        }
        let ranks = vars
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), rank[i]))
            .collect();
        let model = Model::Ranks(ranks);
        debug_assert!(self.check_model(inst, &model).is_ok());
        Ok(SolveResult::Sat(model))
    }

    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()> {
        let Model::Ranks(ranks) = model else {
            return Err(SolveError::Witness("temporal theory expects ranks".into()));
        };
        check_equalities(inst, model)?;
        for atom in inst.atoms() {
            if let Some(rel) = self.resolve(atom)? {
                let values: Vec<usize> = atom.args.iter().map(|v| ranks[v]).collect();
                if !rel.contains(&WeakOrder::of_values(&values)) {
                    return Err(SolveError::Witness(format!("{atom:?} is violated")));
                }
            }
        }
        Ok(())
    }
}
