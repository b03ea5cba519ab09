use std::collections::BTreeMap;

use super::{check_equalities, contract, Model, SolveResult, TheorySolver, VarIndex};
use crate::error::Result;
use crate::formulas::{AtomKind, Instance};
use crate::union_find::UnionFind;

/// Pure equality over an infinite domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EqualitySolver;

pub fn eq_decide(inst: &Instance) -> Result<SolveResult<Model>> {
    let vars = VarIndex::new(inst);
    let mut uf = UnionFind::new(vars.len());
    for atom in inst.atoms() {
        match atom.kind {
            AtomKind::Eq => {
                uf.union(vars.of(&atom.args[0]), vars.of(&atom.args[1]));
            }
            AtomKind::Neq => {}
            AtomKind::Rel(_) => return Err(contract("equality", atom)),
        }
    }
    for atom in inst.atoms().filter(|a| a.is_neq()) {
        if uf.same(vars.of(&atom.args[0]), vars.of(&atom.args[1])) {
            return Ok(SolveResult::Unsat);
        }
    }
    // Blocks are numbered in order of their least-named member.
    let mut block_of_root = BTreeMap::new();
    let mut blocks = BTreeMap::new();
    for (i, v) in vars.vars.iter().enumerate() {
        let next = block_of_root.len();
        let b = *block_of_root.entry(uf.find(i)).or_insert(next);
        blocks.insert(v.clone(), b);
    }
    Ok(SolveResult::Sat(Model::Blocks(blocks)))
}

impl TheorySolver for EqualitySolver {
    fn name(&self) -> &'static str {
        "equality"
    }

    fn decide(&self, inst: &Instance) -> Result<SolveResult<Model>> {
        eq_decide(inst)
    }

    fn check_model(&self, inst: &Instance, model: &Model) -> Result<()> {
        if let Some(atom) = inst.atoms().find(|a| a.is_rel()) {
            return Err(contract("equality", atom));
        }
        check_equalities(inst, model)
    }
}
