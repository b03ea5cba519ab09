//! Combination of decision procedures for constraint satisfaction over
//! ω-categorical theories.
//!
//! Individual theories (pure equality, the point algebra over the rationals,
//! temporal relations given by order types, and Henson digraphs) decide pure
//! instances. The [`combine`] engine decides instances mixing several
//! theories, either by equality propagation when every theory is convex or by
//! complete search over arrangements of the shared variables. The [`oracle`]
//! module re-decides everything by brute-force enumeration of finite models.

pub mod analysis;
pub mod combine;
mod error;
pub mod formulas;
pub mod henson;
pub mod oracle;
pub mod theories;
mod union_find;

pub use error::{Result, SolveError};
pub use formulas::{Atom, AtomKind, Instance, PPFormula, Problem, RelationSymbol, TheoryDecl, TheoryId, Variable};
pub use theories::{Model, SolveResult, TheoryKind, TheorySolver, Verdict};
