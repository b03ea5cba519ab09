use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Result, SolveError};
use crate::oracle::enumerate_weak_orders;

/// Largest arity accepted by [`relation_from_predicate`].
pub const MAX_PREDICATE_ARITY: usize = 7;

/// One of the three basic relations between two rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel3 {
    Lt,
    Eq,
    Gt,
}

impl Rel3 {
    pub const ALL: [Rel3; 3] = [Rel3::Lt, Rel3::Eq, Rel3::Gt];

    pub fn bit(self) -> u8 {
        match self {
            Rel3::Lt => 1,
            Rel3::Eq => 2,
            Rel3::Gt => 4,
        }
    }

    pub fn converse(self) -> Rel3 {
        match self {
            Rel3::Lt => Rel3::Gt,
            Rel3::Eq => Rel3::Eq,
            Rel3::Gt => Rel3::Lt,
        }
    }

    pub fn of<T: Ord>(a: T, b: T) -> Rel3 {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Rel3::Lt,
            std::cmp::Ordering::Equal => Rel3::Eq,
            std::cmp::Ordering::Greater => Rel3::Gt,
        }
    }
}

/// The order type of a tuple: a rank per position, ranks contiguous from 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeakOrder {
    ranks: Vec<u8>,
}

impl WeakOrder {
    pub fn new(ranks: Vec<u8>) -> Result<Self> {
        let used: BTreeSet<u8> = ranks.iter().copied().collect();
        if used.iter().enumerate().any(|(i, &r)| r as usize != i) {
            return Err(SolveError::InvalidArgument(format!(
                "ranks {ranks:?} are not contiguous from 0"
            )));
        }
        Ok(WeakOrder { ranks })
    }

    /// Caller guarantees contiguity.
    pub(crate) fn from_ranks_unchecked(ranks: Vec<u8>) -> Self {
        debug_assert!(WeakOrder::new(ranks.clone()).is_ok());
        WeakOrder { ranks }
    }

    /// The order type of an arbitrary sequence of comparable values.
    pub fn of_values<T: Ord>(values: &[T]) -> Self {
        let distinct: BTreeSet<&T> = values.iter().collect();
        let ranks = values
            .iter()
            .map(|v| distinct.range::<&T, _>(..v).count() as u8)
            .collect();
        WeakOrder { ranks }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn rank(&self, pos: usize) -> u8 {
        self.ranks[pos]
    }

    pub fn relation(&self, p: usize, q: usize) -> Rel3 {
        Rel3::of(self.ranks[p], self.ranks[q])
    }
}

impl fmt::Debug for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Slash-separated rank list, e.g. `0/1/0`.
impl fmt::Display for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A relation over the rationals given extensionally by its order types.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TemporalRelation {
    arity: usize,
    allowed: BTreeSet<WeakOrder>,
}

impl TemporalRelation {
    pub fn new(arity: usize, allowed: impl IntoIterator<Item = WeakOrder>) -> Result<Self> {
        if arity == 0 {
            return Err(SolveError::InvalidArgument("arity must be positive".into()));
        }
        let allowed: BTreeSet<WeakOrder> = allowed.into_iter().collect();
        if let Some(bad) = allowed.iter().find(|w| w.len() != arity) {
            return Err(SolveError::InvalidArgument(format!(
                "order type {bad} does not have length {arity}"
            )));
        }
        Ok(TemporalRelation { arity, allowed })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn allowed(&self) -> &BTreeSet<WeakOrder> {
        &self.allowed
    }

    pub fn contains(&self, ot: &WeakOrder) -> bool {
        self.allowed.contains(ot)
    }

    fn binary(types: &[[u8; 2]]) -> Self {
        TemporalRelation {
            arity: 2,
            allowed: types
                .iter()
                .map(|t| WeakOrder::from_ranks_unchecked(t.to_vec()))
                .collect(),
        }
    }

    pub fn lt() -> Self {
        Self::binary(&[[0, 1]])
    }

    pub fn leq() -> Self {
        Self::binary(&[[0, 0], [0, 1]])
    }

    pub fn eq() -> Self {
        Self::binary(&[[0, 0]])
    }

    pub fn neq() -> Self {
        Self::binary(&[[0, 1], [1, 0]])
    }

    /// `{(x, y, z) : x >= y or x > z}`.
    pub fn mi() -> Self {
        relation_from_predicate(3, |w| w.rank(0) >= w.rank(1) || w.rank(0) > w.rank(2))
            .expect("arity 3 is within bounds")
    }
}

/// All order types of the given arity satisfying `predicate`.
pub fn relation_from_predicate(arity: usize, predicate: impl Fn(&WeakOrder) -> bool) -> Result<TemporalRelation> {
    if arity > MAX_PREDICATE_ARITY {
        return Err(SolveError::BoundExceeded {
            what: "relation arity",
            found: arity,
            bound: MAX_PREDICATE_ARITY,
        });
    }
    TemporalRelation::new(arity, enumerate_weak_orders(arity)?.filter(|w| predicate(w)))
}
