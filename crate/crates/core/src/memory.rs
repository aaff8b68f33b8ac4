//! Short-term memory as a move-to-front stack.
//!
//! Retrieval cost of a symbol is `log2` of its 1-based depth in the stack,
//! measured before the symbol is moved back to the top.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bits::BitLength;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

/// One timestamped occurrence in a stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub t: u64,
    #[serde(rename = "s")]
    pub symbol: SymbolId,
}

impl Observation {
    pub fn new(t: u64, symbol: impl Into<SymbolId>) -> Self {
        Observation {
            t,
            symbol: symbol.into(),
        }
    }
}

/// Determination test: does the observation fall under the reference?
///
/// Identity on symbols; time plays no part.
#[inline]
pub fn matches(o: &Observation, reference: &SymbolId) -> bool {
    o.symbol == *reference
}

/// Move-to-front stack. Position 1 is the top.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "StackRepr", into = "StackRepr")]
pub struct StmStack {
    // back of the deque is the top of the stack
    items: VecDeque<SymbolId>,
    members: HashSet<SymbolId>,
    capacity: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct StackRepr {
    /// Top first.
    items: Vec<SymbolId>,
    capacity: Option<usize>,
}

impl From<StackRepr> for StmStack {
    fn from(r: StackRepr) -> Self {
        let members = r.items.iter().cloned().collect();
        StmStack {
            items: r.items.into_iter().rev().collect(),
            members,
            capacity: r.capacity,
        }
    }
}

impl From<StmStack> for StackRepr {
    fn from(s: StmStack) -> Self {
        StackRepr {
            items: s.items.into_iter().rev().collect(),
            capacity: s.capacity,
        }
    }
}

impl StmStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bounded stack; `capacity` must be at least 1.
    pub fn with_capacity(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::param("capacity", "must be at least 1"));
        }
        Ok(StmStack {
            capacity: Some(capacity),
            ..Self::default()
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn contains(&self, x: &SymbolId) -> bool {
        self.members.contains(x)
    }

    /// 1-based position of `x`, or `None` if absent.
    pub fn position(&self, x: &SymbolId) -> Option<usize> {
        if !self.members.contains(x) {
            return None;
        }
        self.items.iter().rev().position(|s| s == x).map(|i| i + 1)
    }

    /// Items from top to bottom.
    pub fn iter(&self) -> impl Iterator<Item = &SymbolId> + '_ {
        self.items.iter().rev()
    }

    /// Moves `x` to the top, returning its position before the move.
    pub fn observe(&mut self, x: &SymbolId) -> Option<usize> {
        if self.members.contains(x) {
            let len = self.items.len();
            let depth = self
                .items
                .iter()
                .rev()
                .position(|s| s == x)
                .expect("member present in stack");
            let idx = len - 1 - depth;
            let item = self.items.remove(idx).expect("index in range");
            self.items.push_back(item);
            return Some(depth + 1);
        }
        self.items.push_back(x.clone());
        self.members.insert(x.clone());
        if let Some(cap) = self.capacity {
            while self.items.len() > cap {
                let evicted = self.items.pop_front().expect("nonempty");
                self.members.remove(&evicted);
            }
        }
        None
    }
}

/// Description cost `log2(position)` of a retrieval from short-term memory.
pub fn stm_complexity<S: Scalar>(pre_position: Option<usize>) -> Result<BitLength<S>> {
    match pre_position {
        None => Ok(BitLength::infinite()),
        Some(0) => Err(Error::InvalidPosition(0)),
        Some(p) => BitLength::log2_of(S::of_usize(p)),
    }
}
