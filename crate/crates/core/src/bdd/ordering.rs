//! Variable orderings over the `k` propagated predicates.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A permutation of `0..k`: level `j` of the diagram decides predicate `order[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableOrder(Vec<usize>);

impl VariableOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        let mut seen = vec![false; k];
        for &p in &order {
            if p >= k || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{order:?} is not a permutation of 0..{k}"
                )));
            }
            seen[p] = true;
        }
        Ok(Self(order))
    }

    /// Parses a 1-based list such as `3,2,1,4,5`.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let order = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .and_then(|v| v.checked_sub(1))
                    .ok_or_else(|| Error::InvalidArgument(format!("bad ordering entry `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }

    pub fn identity(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Predicate decided at level `j`.
    pub fn at(&self, j: usize) -> usize {
        self.0[j]
    }

    /// Reorders bits given per level into predicate (time) order.
    pub fn to_time_order<T: Copy + Default>(&self, by_level: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.0.len()];
        for (j, &p) in self.0.iter().enumerate() {
            out[p] = by_level[j];
        }
        out
    }

    /// Inverse of [`Self::to_time_order`].
    pub fn to_level_order<T: Copy + Default>(&self, by_predicate: &[T]) -> Vec<T> {
        self.0.iter().map(|&p| by_predicate[p]).collect()
    }
}

impl fmt::Display for VariableOrder {
    /// 1-based, e.g. `[3, 2, 1, 4, 5]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", p + 1)?;
        }
        write!(f, "]")
    }
}

pub trait OrderingStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether `seed` influences the result.
    fn seeded(&self) -> bool {
        false
    }

    fn order(&self, k: usize, seed: u64) -> VariableOrder;
}

/// Time order.
pub struct DefaultOrder;

/// Seeded Fisher-Yates shuffle.
pub struct RandomOrder;

/// First half (rounded up) reversed, tail unchanged.
pub struct MiddleOrder;

impl OrderingStrategy for DefaultOrder {
    fn name(&self) -> &'static str {
        "default"
    }

    fn order(&self, k: usize, _seed: u64) -> VariableOrder {
        VariableOrder::identity(k)
    }
}

impl OrderingStrategy for RandomOrder {
    fn name(&self) -> &'static str {
        "random"
    }

    fn seeded(&self) -> bool {
        true
    }

    fn order(&self, k: usize, seed: u64) -> VariableOrder {
        let mut v: Vec<usize> = (0..k).collect();
        v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        VariableOrder(v)
    }
}

impl OrderingStrategy for MiddleOrder {
    fn name(&self) -> &'static str {
        "middle"
    }

    fn order(&self, k: usize, _seed: u64) -> VariableOrder {
        let mut v: Vec<usize> = (0..k).collect();
        v[..k.div_ceil(2)].reverse();
        VariableOrder(v)
    }
}

static ORDERINGS: &[&dyn OrderingStrategy] = &[&DefaultOrder, &RandomOrder, &MiddleOrder];

/// Registered ordering strategies, in display order.
pub fn ordering_strategies() -> &'static [&'static dyn OrderingStrategy] {
    ORDERINGS
}

pub fn ordering_strategy(name: &str) -> Result<&'static dyn OrderingStrategy> {
    ORDERINGS
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownStrategy {
            what: "ordering",
            name: name.to_string(),
            available: ORDERINGS.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "),
        })
}

pub fn make_ordering(kind: &str, k: usize, seed: u64) -> Result<VariableOrder> {
    if k == 0 {
        return Err(Error::InvalidArgument("ordering needs at least one predicate".into()));
    }
    Ok(ordering_strategy(kind)?.order(k, seed))
}
