//! Node-equivalence checks used when reducing the diagram.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::Predicate;
use crate::lp;
use crate::milp::{isomorphs, valuation_radius, FuturePair, MilpParams};
use crate::reach::PropagatedPredicates;

/// Decides whether two same-level nodes accept the same suffixes over the
/// remaining predicates.
pub trait NodeEquivalence: Send + Sync {
    fn name(&self) -> &'static str;

    /// Called once per construction before any comparison.
    fn prepare(&mut self, _pp: &PropagatedPredicates) -> Result<()> {
        Ok(())
    }

    /// `future` lists the remaining predicate indices in level order.
    fn equivalent(
        &self,
        pp: &PropagatedPredicates,
        a: &Predicate,
        b: &Predicate,
        future: &[usize],
    ) -> Result<bool>;
}

/// Two-phase Farkas distinguisher solved by branch and bound.
#[derive(Debug, Clone, Default)]
pub struct FarkasMilp {
    pub params: MilpParams,
}

impl NodeEquivalence for FarkasMilp {
    fn name(&self) -> &'static str {
        "farkas-milp"
    }

    /// Sizes big-M constants from the extent of the root predicate.
    fn prepare(&mut self, pp: &PropagatedPredicates) -> Result<()> {
        if let Some(r) = valuation_radius(pp.root())? {
            self.params.radius = Some(r.max(1.0));
        }
        Ok(())
    }

    fn equivalent(
        &self,
        pp: &PropagatedPredicates,
        a: &Predicate,
        b: &Predicate,
        future: &[usize],
    ) -> Result<bool> {
        let pairs: Vec<FuturePair> = future
            .iter()
            .map(|&p| (pp.pos_row(p).clone(), pp.neg_row(p).clone()))
            .collect();
        isomorphs(a, b, &pairs, &self.params)
    }
}

/// Compares suffix sets enumerated with one LP per prefix.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exhaustive;

impl NodeEquivalence for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn equivalent(
        &self,
        pp: &PropagatedPredicates,
        a: &Predicate,
        b: &Predicate,
        future: &[usize],
    ) -> Result<bool> {
        Ok(suffix_paths(pp, a, future)? == suffix_paths(pp, b, future)?)
    }
}

/// All assignments to `future` (in that order) that keep `base` feasible.
pub fn suffix_paths(
    pp: &PropagatedPredicates,
    base: &Predicate,
    future: &[usize],
) -> Result<BTreeSet<Vec<bool>>> {
    fn walk(
        pp: &PropagatedPredicates,
        pred: &Predicate,
        future: &[usize],
        prefix: &mut Vec<bool>,
        out: &mut BTreeSet<Vec<bool>>,
    ) -> Result<()> {
        let Some((&p, rest)) = future.split_first() else {
            out.insert(prefix.clone());
            return Ok(());
        };
        for bit in [true, false] {
            let next = pred.and(pp.row(p, bit));
            if lp::check_feasible(&next)?.is_some() {
                prefix.push(bit);
                walk(pp, &next, rest, prefix, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    let mut out = BTreeSet::new();
    if lp::check_feasible(base)?.is_some() {
        walk(pp, base, future, &mut Vec::new(), &mut out)?;
    }
    Ok(out)
}

type Constructor = fn() -> Box<dyn NodeEquivalence>;

static EQUIVALENCES: &[(&str, Constructor)] = &[
    ("farkas-milp", || Box::new(FarkasMilp::default())),
    ("exhaustive", || Box::new(Exhaustive)),
];

/// Names of the registered equivalence checks; the first is the default.
pub fn equivalence_names() -> Vec<&'static str> {
    EQUIVALENCES.iter().map(|(n, _)| *n).collect()
}

pub fn make_equivalence(name: &str) -> Result<Box<dyn NodeEquivalence>> {
    EQUIVALENCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, make)| make())
        .ok_or_else(|| Error::UnknownStrategy {
            what: "equivalence check",
            name: name.to_string(),
            available: equivalence_names().join(", "),
        })
}
