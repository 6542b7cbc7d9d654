mod common;

use std::collections::BTreeSet;
use std::sync::Mutex;

use proptest::prelude::*;
use starbdd::bdd::{
    make_ordering, suffix_paths, Bdd, FarkasMilp, NodeEquivalence, VariableOrder,
};
use starbdd::geometry::Predicate;
use starbdd::lp;
use starbdd::milp::{isomorphs, FuturePair};
use starbdd::reach::PropagatedPredicates;

/// Farkas check that records any merge the exhaustive suffix sets disagree with.
struct Audited {
    inner: FarkasMilp,
    disagreements: Mutex<Vec<String>>,
}

impl NodeEquivalence for Audited {
    fn name(&self) -> &'static str {
        "audited"
    }

    fn prepare(&mut self, pp: &PropagatedPredicates) -> starbdd::Result<()> {
        self.inner.prepare(pp)
    }

    fn equivalent(
        &self,
        pp: &PropagatedPredicates,
        a: &Predicate,
        b: &Predicate,
        future: &[usize],
    ) -> starbdd::Result<bool> {
        let verdict = self.inner.equivalent(pp, a, b, future)?;
        if verdict && suffix_paths(pp, a, future)? != suffix_paths(pp, b, future)? {
            self.disagreements.lock().unwrap().push(format!("future {future:?}"));
        }
        Ok(verdict)
    }
}

fn time_strings(bdd: &Bdd, pp: &PropagatedPredicates) -> BTreeSet<Vec<bool>> {
    bdd.traverse(pp).unwrap().into_iter().map(|c| c.bits).collect()
}

fn level_order(order: &VariableOrder, mask: u32, len: usize) -> Vec<(usize, bool)> {
    (0..len).map(|j| (order.at(j), mask >> (len - 1 - j) & 1 == 1)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn merges_are_sound_and_language_is_kept(seed in 0u64..2000, which in 0usize..3) {
        let Some(case) = common::random_case(seed, 6) else { return Ok(()) };
        let pp = &case.pp;
        let order = make_ordering(["default", "random", "middle"][which], pp.k(), seed).unwrap();
        let obdd = Bdd::construct(pp, &order, false).unwrap();
        let mut audited = Audited { inner: FarkasMilp::default(), disagreements: Mutex::new(Vec::new()) };
        let robdd = Bdd::construct_with(pp, &order, Some(&mut audited)).unwrap();
        let bad = audited.disagreements.into_inner().unwrap();
        prop_assert!(bad.is_empty(), "unsound merges: {:?}", bad);
        prop_assert_eq!(time_strings(&obdd, pp), time_strings(&robdd, pp));
        let (so, sr) = (obdd.stats(), robdd.stats());
        prop_assert!(sr.nodes <= so.nodes && sr.width <= so.width);
        for bdd in [&obdd, &robdd] {
            let widest = bdd.levels().iter().map(Vec::len).max().unwrap();
            prop_assert_eq!(bdd.stats().width, widest.max(2));
        }
    }

    #[test]
    fn language_does_not_depend_on_ordering(seed in 0u64..2000) {
        let Some(case) = common::random_case(seed, 6) else { return Ok(()) };
        let pp = &case.pp;
        let reference = time_strings(&Bdd::construct(pp, &VariableOrder::identity(pp.k()), false).unwrap(), pp);
        for name in ["random", "middle"] {
            let order = make_ordering(name, pp.k(), seed).unwrap();
            prop_assert_eq!(&time_strings(&Bdd::construct(pp, &order, false).unwrap(), pp), &reference);
        }
    }

    #[test]
    fn accepted_strings_are_exactly_the_feasible_ones(seed in 0u64..2000) {
        let Some(case) = common::random_case(seed, 6) else { return Ok(()) };
        let pp = &case.pp;
        let k = pp.k();
        let order = make_ordering("random", k, seed).unwrap();
        let bdd = Bdd::construct(pp, &order, true).unwrap();
        let accepted: BTreeSet<Vec<bool>> = bdd.traverse(pp).unwrap().into_iter().map(|c| {
            let pred = pp.conjunction(c.bits.iter().enumerate().map(|(p, &b)| (p, b)));
            assert!(pred.is_satisfied(&c.witness, 1e-7), "witness of {}", c.time_string());
            c.raw
        }).collect();
        for mask in 0..1u32 << k {
            let choice = level_order(&order, mask, k);
            let raw: Vec<bool> = choice.iter().map(|&(_, b)| b).collect();
            let feasible = lp::check_feasible(&pp.conjunction(choice)).unwrap().is_some();
            prop_assert_eq!(accepted.contains(&raw), feasible);
        }
        // infeasible prefixes have no accepted extension
        for len in 1..k {
            for mask in 0..1u32 << len {
                let choice = level_order(&order, mask, len);
                if lp::check_feasible(&pp.conjunction(choice.clone())).unwrap().is_none() {
                    let prefix: Vec<bool> = choice.iter().map(|&(_, b)| b).collect();
                    prop_assert!(accepted.iter().all(|s| !s.starts_with(&prefix)));
                }
            }
        }
    }

    #[test]
    fn isomorphism_is_symmetric(seed in 0u64..2000, level in 1usize..5) {
        let Some(case) = common::random_case(seed, 6) else { return Ok(()) };
        let pp = &case.pp;
        let k = pp.k();
        prop_assume!(level < k);
        let mut check = FarkasMilp::default();
        check.prepare(pp).unwrap();
        let order = VariableOrder::identity(k);
        let prefixes: Vec<Predicate> = (0..1u32 << level)
            .map(|m| pp.conjunction(level_order(&order, m, level)))
            .filter(|p| lp::check_feasible(p).unwrap().is_some())
            .collect();
        let future: Vec<FuturePair> = (level..k).map(|p| (pp.pos_row(p).clone(), pp.neg_row(p).clone())).collect();
        for (i, a) in prefixes.iter().enumerate() {
            for b in &prefixes[i + 1..] {
                let ab = isomorphs(a, b, &future, &check.params).unwrap();
                let ba = isomorphs(b, a, &future, &check.params).unwrap();
                prop_assert_eq!(ab, ba);
            }
        }
    }
}
