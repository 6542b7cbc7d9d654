mod common;

use std::collections::BTreeSet;

use starbdd::bdd::{make_equivalence, make_ordering, suffix_paths, Bdd, Exhaustive, VariableOrder};
use starbdd::oracle::brute_force;
use starbdd::reach::witness_trace;
use starbdd::report::{compare, CompareOptions};

use common::{bits, oscillator};

const ACCEPTED: [&str; 10] = [
    "00000", "00100", "01000", "01100", "01101", "11000", "11100", "11101", "11110", "11111",
];

fn accepted() -> BTreeSet<Vec<bool>> {
    ACCEPTED.iter().map(|s| bits(s)).collect()
}

fn level_sizes(bdd: &Bdd) -> Vec<usize> {
    bdd.levels().iter().map(Vec::len).collect()
}

#[test]
fn default_ordering_sizes() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let order = VariableOrder::identity(5);
    let obdd = Bdd::construct(pp, &order, false).unwrap();
    assert_eq!((obdd.stats().nodes, obdd.stats().width), (21, 7));
    assert_eq!(level_sizes(&obdd), [1, 2, 3, 6, 7]);
    let robdd = Bdd::construct(pp, &order, true).unwrap();
    assert_eq!((robdd.stats().nodes, robdd.stats().width), (13, 3));
    assert_eq!(level_sizes(&robdd), [1, 2, 3, 3, 2]);
}

#[test]
fn middle_ordering_sizes() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let order = make_ordering("middle", 5, 0).unwrap();
    assert_eq!(order.to_string(), "[3, 2, 1, 4, 5]");
    let obdd = Bdd::construct(pp, &order, false).unwrap();
    assert_eq!((obdd.stats().nodes, obdd.stats().width), (22, 7));
    let robdd = Bdd::construct(pp, &order, true).unwrap();
    assert_eq!((robdd.stats().nodes, robdd.stats().width), (13, 3));
}

#[test]
fn every_ordering_and_check_accepts_the_same_ten() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    for (name, seed) in [("default", 0), ("middle", 0), ("random", 0), ("random", 1)] {
        let order = make_ordering(name, 5, seed).unwrap();
        for eq in [None, Some("farkas-milp"), Some("exhaustive")] {
            let bdd = match eq {
                Some(n) => {
                    let mut check = make_equivalence(n).unwrap();
                    Bdd::construct_with(pp, &order, Some(check.as_mut())).unwrap()
                }
                None => Bdd::construct_with(pp, &order, None).unwrap(),
            };
            let got: BTreeSet<Vec<bool>> = bdd.traverse(pp).unwrap().into_iter().map(|c| c.bits).collect();
            assert_eq!(got, accepted(), "{name}:{seed} {eq:?}");
        }
    }
}

#[test]
fn both_checks_reduce_alike() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let order = VariableOrder::identity(5);
    let milp = Bdd::construct(pp, &order, true).unwrap();
    let mut exhaustive = Exhaustive;
    let enumerated = Bdd::construct_with(pp, &order, Some(&mut exhaustive)).unwrap();
    assert_eq!(level_sizes(&milp), level_sizes(&enumerated));
    assert_eq!(milp.equivalence(), Some("farkas-milp"));
    assert_eq!(enumerated.equivalence(), Some("exhaustive"));
}

#[test]
fn oracle_agrees() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let order = VariableOrder::identity(5);
    assert_eq!(brute_force(pp, &order, false).unwrap(), accepted());
    assert_eq!(brute_force(pp, &order, true).unwrap(), accepted());
}

#[test]
fn demonstration_suffixes() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let high = pp.conjunction([(0, true), (1, true), (2, true)]);
    let low = pp.conjunction([(0, true), (1, true), (2, false)]);
    let four: BTreeSet<Vec<bool>> = ["00", "01", "10", "11"].iter().map(|s| bits(s)).collect();
    assert_eq!(suffix_paths(pp, &high, &[3, 4]).unwrap(), four);
    assert_eq!(suffix_paths(pp, &low, &[3, 4]).unwrap(), [bits("00")].into());
}

#[test]
fn witnesses_realize_their_patterns() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let bdd = Bdd::construct(pp, &VariableOrder::identity(5), true).unwrap();
    let psi = a.model.spec.unsafe_set();
    for c in bdd.traverse(pp).unwrap() {
        let trace = witness_trace(&a.reach, &c.witness, 13).unwrap();
        for (j, &step) in a.indices.iter().enumerate() {
            // y >= 0.4 is the unsafe side
            let y = trace[step][1];
            assert_eq!(y >= 0.4 - 1e-7, c.bits[j], "{} at step {step}: y = {y}", c.time_string());
        }
        assert_eq!(psi.bound(), -0.4);
    }
}

#[test]
fn dot_matches_figure_counts() {
    let a = oscillator();
    let pp = a.predicates.as_ref().unwrap();
    let bdd = Bdd::construct(pp, &VariableOrder::identity(5), false).unwrap();
    let dot = bdd.to_dot(false);
    assert_eq!(dot, bdd.to_dot(false));
    let declared = dot.lines().filter(|l| l.contains("[label=")).count();
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(declared, 19);
    assert!(dot.contains("t1 [shape=box"));
    assert_eq!(edges.len(), 18 + 10);
    assert_eq!(edges.iter().filter(|l| l.contains("-> t1")).count(), 10);
    assert!(!dot.contains("t0"));
    let with_t0 = bdd.to_dot(true);
    assert!(with_t0.contains("t0 [shape=box"));
    assert!(with_t0.contains("-> t0 [style=dashed]"));
}

#[test]
fn comparison_report() {
    let a = oscillator();
    let options = CompareOptions {
        seeds: vec![0, 1],
        timing: false,
        ..CompareOptions::default()
    };
    let report = compare(&a, &options).unwrap();
    assert_eq!(report.indices, [3, 4, 5, 12, 13]);
    assert_eq!(report.runs.len(), 8);
    assert!(report.sigma_obdd >= 0.0 && report.sigma_robdd >= 0.0);
    let default_obdd = report.runs.iter().find(|r| r.ordering == "default" && !r.reduced).unwrap();
    assert_eq!((default_obdd.n, default_obdd.w), (21, 7));
    for r in report.runs.iter().filter(|r| r.reduced) {
        let plain = report
            .runs
            .iter()
            .find(|p| !p.reduced && p.ordering == r.ordering && p.seed == r.seed)
            .unwrap();
        assert!(r.n <= plain.n && r.w <= plain.w);
        assert_eq!(r.paths, 10);
        assert_eq!(r.seconds, 0.0);
    }
    assert_eq!(report, compare(&a, &options).unwrap());
}
