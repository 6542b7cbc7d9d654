use proptest::prelude::*;
use starbdd::geometry::Predicate;
use starbdd::lp::{self, LpProblem, LpStatus};
use starbdd::milp::{solve_milp, MilpParams, MilpProblem};

fn enumerate(problem: &MilpProblem) -> Option<f64> {
    let bounds = problem.lp.bounds.clone().unwrap();
    let nb = problem.binaries.len();
    (0..1u32 << nb)
        .filter_map(|mask| {
            let mut b = bounds.clone();
            for (i, &v) in problem.binaries.iter().enumerate() {
                let z = f64::from(mask >> i & 1);
                b[v] = (z, z);
            }
            let r = lp::solve(&LpProblem { bounds: Some(b), ..problem.lp.clone() }).unwrap();
            (r.status == LpStatus::Feasible).then(|| r.objective.unwrap())
        })
        .reduce(f64::max)
}

fn milp() -> impl Strategy<Value = MilpProblem> {
    (1usize..=10, 0usize..=3).prop_flat_map(|(nb, nc)| {
        let d = nb + nc;
        (
            prop::collection::vec((prop::collection::vec(-5i32..=5, d), -2i32..=10), 1..=6),
            prop::collection::vec(-3i32..=5, d),
        )
            .prop_map(move |(rows, obj)| {
                let rows: Vec<(Vec<f64>, f64)> = rows
                    .into_iter()
                    .map(|(a, b)| (a.into_iter().map(f64::from).collect(), f64::from(b)))
                    .collect();
                let mut bounds = vec![(0.0, 1.0); nb];
                bounds.extend(std::iter::repeat_n((0.0, 5.0), nc));
                MilpProblem {
                    lp: LpProblem::maximize(
                        obj.into_iter().map(f64::from).collect(),
                        Predicate::from_rows(d, &rows).unwrap(),
                    )
                    .with_bounds(bounds),
                    binaries: (0..nb).collect(),
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn branch_and_bound_matches_enumeration(problem in milp()) {
        let got = solve_milp(&problem, &MilpParams::default()).unwrap();
        let want = enumerate(&problem);
        match (got.objective(), want) {
            (Some(g), Some(w)) => {
                prop_assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{} vs {}", g, w);
                let x = got.incumbent().unwrap();
                prop_assert!(problem.lp.constraints.max_violation(x) <= 1e-7);
                for &v in &problem.binaries {
                    prop_assert!(x[v] == 0.0 || x[v] == 1.0);
                }
            }
            (None, None) => {}
            (g, w) => prop_assert!(false, "solver {:?}, enumeration {:?}", g, w),
        }
    }
}
