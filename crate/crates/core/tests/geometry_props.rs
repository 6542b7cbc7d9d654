use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use starbdd::geometry::{GeneralizedStar, Hyperbox, Predicate};
use starbdd::lp::{self, LpProblem, LpStatus};

fn boxes(n: usize) -> impl Strategy<Value = Hyperbox> {
    prop::collection::vec((-2.0..2.0f64, 0.01..1.0f64), n).prop_map(|v| {
        Hyperbox::new(
            v.iter().map(|(c, h)| c - h).collect(),
            v.iter().map(|(c, h)| c + h).collect(),
        )
        .unwrap()
    })
}

fn predicate(d: usize, max_rows: usize) -> impl Strategy<Value = Predicate> {
    prop::collection::vec((prop::collection::vec(-1.0..1.0f64, d), -1.0..1.0f64), 1..=max_rows)
        .prop_map(move |rows| Predicate::from_rows(d, &rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_images_keep_sampled_valuations(
        b in boxes(3),
        m in prop::collection::vec(-2.0..2.0f64, 9),
        off in prop::collection::vec(-1.0..1.0f64, 3),
        objectives in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 100),
    ) {
        let s = GeneralizedStar::from_box(&b);
        let matrix = DMatrix::from_row_slice(3, 3, &m);
        let offset = DVector::from_vec(off);
        let image = s.affine_map(&matrix, Some(&offset)).unwrap();
        for obj in objectives {
            let r = lp::solve(&LpProblem::maximize(obj, s.predicate().clone())).unwrap();
            prop_assert_eq!(r.status, LpStatus::Feasible);
            let alpha = r.witness.unwrap();
            prop_assert!(image.predicate().is_satisfied(&alpha, 1e-9));
            let direct = &matrix * s.point_at(&alpha).unwrap() + &offset;
            let via_image = image.point_at(&alpha).unwrap();
            prop_assert!((direct - via_image).amax() <= 1e-9);
        }
    }

    #[test]
    fn minkowski_sum_contains_vertex_sums(b1 in boxes(2), b2 in boxes(2)) {
        let sum = GeneralizedStar::from_box(&b1).minkowski_sum(&GeneralizedStar::from_box(&b2)).unwrap();
        for v1 in b1.vertices() {
            for v2 in b2.vertices() {
                let alpha: Vec<f64> = v1.iter().chain(&v2).copied().collect();
                prop_assert!(sum.predicate().is_satisfied(&alpha, 1e-12));
                let p = sum.point_at(&alpha).unwrap();
                prop_assert!((p[0] - v1[0] - v2[0]).abs() <= 1e-12);
                prop_assert!((p[1] - v1[1] - v2[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn conjoin_feasibility_is_symmetric(p1 in predicate(3, 5), p2 in predicate(3, 5)) {
        let a = lp::check_feasible(&p1.conjoin(&p2)).unwrap().is_some();
        let b = lp::check_feasible(&p2.conjoin(&p1)).unwrap().is_some();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn explicit_padding_matches_implicit(p1 in predicate(2, 4), p2 in predicate(4, 4)) {
        let implicit = p1.conjoin(&p2);
        let explicit = p1.padded(4).unwrap().conjoin(&p2);
        prop_assert_eq!(implicit.dimension(), 4);
        prop_assert_eq!(implicit, explicit);
    }
}
