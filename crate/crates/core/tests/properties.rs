mod common;

use common::*;
use num_rational::BigRational;
use proptest::prelude::*;
use sparse_membership::bounds::formula;
use sparse_membership::lattice::IVec;
use sparse_membership::poly::{Exponent, SparsePoly};
use sparse_membership::polytope::LatticePolytope;
use sparse_membership::solver;

fn from_coeffs(n: usize, pts: &[IVec], cs: &[i64]) -> SparsePoly {
    SparsePoly::from_terms(
        n,
        pts.iter()
            .zip(cs)
            .filter(|(_, &c)| c != 0)
            .map(|(x, &c)| (Exponent::from_ivec(x).unwrap(), int(c))),
    )
    .unwrap()
}

fn base_polytopes() -> Vec<LatticePolytope> {
    vec![
        LatticePolytope::simplex(2, 1),
        LatticePolytope::simplex_product(&[1, 1], &[1, 1]),
        example_polytope(),
    ]
}

/// Two generators supported on a small polytope and a right-hand side in its double.
fn system() -> impl Strategy<Value = (LatticePolytope, Vec<SparsePoly>, SparsePoly)> {
    (0..3usize).prop_flat_map(|i| {
        let p = base_polytopes()[i].clone();
        let pts = p.lattice_points();
        let rhs_pts = p.scale_int(2).lattice_points();
        (
            Just(p),
            prop::collection::vec(prop::collection::vec(-3i64..=3, pts.len()), 1..=2),
            prop::collection::vec(prop::sample::select(vec![-2i64, -1, 0, 0, 0, 1, 2]), rhs_pts.len()),
        )
            .prop_map(move |(p, fcs, rcs)| {
                let fs: Vec<SparsePoly> = fcs.iter().map(|cs| from_coeffs(2, &pts, cs)).collect();
                (p, fs, from_coeffs(2, &rhs_pts, &rcs))
            })
            .prop_filter("nonzero generators", |(_, fs, _)| fs.iter().all(|f| !f.is_zero()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solutions_verify_and_are_reproducible((p, fs, rhs) in system(), c in 2i64..=3) {
        let q = p.scale_int(c);
        let first = solver::solve_membership(&fs, &rhs, 1, &q).unwrap();
        let again = solver::solve_membership(&fs, &rhs, 1, &q).unwrap();
        prop_assert_eq!(first.is_feasible(), naive_feasible(&fs, &rhs, &q));
        if let (Some(a), Some(b)) = (first.solution(), again.solution()) {
            prop_assert!(solver::verify(&a, &fs, &rhs).ok);
            prop_assert!(check_identity(&fs, &a.gs, &rhs, 1, &q));
            prop_assert_eq!(a.gs, b.gs);
        }
    }

    #[test]
    fn feasibility_is_monotone_in_q((p, fs, rhs) in system(), extra in prop::collection::vec(0i64..=4, 2)) {
        let q = p.scale_int(2);
        let mut pts = q.vertices().to_vec();
        pts.push(extra);
        let bigger = LatticePolytope::hull(&pts).unwrap();
        if solver::solve_membership(&fs, &rhs, 1, &q).unwrap().is_feasible() {
            prop_assert!(solver::solve_membership(&fs, &rhs, 1, &bigger).unwrap().is_feasible());
            prop_assert!(solver::solve_membership(&fs, &rhs, 1, &p.scale_int(3)).unwrap().is_feasible());
        }
    }

    #[test]
    fn scaling_bounds_grow_with_volume_and_e(
        m in 1usize..=5,
        n in 1usize..=4,
        vol in 1i64..=50,
        a in 1i64..=5,
        e_num in 0i64..=10,
        e_den in 1i64..=4,
    ) {
        let e = BigRational::new(e_num.into(), e_den.into());
        let e2 = &e + int(1);
        let (v, v2) = (int(vol), int(vol + 1));
        prop_assert!(formula::ag(m, &e, &v, a) < formula::ag(m, &e, &v2, a));
        prop_assert!(formula::ag(m, &e, &v, a) < formula::ag(m + 1, &e, &v, a));
        prop_assert!(formula::hickel(m, n, &e, &v, a) <= formula::hickel(m, n, &e2, &v, a));
        prop_assert!(formula::kollar(m, n, &e, &v, a) <= formula::kollar(m, n, &e, &v2, a));
        prop_assert!(formula::kollar(m, n, &e, &v, a) <= formula::kollar(m, n, &e2, &v, a));
        prop_assert!(formula::kollar(m, n, &e, &v, a) >= int(m.min(n + 1) as i64));
    }
}
