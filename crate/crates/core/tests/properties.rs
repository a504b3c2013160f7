//! Property tests for the structural invariants: adjointness, Parseval,
//! order bijection, and CSV round trips.

use cubelimit::coeff_matrices::{matrix_from_csv, matrix_to_csv};
use cubelimit::cube_core::{
    apply_inner, apply_outer, dyadic_lt, dyadic_rank, DyadicOrder,
};
use cubelimit::hadamard::wht;
use cubelimit::CubeSignal;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn signal(n: usize) -> impl Strategy<Value = CubeSignal> {
    prop::collection::vec(-1.0f64..1.0, 1 << n)
        .prop_map(move |v| CubeSignal::from_values(n, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outer_and_inner_are_adjoint(u in signal(6), v in signal(6)) {
        let lhs = apply_outer(&u).dot(&v);
        let rhs = u.dot(&apply_inner(&v));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn wht_is_an_isometry(x in signal(7)) {
        let w = wht(&x);
        prop_assert!((w.norm() - x.norm()).abs() <= 1e-10 * x.norm().max(1.0));
        let back = wht(&w);
        let err = x.values().iter().zip(back.values())
            .map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn dyadic_rank_is_monotone_bijection(a in 0u32..256, b in 0u32..256) {
        let n = 8;
        let ra = dyadic_rank(n, a).unwrap();
        let rb = dyadic_rank(n, b).unwrap();
        prop_assert_eq!(dyadic_lt(a, b), ra < rb);
        let order = DyadicOrder::new(n).unwrap();
        prop_assert_eq!(order.mask_of(ra), a);
    }

    #[test]
    fn csv_roundtrip_is_exact_at_full_precision(
        vals in prop::collection::vec(-1e6f64..1e6, 16)
    ) {
        let m = DMatrix::from_vec(4, 4, vals);
        let text = matrix_to_csv(&m, 17);
        let back = matrix_from_csv(&text).unwrap();
        prop_assert_eq!(m, back);
    }

    #[test]
    fn adjacency_parts_shift_sphere_support(x in signal(5), r in 0usize..=5) {
        // restrict x to Sigma_r; A_+ lands on Sigma_{r+1}, A_- on Sigma_{r-1}
        let n = 5usize;
        let mut restricted = x.clone();
        for (s, v) in restricted.values_mut().iter_mut().enumerate() {
            if (s as u32).count_ones() as usize != r {
                *v = 0.0;
            }
        }
        let up = apply_outer(&restricted);
        let down = apply_inner(&restricted);
        for s in 0..(1usize << n) {
            let w = (s as u32).count_ones() as usize;
            if w != r + 1 {
                prop_assert_eq!(up.values()[s], 0.0);
            }
            if r == 0 || w != r - 1 {
                prop_assert_eq!(down.values()[s], 0.0);
            }
        }
        // A_- A_+ is nonnegative (adjoint pair)
        let quad = apply_inner(&apply_outer(&restricted)).dot(&restricted);
        prop_assert!(quad >= -1e-10);
    }
}
