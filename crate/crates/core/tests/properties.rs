//! Property tests for the small algebraic pieces.

use proptest::prelude::*;

use asbench_core::eval::{mse, pre};
use asbench_core::metrics::rank_with_ties;

fn finite_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, len)
}

proptest! {
    #[test]
    fn ranks_sum_to_the_triangular_number(v in finite_vec(1..20)) {
        let ranks = rank_with_ties(&v);
        let n = v.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        for r in &ranks {
            prop_assert!((1.0..=n).contains(r));
        }
    }

    #[test]
    fn equal_values_share_a_rank(v in finite_vec(2..12), i in 0usize..12, j in 0usize..12) {
        let mut v = v;
        let (i, j) = (i % v.len(), j % v.len());
        v[i] = v[j];
        let ranks = rank_with_ties(&v);
        prop_assert_eq!(ranks[i], ranks[j]);
    }

    #[test]
    fn ranking_commutes_with_permutation(v in finite_vec(2..10), seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..v.len()).collect();
        perm.shuffle(&mut asbench_core::rng::rng_from(&[seed]));
        let permuted: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
        let direct = rank_with_ties(&permuted);
        let original = rank_with_ties(&v);
        let via: Vec<f64> = perm.iter().map(|&i| original[i]).collect();
        prop_assert_eq!(direct, via);
    }

    #[test]
    fn pre_is_symmetric_and_bounded(a in finite_vec(2..8), b in finite_vec(2..8)) {
        prop_assume!(a.len() == b.len());
        let ab = pre(&a, &b).unwrap();
        let ba = pre(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        // mismatch counts come in ordered pairs
        let unit = 1.0 / (a.len() * (a.len() - 1)) as f64;
        let steps = ab / unit;
        prop_assert!((steps - steps.round()).abs() < 1e-9);
    }

    #[test]
    fn pre_of_anything_to_itself_is_zero(a in finite_vec(2..8)) {
        prop_assert_eq!(pre(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn mse_is_quadratically_homogeneous(a in finite_vec(1..10), c in 0.01f64..100.0) {
        let b = vec![1.0; a.len()];
        let ac: Vec<f64> = a.iter().map(|v| c * v).collect();
        let bc: Vec<f64> = b.iter().map(|v| c * v).collect();
        let lhs = mse(&ac, &bc).unwrap();
        let rhs = c * c * mse(&a, &b).unwrap();
        let denom = rhs.abs().max(1e-12);
        prop_assert!((lhs - rhs).abs() / denom < 1e-9);
    }

    #[test]
    fn pre_is_invariant_under_monotone_transforms(a in finite_vec(3..8), b in finite_vec(3..8)) {
        prop_assume!(a.len() == b.len());
        let ranks_a = rank_with_ties(&a);
        let warped: Vec<f64> = a.iter().map(|v| (v / 1e6).tanh() * 3.0 + 10.0).collect();
        let ranks_w = rank_with_ties(&warped);
        // tanh is strictly increasing, so the rankings coincide
        prop_assert_eq!(&ranks_a, &ranks_w);
        prop_assert_eq!(pre(&ranks_a, &b).unwrap(), pre(&ranks_w, &b).unwrap());
    }
}
