//! Property tests for the numeric core and the binary artifact parser.

use proptest::prelude::*;

use logrank::artifact::load_flat;
use logrank::features::FeatureVector;
use logrank::ranker::{rank_candidates, softmax_probs, QueryGroup};

proptest! {
    /// The parser must reject or accept arbitrary bytes without panicking.
    #[test]
    fn load_flat_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..600)) {
        let _ = load_flat(&bytes);
    }

    /// A parsed artifact prefixed with valid magic/version still must not panic.
    #[test]
    fn load_flat_with_plausible_header(mut tail in proptest::collection::vec(any::<u8>(), 0..256)) {
        let mut bytes = b"RNKL".to_vec();
        bytes.extend(1u32.to_le_bytes());
        bytes.append(&mut tail);
        let _ = load_flat(&bytes);
    }

    #[test]
    fn softmax_is_a_distribution(scores in proptest::collection::vec(-50.0f64..50.0, 1..20)) {
        let p = softmax_probs(&scores);
        prop_assert_eq!(p.len(), scores.len());
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let sum: f64 = p.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn softmax_shift_invariant(
        scores in proptest::collection::vec(-20.0f64..20.0, 2..10),
        shift in -100.0f64..100.0,
    ) {
        let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
        let a = softmax_probs(&scores);
        let b = softmax_probs(&shifted);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    /// Gradients of the listwise loss always sum to zero over a group.
    #[test]
    fn gradients_sum_to_zero(
        scores in proptest::collection::vec(-5.0f64..5.0, 2..12),
        positive_seed in any::<u64>(),
    ) {
        let n = scores.len();
        let mut targets = vec![0u8; n];
        targets[(positive_seed as usize) % n] = 1;
        let rows = (0..n).map(|i| FeatureVector(vec![i as f64])).collect();
        let group = QueryGroup::new(rows, targets).unwrap();
        let (grads, hess) = group.grad_hess(&scores).unwrap();
        let sum: f64 = grads.iter().sum();
        prop_assert!(sum.abs() < 1e-9);
        prop_assert!(hess.iter().all(|&h| h > 0.0));
    }

    /// Ranking is a permutation and sorts scores descending.
    #[test]
    fn rank_is_a_sorted_permutation(scores in proptest::collection::vec(-1e6f64..1e6, 1..40)) {
        let order = rank_candidates(&scores);
        let mut seen = vec![false; scores.len()];
        for &i in &order {
            prop_assert!(!seen[i]);
            seen[i] = true;
        }
        for pair in order.windows(2) {
            prop_assert!(scores[pair[0]] >= scores[pair[1]]);
        }
    }
}
