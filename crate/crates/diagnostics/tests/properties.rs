use dtn_diagnostics::{adjusted_rand_index, summarize_values};
use proptest::prelude::*;

/// Pair-by-pair adjusted Rand index.
fn pairwise_ari(a: &[u8], b: &[u8]) -> f64 {
    let (mut both, mut in_a, mut in_b, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            both += (sa && sb) as u8 as f64;
            in_a += sa as u8 as f64;
            in_b += sb as u8 as f64;
            total += 1.0;
        }
    }
    let expected = in_a * in_b / total;
    let max = 0.5 * (in_a + in_b);
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

#[test]
fn known_values() {
    assert!((adjusted_rand_index(&[0, 0, 1, 1], &[0, 0, 1, 2]).unwrap() - 4.0 / 7.0).abs() < 1e-15);
    assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 3, 3]).unwrap(), 1.0);
    assert_eq!(adjusted_rand_index(&[0, 0, 0, 0], &[0, 1, 2, 3]).unwrap(), 0.0);
    assert!(adjusted_rand_index(&[0, 1], &[0]).is_err());
}

fn labels() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (2usize..40).prop_flat_map(|n| (proptest::collection::vec(0u8..5, n), proptest::collection::vec(0u8..5, n)))
}

proptest! {
    #[test]
    fn ari_matches_pair_counting((a, b) in labels()) {
        let got = adjusted_rand_index(&a, &b).unwrap();
        prop_assert!((got - pairwise_ari(&a, &b)).abs() < 1e-9);
    }

    #[test]
    fn ari_symmetric_and_label_free((a, b) in labels(), shift in 1u8..200) {
        let x = adjusted_rand_index(&a, &b).unwrap();
        prop_assert_eq!(x, adjusted_rand_index(&b, &a).unwrap());
        let relabeled: Vec<u8> = a.iter().map(|&l| l.wrapping_mul(7).wrapping_add(shift)).collect();
        prop_assert_eq!(x, adjusted_rand_index(&relabeled, &b).unwrap());
        prop_assert_eq!(adjusted_rand_index(&a, &a).unwrap(), 1.0);
        prop_assert!(x <= 1.0);
    }

    #[test]
    fn interval_brackets_at_least_95_percent(xs in proptest::collection::vec(-1e3f64..1e3, 1..400)) {
        let s = summarize_values(&xs).unwrap();
        let inside = xs.iter().filter(|&&x| s.lo <= x && x <= s.hi).count();
        prop_assert!(inside as f64 >= 0.95 * xs.len() as f64);
        prop_assert!(s.lo <= s.mean && s.mean <= s.hi);
    }

    #[test]
    fn mean_is_linear(xs in proptest::collection::vec(-10f64..10.0, 2..100), a in -5f64..5.0, c in -5f64..5.0) {
        let base = summarize_values(&xs).unwrap();
        let ys: Vec<f64> = xs.iter().map(|x| a * x + c).collect();
        let moved = summarize_values(&ys).unwrap();
        prop_assert!((moved.mean - (a * base.mean + c)).abs() < 1e-9);
        prop_assert!((moved.sd - a.abs() * base.sd).abs() < 1e-9);
    }
}
