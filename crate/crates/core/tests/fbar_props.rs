mod common;

use common::lcs_brute;
use num_rational::Ratio;
use proptest::prelude::*;
use rankone::fbar::{
    fbar_bounds, fbar_exact_symbols, fbar_fast_symbols, lcs_banded, matching_valid, Matching,
};

fn word_pair(max_len: usize, alphabet: u32) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (1..=max_len).prop_flat_map(move |k| {
        (
            prop::collection::vec(0..alphabet, k),
            prop::collection::vec(0..alphabet, k),
        )
    })
}

fn word_triple(
    max_len: usize,
    alphabet: u32,
) -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
    (1..=max_len).prop_flat_map(move |k| {
        (
            prop::collection::vec(0..alphabet, k),
            prop::collection::vec(0..alphabet, k),
            prop::collection::vec(0..alphabet, k),
        )
    })
}

fn fbar(a: &[u32], b: &[u32]) -> Ratio<u64> {
    fbar_exact_symbols(a, b, false).unwrap().value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_agrees_with_enumeration((a, b) in word_pair(10, 3)) {
        prop_assert_eq!(fbar_exact_symbols(&a, &b, false).unwrap().r, lcs_brute(&a, &b));
    }

    #[test]
    fn bit_parallel_agrees_with_dp((a, b) in word_pair(300, 5)) {
        prop_assert_eq!(fbar_fast_symbols(&a, &b).unwrap().r, fbar_exact_symbols(&a, &b, false).unwrap().r);
    }

    #[test]
    fn returned_matching_is_optimal_and_valid((a, b) in word_pair(120, 4)) {
        let res = fbar_exact_symbols(&a, &b, true).unwrap();
        let m = res.matching.unwrap();
        prop_assert!(matching_valid(&a, &b, &m));
        prop_assert_eq!(m.len(), res.r);
    }

    #[test]
    fn pseudometric((a, b, c) in word_triple(64, 4)) {
        prop_assert_eq!(fbar(&a, &a), Ratio::from_integer(0));
        prop_assert_eq!(fbar(&a, &b), fbar(&b, &a));
        prop_assert!(fbar(&a, &c) <= fbar(&a, &b) + fbar(&b, &c));
        let v = fbar(&a, &b);
        prop_assert!(v >= Ratio::from_integer(0) && v <= Ratio::from_integer(1));
    }

    #[test]
    fn appending_a_common_symbol_adds_one((a, b) in word_pair(60, 3), x in 0u32..3, y in 0u32..3) {
        let r = fbar_exact_symbols(&a, &b, false).unwrap().r;
        let (mut ax, mut bx) = (a.clone(), b.clone());
        ax.push(x);
        bx.push(x);
        prop_assert_eq!(fbar_exact_symbols(&ax, &bx, false).unwrap().r, r + 1);
        let (mut ax, mut by) = (a, b);
        ax.push(x);
        by.push(y);
        prop_assert!(fbar_exact_symbols(&ax, &by, false).unwrap().r >= r);
    }

    #[test]
    fn bounds_sandwich_the_exact_value((a, b) in word_pair(200, 4), band in 1i64..40) {
        let exact = fbar(&a, &b);
        let bd = fbar_bounds(&a, &b, band).unwrap();
        prop_assert!(bd.lower <= exact && exact <= bd.upper);
        prop_assert!(lcs_banded(&a, &b, a.len()) == fbar_exact_symbols(&a, &b, false).unwrap().r);
    }
}

#[test]
fn every_binary_pair_up_to_length_eight() {
    for k in 1..=8usize {
        for x in 0u32..(1 << k) {
            let a: Vec<u32> = (0..k).map(|i| x >> i & 1).collect();
            for y in 0u32..(1 << k) {
                let b: Vec<u32> = (0..k).map(|i| y >> i & 1).collect();
                assert_eq!(
                    fbar_exact_symbols(&a, &b, false).unwrap().r,
                    lcs_brute(&a, &b),
                    "{a:?} {b:?}"
                );
            }
        }
    }
}

#[test]
fn matching_validity_cases() {
    let a = [0, 1, 2];
    let b = [1, 2, 0];
    assert!(matching_valid(&a, &b, &Matching::default()));
    assert!(matching_valid(&a, &b, &Matching::new(vec![(1, 0), (2, 1)])));
    assert!(!matching_valid(
        &a,
        &b,
        &Matching::new(vec![(2, 1), (1, 0)])
    ));
    assert!(!matching_valid(&a, &b, &Matching::new(vec![(0, 0)])));
}
