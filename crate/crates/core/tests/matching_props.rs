mod common;

use common::clustered_matching;
use rankone::fbar::Matching;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone::analysis::windows::{
    comb_lemma_check, greedy_cover, window_i, window_j, window_sets, WindowParams,
};
use rankone::exact::Exponent;

fn monotone_matching(max_len: usize) -> impl Strategy<Value = Matching> {
    prop::collection::vec((1usize..40, 1usize..40), 0..max_len).prop_map(|steps| {
        let (mut i, mut j) = (0, 0);
        Matching::new(
            steps
                .into_iter()
                .map(|(a, b)| {
                    i += a;
                    j += b;
                    (i, j)
                })
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn windows_past_the_end_are_disjoint(theta in monotone_matching(200), reach in 1u64..200) {
        let sets = window_sets(&theta, reach);
        for w in 0..theta.len() {
            prop_assert_eq!(&sets[w].0, &window_i(&theta, reach, w));
            prop_assert_eq!(&sets[w].1, &window_j(&theta, reach, w));
            let iw = &sets[w].0;
            for (is, _) in &sets[iw.end..] {
                prop_assert!(is.start >= iw.end || is.end <= iw.start);
            }
        }
    }

    #[test]
    fn cover_chain_on_clustered_matchings(seed in any::<u64>(), k in prop::sample::select(vec![4u64, 16, 64]), xi in prop::sample::select(vec![(1u64, 4u64), (1, 2)]), stretch in 8u64..30) {
        let xi = Exponent::new(xi.0, xi.1);
        let reach = WindowParams::new(k, xi, 1).unwrap().reach();
        let params = WindowParams::new(k, xi, (reach + 1) * stretch).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = clustered_matching(&mut rng, k, reach, params.n);
        let report = comb_lemma_check(&theta, &params);
        prop_assert!(report.hypothesis());
        prop_assert_eq!(report.conclusion, Some(true));
        let cover = greedy_cover(&theta, &params).unwrap();
        prop_assert!(cover.r <= cover.total);
        prop_assert!(cover.total <= 2 * k as usize * cover.v());
        prop_assert!(params.count_link_holds(cover.v()));
        prop_assert!(cover.all_links());
    }
}

#[test]
fn atk_classes_match_the_materialized_definition() {
    let check = common::atk_rounds(40, 77);
    assert_eq!(check.mismatches, 0);
    assert_eq!(check.floor_violations, 0);
    assert_eq!(check.partition_failures, 0);
    assert!(check.populated > 0, "no scale bucket was ever populated");
}
