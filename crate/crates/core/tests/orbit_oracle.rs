mod common;

use common::{small_spec, Stack};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rankone::coding::code_product_orbit;
use rankone::exact::BigRatio;
use rankone::orbit::RankOne;
use rankone::spec::RankOneSpec;
use rankone::stats::compute_stats;

fn spec_strategy() -> impl Strategy<Value = RankOneSpec> {
    (
        prop::collection::vec(2u64..6, 1..6),
        0u8..4,
        prop::collection::vec(prop::collection::vec(0u64..4, 1..4), 6),
    )
        .prop_map(|(cuts, rule, spacers)| small_spec(&cuts, rule, &spacers))
        .prop_filter("small top tower", |s| {
            compute_stats(s).top_height().to_usize().unwrap() <= 20_000
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heights_follow_the_recursion(
        cuts in prop::collection::vec(2u64..1000, 1..12),
        rule in 0u8..4,
        spacers in prop::collection::vec(prop::collection::vec(0u64..50, 1..5), 12),
    ) {
        let spec = small_spec(&cuts, rule, &spacers);
        let st = compute_stats(&spec);
        let mut prod = BigUint::one();
        for n in 1..=spec.max_stage() + 1 {
            let h = st.height(n);
            if n > 1 {
                let total: BigUint = (1..=cuts[n - 2]).map(|i| spec.spacer(n - 1, &i.into())).sum();
                prop_assert_eq!(h, &(spec.cut(n - 1) * st.height(n - 1) + total));
            }
            prop_assert!(h >= &(BigUint::one() << (n - 1)));
            prop_assert!(&prod <= h);
            prop_assert!(BigRatio::from(h.clone()) <= &st.k_bound * BigRatio::from(prod.clone()));
            if n <= spec.max_stage() {
                prod *= spec.cut(n);
            }
        }
    }

    #[test]
    fn address_orbit_matches_materialized_stack(spec in spec_strategy(), start_frac in 0.0f64..1.0) {
        let sys = RankOne::new(spec.clone());
        let stack = Stack::build(&spec);
        prop_assert_eq!(stack.top(), sys.stats().top_height().to_usize().unwrap());
        let top = stack.top();
        let start = ((top as f64) * start_frac) as usize % top;
        let len = top - start;
        let mut st = sys.decode(&BigUint::from(start)).unwrap();
        for t in start..top {
            prop_assert_eq!(sys.levels(&st), stack.levels(t));
            for n in 1..=spec.max_stage() {
                prop_assert_eq!(sys.column_in(&st, n).map(|c| c.to_usize().unwrap()), stack.column[n - 1][t]);
            }
            if t + 1 < top {
                sys.step(&mut st).unwrap();
            } else {
                prop_assert!(sys.step(&mut st).is_err());
            }
        }
        let n = 1 + start % (spec.max_stage() + 1);
        let word = sys.code_orbit(&sys.decode(&BigUint::from(start)).unwrap(), n, len).unwrap();
        let oracle: Vec<u32> = (start..top).map(|t| stack.symbol(n, t)).collect();
        prop_assert_eq!(word.symbols, oracle);
    }

    #[test]
    fn coarser_symbol_is_a_function_of_finer(spec in spec_strategy(), start in 0usize..500) {
        let sys = RankOne::new(spec.clone());
        let top = sys.stats().top_height().to_usize().unwrap();
        let start = start % top;
        let x = sys.decode(&BigUint::from(start)).unwrap();
        for n in 1..=spec.max_stage() {
            let fine = sys.code_orbit(&x, n + 1, top - start).unwrap().symbols;
            let coarse = sys.code_orbit(&x, n, top - start).unwrap().symbols;
            let mut map = std::collections::HashMap::new();
            for (f, c) in fine.iter().zip(&coarse) {
                prop_assert_eq!(*map.entry(*f).or_insert(*c), *c);
            }
        }
    }

    #[test]
    fn product_word_is_the_zip(a in spec_strategy(), b in spec_strategy(), n in 1usize..3) {
        let (ta, tb) = (RankOne::new(a), RankOne::new(b));
        let n = n.min(ta.top_stage()).min(tb.top_stage());
        let len = ta.stats().top_height().to_usize().unwrap().min(tb.stats().top_height().to_usize().unwrap());
        let p = code_product_orbit(&ta, &tb, &ta.base_point(), &tb.base_point(), n, len).unwrap();
        let (l, r) = p.unzip().unwrap();
        prop_assert_eq!(l, ta.code_orbit(&ta.base_point(), n, len).unwrap());
        prop_assert_eq!(r, tb.code_orbit(&tb.base_point(), n, len).unwrap());
    }
}

#[test]
fn two_cut_staircase_by_hand() {
    let spec = RankOneSpec::staircase("s", &[2]).unwrap();
    let stack = Stack::build(&spec);
    assert_eq!(stack.level[0], vec![Some(0), None, Some(0), None, None]);
    let sys = RankOne::new(spec);
    assert_eq!(
        sys.code_orbit(&sys.base_point(), 1, 5).unwrap().symbols,
        vec![0, 1, 0, 1, 1]
    );
}

#[test]
fn outside_frequency_matches_spacer_mass() {
    let spec = RankOneSpec::staircase("s", &[4, 5, 6, 7]).unwrap();
    let sys = RankOne::new(spec.clone());
    let stack = Stack::build(&spec);
    let top = stack.top();
    for n in 1..=4 {
        let word = sys.code_orbit(&sys.base_point(), n, top).unwrap();
        let outside = word
            .symbols
            .iter()
            .filter(|&&s| s == sys.height(n).to_u32().unwrap())
            .count();
        // levels of T_n fill h_n * (p_n ... p_M) positions of the top tower
        let inside: usize = sys.height(n).to_usize().unwrap()
            * spec.cuts()[n - 1..]
                .iter()
                .map(|p| p.to_usize().unwrap())
                .product::<usize>();
        assert_eq!(outside, top - inside);
    }
}

#[test]
fn seeded_sampling_is_reproducible() {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rankone::orbit::SamplingMode;
    let sys = RankOne::new(RankOneSpec::staircase("s", &[4, 9, 30, 100]).unwrap());
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50)
            .map(|_| sys.top_level(&sys.sample(&mut rng, SamplingMode::Levels)))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(9), draw(9));
    assert_ne!(draw(9), draw(10));
}
