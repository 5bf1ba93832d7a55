mod common;

use common::Stack;
use rankone::analysis::goodsets::{GoodSetParams, GoodSets};
use rankone::analysis::probes::{lemma_separation_probe, Lemma, ProbeParams};
use rankone::exact::Exponent;
use rankone::orbit::RankOne;
use rankone::spec::RankOneSpec;

fn setup() -> (RankOneSpec, RankOne, GoodSets) {
    let spec = RankOneSpec::staircase("p", &[6, 7, 8, 9]).unwrap();
    let sys = RankOne::new(spec.clone());
    let good = GoodSets::new(
        &sys,
        GoodSetParams {
            gamma: Exponent::new(7, 100),
            n1: 2,
            n3: 2,
            last: Some(3),
        },
    )
    .unwrap();
    (spec, sys, good)
}

#[test]
fn witnesses_replay_on_the_materialized_tower() {
    let (spec, sys, good) = setup();
    let stack = Stack::build(&spec);
    let mut total_checks = 0;
    for n in 2..=3 {
        for lemma in Lemma::ALL {
            let params = ProbeParams {
                n,
                xi: Exponent::new(1, 400),
                budget: 5000,
                seed: 3,
            };
            let r = lemma_separation_probe(&sys, &good, lemma, &params).unwrap();
            assert_eq!(
                r,
                lemma_separation_probe(&sys, &good, lemma, &params).unwrap()
            );
            total_checks += r.checks;
            let tower = if lemma == Lemma::FarOrbits { n + 1 } else { n };
            for w in &r.violations {
                let p = |s: &str| s.parse::<usize>().unwrap();
                let (a, b) = (p(&w.x) + p(&w.i), p(&w.x_prime) + p(&w.j));
                let (la, lb) = (stack.level[tower - 1][a], stack.level[tower - 1][b]);
                assert!(
                    la.is_some() && la == lb,
                    "{lemma:?} n={n}: {w:?} is not a shared level"
                );
            }
        }
    }
    assert!(total_checks > 0);
}

#[test]
fn uniform_distance_checks_stay_within_the_exhaustive_grid() {
    // every pair of distinct shifts in [0, h_n / n^3] for partners built by the probe
    let (spec, sys, good) = setup();
    let stack = Stack::build(&spec);
    let n = 2;
    let top = stack.heights[n - 1] / (n * n * n);
    let params = ProbeParams {
        n,
        xi: Exponent::new(1, 400),
        budget: 100_000,
        seed: 8,
    };
    let r = lemma_separation_probe(&sys, &good, Lemma::UniformDistance, &params).unwrap();
    assert!(r.admissible_pairs > 0);
    // exhaustive mode: each admissible pair contributes (top+1)^2 - (top+1) checks unless an orbit escapes
    assert!(r.checks <= r.admissible_pairs * (top + 1) * top);
    assert!(r.checks > 0);
}

#[test]
fn stage_out_of_range_is_an_error() {
    let (_, sys, good) = setup();
    let params = ProbeParams {
        n: 9,
        xi: Exponent::new(1, 400),
        budget: 10,
        seed: 0,
    };
    assert!(lemma_separation_probe(&sys, &good, Lemma::ShortBlocks, &params).is_err());
}
