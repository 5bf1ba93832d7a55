//! Tower-interior and level-separated sets: exact measure and sampled frequency.
//!
//! cargo run --release --example good_sets

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone::analysis::goodsets::{GoodSetParams, GoodSets};
use rankone::exact::{decimal_half_even, Exponent};
use rankone::orbit::{RankOne, SamplingMode};
use rankone::spec::RankOneSpec;

fn main() -> rankone::Result<()> {
    let sys = RankOne::new(RankOneSpec::staircase("g", &[6, 40, 300, 2000, 9000])?);
    let good = GoodSets::new(
        &sys,
        GoodSetParams {
            gamma: Exponent::new(7, 100),
            n1: 2,
            n3: 2,
            last: None,
        },
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<_> = (0..20_000)
        .map(|_| sys.sample(&mut rng, SamplingMode::Levels))
        .collect();
    for n in 2..=sys.max_stage() {
        let exact = good.measure_f_stage(&sys, n);
        let hits = samples
            .iter()
            .filter(|x| good.in_f(&sys, x, n).unwrap_or(false))
            .count();
        println!(
            "F_{n}: exact {}  sampled {:.4}",
            decimal_half_even(exact.numer(), exact.denom(), 4),
            hits as f64 / samples.len() as f64
        );
    }
    let x = &samples[0];
    let d = samples.iter().filter(|y| good.in_d_all(&sys, x, y)).count();
    println!(
        "D_x frequency for the first sample: {:.4}",
        d as f64 / samples.len() as f64
    );
    Ok(())
}
