//! Sampled separation checks on the good sets of a small staircase.
//!
//! cargo run --release --example lemma_probes

use rankone::analysis::goodsets::{GoodSetParams, GoodSets};
use rankone::analysis::probes::{lemma_separation_probe, Lemma, ProbeParams};
use rankone::exact::Exponent;
use rankone::orbit::RankOne;
use rankone::spec::RankOneSpec;

fn main() -> rankone::Result<()> {
    let sys = RankOne::new(RankOneSpec::staircase("p", &[6, 7, 8, 9, 10, 11])?);
    let good = GoodSets::new(
        &sys,
        GoodSetParams {
            gamma: Exponent::new(7, 100),
            n1: 3,
            n3: 3,
            last: Some(4),
        },
    )?;
    for n in 2..=5 {
        for lemma in Lemma::ALL {
            let params = ProbeParams {
                n,
                xi: Exponent::new(1, 400),
                budget: 2000,
                seed: n as u64,
            };
            let r = lemma_separation_probe(&sys, &good, lemma, &params)?;
            println!(
                "{:<9} n {n}  pairs {:>4}  checks {:>5}  violations {}",
                lemma.name(),
                r.admissible_pairs,
                r.checks,
                r.violations.len()
            );
            if let Some(w) = r.violations.first() {
                println!("    first witness {w:?}");
            }
        }
    }
    Ok(())
}
