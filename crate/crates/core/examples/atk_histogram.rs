//! Scale histogram of the optimal matching between two product orbits.
//!
//! cargo run --release --example atk_histogram

use rankone::experiment::Experiment;

fn main() -> rankone::Result<()> {
    let exp = Experiment::load(
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/small_pair.toml"
        )
        .as_ref(),
    )?;
    let (records, shortfall) = exp.atk_histograms()?;
    if !shortfall.is_empty() {
        eprintln!("fewer admissible pairs than requested: {shortfall:?}");
    }
    for r in records.iter().filter(|r| r.matching == "optimal") {
        let buckets: Vec<String> = r
            .buckets
            .iter()
            .map(|b| format!("k={} {} (bound {})", b.k, b.count, b.bound))
            .collect();
        println!(
            "pair {:>2}  r {:>3}  H {:>3}  {}",
            r.pair,
            r.r,
            r.good,
            buckets.join(", ")
        );
    }
    Ok(())
}
