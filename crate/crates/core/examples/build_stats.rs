//! Resolve a power-window staircase and print its heights and spacer mass.
//!
//! cargo run --example build_stats

use rankone::exact::ratio_string;
use rankone::spec::{RankOneSpec, SpecFile};
use rankone::stats::compute_stats;

fn main() -> rankone::Result<()> {
    let file = SpecFile::read(
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/staircase_t.toml"
        )
        .as_ref(),
    )?;
    let spec = file.resolve()?;
    let stats = compute_stats(&spec);
    for n in 1..=spec.max_stage() {
        println!(
            "p_{n:<2} {:>4} bits   h_{n:<2} {:>5} bits",
            spec.cut(n).bits(),
            stats.height(n).bits()
        );
    }
    println!("K = {}", ratio_string(&stats.k_bound));

    // hand-sized staircase: h = 1, 2*1+1, 3*3+3
    let small = RankOneSpec::staircase("small", &[2, 3])?;
    let st = compute_stats(&small);
    println!("{:?}", st.heights);
    println!("{}", small.to_file().to_canonical_string());
    Ok(())
}
