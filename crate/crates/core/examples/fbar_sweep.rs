//! Median f-bar of the constructed pair against both baselines.
//!
//! cargo run --release --example fbar_sweep [config]

use std::path::PathBuf;

use rankone::experiment::{report_tsv, summarize, Experiment};

fn main() -> rankone::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/configs/experiment.toml"
            )
            .into()
        });
    let exp = Experiment::load(&path)?;
    let out = exp.fbar_sweep()?;
    for (subject, found) in &out.shortfall {
        eprintln!("only {found} admissible pairs for {}", subject.name());
    }
    print!("{}", report_tsv(&summarize(&out.records)?));
    Ok(())
}
