//! Stage-by-stage membership of a staircase in C_(gamma, gamma').
//!
//! cargo run --example classify_class

use rankone::classify::{classify, ClassParams};
use rankone::exact::Exponent;
use rankone::spec::{RankOneSpec, SpecFile};
use rankone::stats::compute_stats;

fn main() -> rankone::Result<()> {
    let params = ClassParams::new(Exponent::new(21, 100), Exponent::new(3, 10), 1)?;
    let t = SpecFile::read(
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/staircase_t.toml"
        )
        .as_ref(),
    )?
    .resolve()?;
    let report = classify(&t, &compute_stats(&t), &params);
    for row in &report.rows {
        println!(
            "{:>2} {}",
            row.stage,
            if row.holds() { "in" } else { "out" }
        );
    }
    println!("member from stage {:?}", report.member_from());

    // odometers have no spacers, so the spacer rows fail everywhere
    let odo = RankOneSpec::odometer("odometer", 2, 8)?;
    println!(
        "odometer verdict {}",
        classify(&odo, &compute_stats(&odo), &params).verdict()
    );
    Ok(())
}
