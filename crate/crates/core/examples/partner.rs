//! Build the staircase partner S of the shipped T and verify the pair.
//!
//! cargo run --release --example partner

use rankone::alternating::{
    construct_partner, intermediate_chain_check, verify_partner, ChainParams, ChainReport,
    PartnerParams,
};
use rankone::classify::ClassParams;
use rankone::exact::Exponent;
use rankone::spec::SpecFile;

fn main() -> rankone::Result<()> {
    let t = SpecFile::read(
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/staircase_t.toml"
        )
        .as_ref(),
    )?
    .resolve()?;
    let class = ClassParams::new(Exponent::new(21, 100), Exponent::new(3, 10), 5)?;
    let params = PartnerParams::new(class, Exponent::new(1, 128))?;
    let (s, trace) = construct_partner(&t, &params)?;
    for w in &trace.windows {
        println!(
            "stage {:>2}  p^S {:>5} bits  window ok {}  length bound {}",
            w.stage,
            w.chosen.bits(),
            w.contains_choice(),
            w.length_bound
        );
    }

    let report = verify_partner(&t, &s, &class)?;
    println!("cut windows hold from {:?}", report.cut_threshold);
    println!(
        "S in class from {:?}, T from {:?}",
        report.class_s_from, report.class_t_from
    );
    println!(
        "alternation thresholds {} / {}",
        report.alternation.b_wrt_a.threshold(),
        report.alternation.a_wrt_b.threshold()
    );
    println!("passes {}", report.passes());

    let chain = intermediate_chain_check(
        &t,
        &s,
        &ChainParams {
            gamma: class.gamma,
            gamma_prime: class.gamma_prime,
            eta: params.eta,
            from: 1,
        },
    );
    println!(
        "chain settles: left {:?} right {:?} heights {:?}",
        ChainReport::settles(&chain.left),
        ChainReport::settles(&chain.right),
        ChainReport::settles(&chain.height_bound)
    );
    Ok(())
}
