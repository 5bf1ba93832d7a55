//! Window sets of an index matching and the covering argument.
//!
//! cargo run --example comb_lemma

use rankone::analysis::windows::{comb_lemma_check, greedy_cover, window_sets, WindowParams};
use rankone::exact::Exponent;
use rankone::fbar::Matching;

fn main() -> rankone::Result<()> {
    let params = WindowParams::new(16, Exponent::new(1, 2), 4000)?;
    println!(
        "reach {} applicable {}",
        params.reach(),
        params.applicable()
    );

    // clusters of 30 pairs, 100 apart on the left and 150 apart on the right
    let pairs: Vec<(usize, usize)> = (0..20)
        .flat_map(|c| (0..30).map(move |s| (100 * c + s, 150 * c + 2 * s)))
        .collect();
    let theta = Matching::new(pairs);
    let (i, j) = &window_sets(&theta, params.reach())[0];
    println!("|I| = {}, |J| = {} at the first pivot", i.len(), j.len());

    let report = comb_lemma_check(&theta, &params);
    println!(
        "hypothesis {} conclusion {:?}",
        report.hypothesis(),
        report.conclusion
    );
    let cover = greedy_cover(&theta, &params)?;
    println!(
        "v = {}  covers {}  blocks small {}  count bound {}",
        cover.v(),
        cover.covers,
        cover.blocks_small,
        cover.count_bound
    );

    let identity = Matching::new((0..4000).map(|s| (s, s)).collect());
    println!(
        "identity witnesses: {}",
        comb_lemma_check(&identity, &params).witnesses.len()
    );
    Ok(())
}
