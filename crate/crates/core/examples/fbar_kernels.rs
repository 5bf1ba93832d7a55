//! f-bar by the quadratic DP, the bit-parallel kernel and banded bounds.
//!
//! cargo run --release --example fbar_kernels

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankone::fbar::{fbar_bounds, fbar_exact_symbols, fbar_fast_symbols, matching_valid};

fn main() -> rankone::Result<()> {
    let a = [0, 1, 2, 3, 1, 2];
    let b = [1, 2, 0, 3, 2, 1];
    let exact = fbar_exact_symbols(&a, &b, true)?;
    println!("r = {}, f-bar = {}", exact.r, exact.value());
    let m = exact.matching.expect("requested");
    println!(
        "matching {:?} valid {}",
        m.pairs,
        matching_valid(&a, &b, &m)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<u32> = (0..20_000).map(|_| rng.gen_range(0..4)).collect();
    let y: Vec<u32> = (0..20_000).map(|_| rng.gen_range(0..4)).collect();
    let fast = fbar_fast_symbols(&x, &y)?;
    let bounds = fbar_bounds(&x, &y, 200)?;
    println!(
        "bit-parallel f-bar {}  bounds [{}, {}]",
        fast.value(),
        bounds.lower,
        bounds.upper
    );
    Ok(())
}
