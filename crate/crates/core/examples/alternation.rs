//! Mutual delta-alternation of two integer sequences.
//!
//! cargo run --example alternation

use num_bigint::BigUint;
use rankone::alternating::check_delta_alternating;
use rankone::exact::Exponent;

fn main() -> rankone::Result<()> {
    // a = 2^(4^n), b = 2^(2 * 4^n): each b sits between two a's with room to spare
    let a: Vec<BigUint> = (0..6)
        .map(|n| BigUint::from(2u32).pow(4u32.pow(n)))
        .collect();
    let b: Vec<BigUint> = (0..6)
        .map(|n| BigUint::from(2u32).pow(2 * 4u32.pow(n)))
        .collect();
    let report = check_delta_alternating(&a, &b, Exponent::new(1, 2), 1)?;
    for row in &report.b_wrt_a.rows {
        println!("{row:?}");
    }
    println!("both directions: {}", report.verdict());

    // equal sequences never alternate
    let same = check_delta_alternating(&a, &a, Exponent::new(1, 2), 1)?;
    println!("a against itself: {}", same.verdict());
    Ok(())
}
