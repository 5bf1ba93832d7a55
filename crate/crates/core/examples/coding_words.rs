//! Code orbits against tower partitions and round-trip the word files.
//!
//! cargo run --example coding_words

use rankone::coding::{code_product_orbit, SymbolWord};
use rankone::orbit::RankOne;
use rankone::spec::RankOneSpec;

fn main() -> rankone::Result<()> {
    let t = RankOne::new(RankOneSpec::staircase("t", &[3, 4, 5])?);
    let s = RankOne::new(RankOneSpec::staircase("s", &[2, 5, 4])?);

    let w = t.code_orbit(&t.base_point(), 2, 20)?;
    println!("{:?}", w.symbols);

    let p = code_product_orbit(&t, &s, &t.base_point(), &s.base_point(), 2, 20)?;
    let text = p.to_text();
    print!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    assert_eq!(SymbolWord::from_text(&text)?, p);

    let mut bytes = Vec::new();
    p.write_binary(&mut bytes)?;
    println!("binary {} bytes for {} symbols", bytes.len(), p.len());
    assert_eq!(SymbolWord::read_binary(&bytes[..])?.symbols, p.symbols);
    Ok(())
}
