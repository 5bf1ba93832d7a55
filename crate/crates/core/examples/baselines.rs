//! f-bar of the loosely Bernoulli baselines shrinks as words grow.
//!
//! cargo run --release --example baselines

use rankone::baselines::{odometer_pair, Sturmian};
use rankone::coding::code_product_orbit;
use rankone::fbar::fbar_fast_symbols;

fn main() -> rankone::Result<()> {
    let rot = Sturmian::default();
    let (a, b) = odometer_pair()?;
    let x = a.advance(&a.base_point(), &5u32.into())?;
    for n in [500, 2000, 8000, 32000] {
        let s = fbar_fast_symbols(&rot.code(1 << 40, n).symbols, &rot.code(1 << 62, n).symbols)?;
        let u = code_product_orbit(&a, &b, &a.base_point(), &b.base_point(), 3, n)?;
        let v = code_product_orbit(&a, &b, &x, &b.base_point(), 3, n)?;
        let o = fbar_fast_symbols(&u.symbols, &v.symbols)?;
        println!(
            "N {n:>5}  rotation {:<12}  odometers {}",
            s.value().to_string(),
            o.value()
        );
    }
    Ok(())
}
