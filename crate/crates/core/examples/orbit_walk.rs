//! Walk an orbit through the towers of a small staircase.
//!
//! cargo run --example orbit_walk

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone::orbit::{HorizontalDistance, RankOne, SamplingMode};
use rankone::spec::RankOneSpec;

fn main() -> rankone::Result<()> {
    let sys = RankOne::new(RankOneSpec::staircase("walk", &[2, 3, 4])?);
    let mut st = sys.base_point();
    for _ in 0..12 {
        let cols: Vec<String> = st.address.columns().iter().map(|c| c.to_string()).collect();
        println!(
            "top level {:>3}  columns [{}]  spacer {:?}",
            sys.top_level(&st),
            cols.join(","),
            st.spacer.as_ref().map(|s| (s.stage, s.offset.to_string()))
        );
        sys.step(&mut st)?;
    }

    // decode and advance agree with stepping
    let far = sys.advance(&sys.base_point(), &12u32.into())?;
    assert_eq!(far, st);
    assert_eq!(sys.decode(&sys.top_level(&st))?, st);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = sys.sample(&mut rng, SamplingMode::Levels);
    let lx = sys.levels(&x);
    // resample until the two points share at least one level
    let d = loop {
        let y = sys.sample(&mut rng, SamplingMode::Levels);
        if let Some(d) = sys.distance_from_levels(&lx, &sys.levels(&y)) {
            break Some(d);
        }
    };
    match d {
        Some(HorizontalDistance::Exact { stage, height }) => {
            println!("d_H = 1/{height} (last shared tower T_{stage})")
        }
        Some(HorizontalDistance::BelowResolution { stage, height }) => {
            println!("d_H <= 1/{height} (shared up to T_{stage})")
        }
        None => println!("no shared level"),
    }
    Ok(())
}
