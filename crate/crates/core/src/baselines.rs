//! Loosely Bernoulli reference systems: a product of coprime odometers and the
//! golden-rotation Sturmian coding.

use crate::coding::{Alphabet, SymbolWord};
use crate::error::Result;
use crate::orbit::RankOne;
use crate::spec::RankOneSpec;

/// Dyadic and triadic odometers deep enough for orbits of `~10^9` steps.
pub fn odometer_pair() -> Result<(RankOne, RankOne)> {
    Ok((
        RankOne::new(RankOneSpec::odometer("odometer-2", 2, 32)?),
        RankOne::new(RankOneSpec::odometer("odometer-3", 3, 20)?),
    ))
}

/// `floor(2^64 (sqrt 5 - 1) / 2)`
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Rotation by `alpha` on the circle `Z / 2^64`, coded by `[1 - alpha, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sturmian {
    pub alpha: u64,
}

impl Default for Sturmian {
    fn default() -> Self {
        Sturmian { alpha: GOLDEN }
    }
}

impl Sturmian {
    pub fn symbol(&self, t: u64) -> u32 {
        (t >= self.alpha.wrapping_neg()) as u32
    }

    pub fn code(&self, start: u64, len: usize) -> SymbolWord {
        let mut t = start;
        let mut symbols = Vec::with_capacity(len);
        for _ in 0..len {
            symbols.push(self.symbol(t));
            t = t.wrapping_add(self.alpha);
        }
        SymbolWord {
            alphabet: Alphabet::Plain { size: 2 },
            symbols,
        }
    }
}
