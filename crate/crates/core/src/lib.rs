//! Rank-one cutting-and-stacking systems at finite depth.
//!
//! A [`spec::RankOneSpec`] fixes cuts and spacers up to a stage `M`;
//! [`orbit::RankOne`] walks exact orbits through the towers `T_1..T_{M+1}`
//! and fails with [`Error::OrbitEscape`] instead of wrapping. On top of that:
//!
//! - [`classify`] and [`alternating`]: the classes `C_(gamma,gamma')`, mutual
//!   alternation of heights, and construction of a staircase partner `S` for `T`.
//! - [`coding`] and [`fbar`]: words of orbits against tower partitions and the
//!   f-bar distance between them.
//! - [`analysis`]: window sets of index matchings, good sets, the scale
//!   histogram of a product matching, and sampled separation probes.
//! - [`experiment`] and [`baselines`]: seeded sweeps of the constructed pair
//!   against an odometer product and a Sturmian rotation.
//!
//! All inequalities between heights are decided in big-integer arithmetic.

pub mod alternating;
pub mod analysis;
pub mod baselines;
pub mod classify;
pub mod coding;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fbar;
pub mod orbit;
pub mod spec;
pub mod stats;

pub use error::{Error, Result};
