//! Points of a truncated rank-one tower as adic addresses, and their orbits.
//!
//! A spec with cuts `p_1..p_M` stacks towers `T_1..T_{M+1}`. A point that is
//! not on a spacer is determined by its columns `c_1..c_M`: `c_n` is the copy
//! of `T_n` inside `T_{n+1}` holding the point. A point on a spacer level
//! added at stage `s` is recorded as the spacer position plus the columns
//! `c_s..c_M`; its lower columns are kept at `p_1..p_{s-1}`, which is where
//! stepping leaves them.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::BigRatio;
use crate::spec::{RankOneSpec, SpacerRule};
use crate::stats::{compute_stats, TowerStats};

/// Columns `c_1..c_M`, each in `[1, p_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointAddress {
    columns: Vec<BigUint>,
}

impl PointAddress {
    pub fn columns(&self) -> &[BigUint] {
        &self.columns
    }

    /// `c_n`, 1-based.
    pub fn column(&self, n: usize) -> &BigUint {
        &self.columns[n - 1]
    }
}

/// Position on the spacer levels added above column `c_stage` of `T_stage`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpacerPosition {
    pub stage: usize,
    pub offset: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitState {
    pub address: PointAddress,
    pub spacer: Option<SpacerPosition>,
}

impl OrbitState {
    pub fn in_spacer(&self) -> bool {
        self.spacer.is_some()
    }
}

/// Level of a point in `T_n`, or `Outside` when it sits on a spacer added at stage `>= n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TowerLevel {
    Level(BigUint),
    Outside,
}

impl TowerLevel {
    pub fn level(&self) -> Option<&BigUint> {
        match self {
            TowerLevel::Level(l) => Some(l),
            TowerLevel::Outside => None,
        }
    }
}

/// `1/h_m` for the last stage `m` at which two points share a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HorizontalDistance {
    Exact {
        stage: usize,
        height: BigUint,
    },
    /// The points share a level of the top tower; the true distance is at most `1/h_top`.
    BelowResolution {
        stage: usize,
        height: BigUint,
    },
}

impl HorizontalDistance {
    pub fn stage(&self) -> usize {
        match self {
            HorizontalDistance::Exact { stage, .. }
            | HorizontalDistance::BelowResolution { stage, .. } => *stage,
        }
    }

    pub fn value(&self) -> Option<BigRatio> {
        match self {
            HorizontalDistance::Exact { height, .. } => {
                Some(BigRatio::new(BigUint::one(), height.clone()))
            }
            HorizontalDistance::BelowResolution { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HorizontalDistance::Exact { .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Uniform over the levels of the top tower.
    #[default]
    Levels,
    /// Independent uniform columns, never on a spacer.
    Columns,
}

enum StepAction {
    EnterSpacer(usize),
    NextColumn(usize),
}

/// A spec together with its tower statistics.
#[derive(Clone, Debug)]
pub struct RankOne {
    spec: RankOneSpec,
    stats: TowerStats,
}

impl RankOne {
    pub fn new(spec: RankOneSpec) -> Self {
        let stats = compute_stats(&spec);
        RankOne { spec, stats }
    }

    pub fn spec(&self) -> &RankOneSpec {
        &self.spec
    }

    pub fn stats(&self) -> &TowerStats {
        &self.stats
    }

    pub fn max_stage(&self) -> usize {
        self.spec.max_stage()
    }

    /// Index of the top tower, `M+1`.
    pub fn top_stage(&self) -> usize {
        self.spec.max_stage() + 1
    }

    pub fn height(&self, n: usize) -> &BigUint {
        self.stats.height(n)
    }

    fn check_stage(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.top_stage() {
            return Err(Error::StageOutOfRange {
                stage: n,
                max: self.top_stage(),
            });
        }
        Ok(())
    }

    /// Offset of column `c` of `T_k` inside `T_{k+1}`.
    pub fn column_start(&self, k: usize, c: &BigUint) -> BigUint {
        (c - 1u32) * self.stats.height(k) + self.spec.spacers_before(k, c)
    }

    /// Point at the bottom of the top tower.
    pub fn base_point(&self) -> OrbitState {
        OrbitState {
            address: PointAddress {
                columns: vec![BigUint::one(); self.max_stage()],
            },
            spacer: None,
        }
    }

    /// Builds a non-spacer state from columns `c_1..c_M`.
    pub fn address(&self, columns: Vec<BigUint>) -> Result<OrbitState> {
        if columns.len() != self.max_stage() {
            return Err(Error::domain(format!(
                "{} columns for a depth-{} spec",
                columns.len(),
                self.max_stage()
            )));
        }
        for (n, c) in columns.iter().enumerate() {
            if c.is_zero() || c > self.spec.cut(n + 1) {
                return Err(Error::domain(format!(
                    "column c_{} = {c} outside [1, p]",
                    n + 1
                )));
            }
        }
        Ok(OrbitState {
            address: PointAddress { columns },
            spacer: None,
        })
    }

    /// Same state with column `c_n` replaced; a spacer position is kept.
    pub fn with_column(&self, st: &OrbitState, n: usize, c: BigUint) -> Result<OrbitState> {
        if n == 0 || n > self.max_stage() {
            return Err(Error::StageOutOfRange {
                stage: n,
                max: self.max_stage(),
            });
        }
        if c.is_zero() || &c > self.spec.cut(n) {
            return Err(Error::domain(format!("column c_{n} = {c} outside [1, p]")));
        }
        let mut out = st.clone();
        out.address.columns[n - 1] = c;
        Ok(out)
    }

    fn plan_carry(
        &self,
        st: &OrbitState,
        mut k: usize,
        mut leaving_top: bool,
    ) -> Result<StepAction> {
        let m = self.max_stage();
        loop {
            if leaving_top {
                if k > m {
                    return Err(Error::OrbitEscape { max_stage: m });
                }
                if !self.spec.spacer_is_zero(k, st.address.column(k)) {
                    return Ok(StepAction::EnterSpacer(k));
                }
            }
            if st.address.column(k) < self.spec.cut(k) {
                return Ok(StepAction::NextColumn(k));
            }
            k += 1;
            leaving_top = true;
        }
    }

    /// Applies the map once. On escape the state is left untouched.
    pub fn step(&self, st: &mut OrbitState) -> Result<()> {
        let action = match &st.spacer {
            Some(sp) => {
                let count = self.spec.spacer(sp.stage, st.address.column(sp.stage));
                if &sp.offset + 1u32 < count {
                    if let Some(sp) = st.spacer.as_mut() {
                        sp.offset += 1u32;
                    }
                    return Ok(());
                }
                self.plan_carry(st, sp.stage, false)?
            }
            None => self.plan_carry(st, 1, true)?,
        };
        match action {
            StepAction::EnterSpacer(k) => {
                st.spacer = Some(SpacerPosition {
                    stage: k,
                    offset: BigUint::zero(),
                });
            }
            StepAction::NextColumn(k) => {
                st.spacer = None;
                st.address.columns[k - 1] += 1u32;
                for c in &mut st.address.columns[..k - 1] {
                    c.set_one();
                }
            }
        }
        Ok(())
    }

    /// Levels `l_1..l_{M+1}` in one pass.
    pub fn levels(&self, st: &OrbitState) -> Vec<TowerLevel> {
        let top = self.top_stage();
        let mut out = Vec::with_capacity(top);
        let (first, mut level) = match &st.spacer {
            Some(sp) => {
                let s = sp.stage;
                let l =
                    self.column_start(s, st.address.column(s)) + self.stats.height(s) + &sp.offset;
                (s + 1, l)
            }
            None => (1, BigUint::zero()),
        };
        out.resize(first - 1, TowerLevel::Outside);
        for k in first..=top {
            out.push(TowerLevel::Level(level.clone()));
            if k < top {
                level += self.column_start(k, st.address.column(k));
            }
        }
        out
    }

    pub fn level_in_tower(&self, st: &OrbitState, n: usize) -> Result<TowerLevel> {
        self.check_stage(n)?;
        let (first, mut level) = match &st.spacer {
            Some(sp) if n <= sp.stage => return Ok(TowerLevel::Outside),
            Some(sp) => {
                let s = sp.stage;
                let l =
                    self.column_start(s, st.address.column(s)) + self.stats.height(s) + &sp.offset;
                (s + 1, l)
            }
            None => (1, BigUint::zero()),
        };
        for k in first..n {
            level += self.column_start(k, st.address.column(k));
        }
        Ok(TowerLevel::Level(level))
    }

    /// Level in the top tower; every state has one.
    pub fn top_level(&self, st: &OrbitState) -> BigUint {
        match self.level_in_tower(st, self.top_stage()) {
            Ok(TowerLevel::Level(l)) => l,
            _ => unreachable!("top tower contains every spacer of stages <= M"),
        }
    }

    /// Largest column `c` of `T_k` with `column_start(k, c) <= level`.
    fn column_containing(&self, k: usize, level: &BigUint) -> BigUint {
        let p = self.spec.cut(k);
        let h = self.stats.height(k);
        let mut guess = match self.spec.spacer_rule() {
            SpacerRule::Staircase { zero_prefix } if k > *zero_prefix => {
                // x = c - 1 solves x^2 + (2h+1)x <= 2 level
                let b: BigUint = (h << 1u32) + 1u32;
                let disc = &b * &b + (level << 3u32);
                let s = disc.sqrt();
                if s >= b {
                    (s - &b) >> 1u32
                } else {
                    BigUint::zero()
                }
            }
            SpacerRule::None | SpacerRule::Staircase { .. } => level / h,
            SpacerRule::Explicit(_) => {
                let (mut lo, mut hi) = (BigUint::zero(), p.clone());
                // largest x in [0, p) with start(x+1) <= level
                while &hi - &lo > BigUint::one() {
                    let mid: BigUint = (&lo + &hi) >> 1u32;
                    if self.column_start(k, &(&mid + 1u32)) <= *level {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        };
        let last = p - 1u32;
        if guess > last {
            guess = last;
        }
        while guess < p - 1u32 && self.column_start(k, &(&guess + 2u32)) <= *level {
            guess += 1u32;
        }
        while !guess.is_zero() && self.column_start(k, &(&guess + 1u32)) > *level {
            guess -= 1u32;
        }
        guess + 1u32
    }

    /// State at a given level of the top tower.
    pub fn decode(&self, top_level: &BigUint) -> Result<OrbitState> {
        if top_level >= self.stats.top_height() {
            return Err(Error::domain(format!(
                "level {top_level} outside the top tower of height {}",
                self.stats.top_height()
            )));
        }
        let m = self.max_stage();
        let mut columns = vec![BigUint::one(); m];
        let mut level = top_level.clone();
        for k in (1..=m).rev() {
            let c = self.column_containing(k, &level);
            let rem = &level - self.column_start(k, &c);
            let h = self.stats.height(k);
            if rem >= *h {
                for (j, col) in columns.iter_mut().enumerate().take(k - 1) {
                    *col = self.spec.cut(j + 1).clone();
                }
                columns[k - 1] = c;
                return Ok(OrbitState {
                    address: PointAddress { columns },
                    spacer: Some(SpacerPosition {
                        stage: k,
                        offset: rem - h,
                    }),
                });
            }
            columns[k - 1] = c;
            level = rem;
        }
        Ok(OrbitState {
            address: PointAddress { columns },
            spacer: None,
        })
    }

    /// `r` applications of the map at once.
    pub fn advance(&self, st: &OrbitState, r: &BigUint) -> Result<OrbitState> {
        let target = self.top_level(st) + r;
        if target >= *self.stats.top_height() {
            return Err(Error::OrbitEscape {
                max_stage: self.max_stage(),
            });
        }
        self.decode(&target)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, mode: SamplingMode) -> OrbitState {
        match mode {
            SamplingMode::Levels => {
                let l = rng.gen_biguint_below(self.stats.top_height());
                self.decode(&l)
                    .expect("sampled level lies in the top tower")
            }
            SamplingMode::Columns => {
                let columns = self
                    .spec
                    .cuts()
                    .iter()
                    .map(|p| rng.gen_biguint_range(&BigUint::one(), &(p + 1u32)))
                    .collect();
                OrbitState {
                    address: PointAddress { columns },
                    spacer: None,
                }
            }
        }
    }

    /// Horizontal distance of two points that share a level of `T_n`.
    pub fn horizontal_distance(
        &self,
        x: &OrbitState,
        y: &OrbitState,
        n: usize,
    ) -> Result<HorizontalDistance> {
        self.check_stage(n)?;
        let lx = self.levels(x);
        let ly = self.levels(y);
        let shared = |k: usize| matches!((&lx[k - 1], &ly[k - 1]), (TowerLevel::Level(a), TowerLevel::Level(b)) if a == b);
        if !shared(n) {
            return Err(Error::domain(format!(
                "points do not share a level of T_{n}"
            )));
        }
        Ok(self
            .distance_from_levels(&lx, &ly)
            .expect("shared at stage n"))
    }

    /// Horizontal distance from precomputed level vectors; `None` when no level is shared.
    pub fn distance_from_levels(
        &self,
        lx: &[TowerLevel],
        ly: &[TowerLevel],
    ) -> Option<HorizontalDistance> {
        let top = self.top_stage();
        let m = (1..=top).rev().find(|&k| {
            matches!((&lx[k - 1], &ly[k - 1]), (TowerLevel::Level(a), TowerLevel::Level(b)) if a == b)
        })?;
        let height = self.stats.height(m).clone();
        Some(if m == top {
            HorizontalDistance::BelowResolution { stage: m, height }
        } else {
            HorizontalDistance::Exact { stage: m, height }
        })
    }

    /// Column of `T_n` inside `T_{n+1}` for points inside `T_n`.
    pub fn column_in<'a>(&self, st: &'a OrbitState, n: usize) -> Option<&'a BigUint> {
        match &st.spacer {
            Some(sp) if n <= sp.stage => None,
            _ if n > self.max_stage() => None,
            _ => Some(st.address.column(n)),
        }
    }

    /// Level of `T_n` as `u64`, when the tower is small enough.
    pub fn small_level(&self, st: &OrbitState, n: usize) -> Result<Option<u64>> {
        Ok(match self.level_in_tower(st, n)? {
            TowerLevel::Level(l) => Some(
                l.to_u64()
                    .ok_or_else(|| Error::domain("level exceeds u64"))?,
            ),
            TowerLevel::Outside => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn one_stage_staircase_walk() {
        // p = (2), staircase: column 1, one spacer, column 2, two spacers, then escape
        let sys = RankOne::new(RankOneSpec::staircase("s", &[2]).unwrap());
        let mut st = sys.base_point();
        let mut seen = vec![sys.top_level(&st)];
        let mut steps = 0;
        while sys.step(&mut st).is_ok() {
            seen.push(sys.top_level(&st));
            steps += 1;
        }
        assert_eq!(steps, 4);
        assert_eq!(seen, (0..5u64).map(big).collect::<Vec<_>>());
        assert!(matches!(
            sys.step(&mut st),
            Err(Error::OrbitEscape { max_stage: 1 })
        ));
    }

    #[test]
    fn odometer_escape_count() {
        let sys = RankOne::new(RankOneSpec::odometer("o", 2, 5).unwrap());
        for start in [0u64, 7, 31] {
            let mut st = sys.decode(&big(start)).unwrap();
            let mut n = 0u64;
            while sys.step(&mut st).is_ok() {
                n += 1;
            }
            assert_eq!(n, 32 - 1 - start);
        }
    }

    #[test]
    fn escape_leaves_state_unchanged() {
        let sys = RankOne::new(RankOneSpec::staircase("s", &[2, 3]).unwrap());
        let mut st = sys.decode(&(sys.stats().top_height() - 1u32)).unwrap();
        let before = st.clone();
        assert!(sys.step(&mut st).is_err());
        assert_eq!(st, before);
    }

    #[test]
    fn decode_inverts_top_level() {
        let sys = RankOne::new(RankOneSpec::staircase("s", &[3, 4, 2]).unwrap());
        let h = sys.stats().top_height().to_u64().unwrap();
        let mut st = sys.base_point();
        for l in 0..h {
            assert_eq!(sys.top_level(&st), big(l));
            assert_eq!(sys.decode(&big(l)).unwrap(), st);
            if l + 1 < h {
                sys.step(&mut st).unwrap();
            }
        }
    }

    #[test]
    fn fresh_sample_is_at_level_zero_of_first_tower() {
        let sys = RankOne::new(RankOneSpec::staircase("s", &[3, 4, 5]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = sys.sample(&mut rng, SamplingMode::Columns);
        assert_eq!(
            sys.level_in_tower(&st, 1).unwrap(),
            TowerLevel::Level(big(0))
        );
        assert!(sys.level_in_tower(&st, 5).is_err());
        assert!(sys.level_in_tower(&st, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let sys = RankOne::new(RankOneSpec::odometer("o", 2, 10).unwrap());
        let a = sys.sample(&mut ChaCha8Rng::seed_from_u64(9), SamplingMode::Levels);
        let b = sys.sample(&mut ChaCha8Rng::seed_from_u64(9), SamplingMode::Levels);
        assert_eq!(a, b);
    }

    #[test]
    fn identical_points_hit_the_sentinel() {
        let sys = RankOne::new(RankOneSpec::staircase("s", &[3, 4]).unwrap());
        let x = sys.decode(&big(12)).unwrap();
        let d = sys.horizontal_distance(&x, &x, 1).unwrap();
        assert!(matches!(
            d,
            HorizontalDistance::BelowResolution { stage: 3, .. }
        ));
    }

    #[test]
    fn distance_stops_where_columns_split() {
        let sys = RankOne::new(RankOneSpec::staircase("s", &[3, 4, 2]).unwrap());
        let x = sys.address(vec![big(1), big(2), big(1)]).unwrap();
        let y = sys.address(vec![big(2), big(2), big(1)]).unwrap();
        // both on level 0 of T_1, different columns of T_1 in T_2
        let d = sys.horizontal_distance(&x, &y, 1).unwrap();
        assert_eq!(d.stage(), 1);
        assert_eq!(d.value().unwrap(), BigRatio::new(big(1), big(1)));
        let z = sys.address(vec![big(1), big(3), big(1)]).unwrap();
        assert_eq!(sys.horizontal_distance(&x, &z, 2).unwrap().stage(), 2);
        assert!(sys
            .horizontal_distance(&x, &sys.decode(&big(1)).unwrap(), 2)
            .is_err());
    }
}
