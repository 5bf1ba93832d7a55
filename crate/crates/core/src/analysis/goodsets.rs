//! Tower-interior sets `F_n` and level-separated sets `D^{x,n}`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ceil_pow, BigRatio, Exponent};
use crate::orbit::{OrbitState, RankOne, TowerLevel};

/// `gamma` sets the column margin `ceil(h_n^(gamma/4))`; `F` uses stages
/// `n1..=last` and `D` uses `n3..=last`, where `last` defaults to the deepest
/// stage that has a column digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodSetParams {
    pub gamma: Exponent,
    pub n1: usize,
    pub n3: usize,
    pub last: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageMargins {
    pub stage: usize,
    /// `floor(h_n / n^2)`
    pub level: BigUint,
    /// `ceil(h_n^(gamma/4))`
    pub column: BigUint,
    /// `h_n - floor(h_n / n^2)`
    pub level_hi: BigUint,
    /// `p_n - ceil(h_n^(gamma/4))`, absent when negative
    pub column_hi: Option<BigUint>,
}

/// Margins of every stage of one system, precomputed.
#[derive(Clone, Debug)]
pub struct GoodSets {
    params: GoodSetParams,
    last: usize,
    margins: Vec<StageMargins>,
}

impl GoodSets {
    pub fn new(sys: &RankOne, params: GoodSetParams) -> Result<Self> {
        let m = sys.max_stage();
        let last = params.last.unwrap_or(m);
        if last > m || last == 0 {
            return Err(Error::StageOutOfRange {
                stage: last,
                max: m,
            });
        }
        if params.n1 == 0 || params.n3 == 0 {
            return Err(Error::domain("n1 and n3 start at 1"));
        }
        let e = params.gamma / 4;
        let margins = (1..=m)
            .map(|n| {
                let h = sys.height(n);
                let level = h / BigUint::from(n * n);
                let column = ceil_pow(h, e);
                let p = sys.spec().cut(n);
                StageMargins {
                    stage: n,
                    level_hi: h - &level,
                    column_hi: (p >= &column).then(|| p - &column),
                    level,
                    column,
                }
            })
            .collect();
        Ok(GoodSets {
            params,
            last,
            margins,
        })
    }

    pub fn params(&self) -> &GoodSetParams {
        &self.params
    }

    pub fn last(&self) -> usize {
        self.last
    }

    pub fn margins(&self, n: usize) -> &StageMargins {
        &self.margins[n - 1]
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.margins.len() {
            return Err(Error::StageOutOfRange {
                stage: n,
                max: self.margins.len(),
            });
        }
        Ok(())
    }

    /// Membership in `F_n` from the level vector and the column digit of stage `n`.
    pub fn in_f_stage(
        &self,
        levels: &[TowerLevel],
        column: Option<&BigUint>,
        n: usize,
    ) -> Result<bool> {
        self.check(n)?;
        let mg = &self.margins[n - 1];
        let TowerLevel::Level(l) = &levels[n - 1] else {
            return Ok(false);
        };
        let (Some(c), Some(c_hi)) = (column, &mg.column_hi) else {
            return Ok(false);
        };
        Ok(*l >= mg.level && *l <= mg.level_hi && *c >= mg.column && c <= c_hi)
    }

    pub fn in_f(&self, sys: &RankOne, st: &OrbitState, n: usize) -> Result<bool> {
        self.check(n)?;
        let levels = sys.levels(st);
        self.in_f_stage(&levels, sys.column_in(st, n), n)
    }

    /// Membership in `F = intersection of F_n over n1..=last`.
    pub fn in_f_all_levels(&self, sys: &RankOne, st: &OrbitState, levels: &[TowerLevel]) -> bool {
        (self.params.n1..=self.last).all(|n| {
            self.in_f_stage(levels, sys.column_in(st, n), n)
                .unwrap_or(false)
        })
    }

    pub fn in_f_all(&self, sys: &RankOne, st: &OrbitState) -> bool {
        self.in_f_all_levels(sys, st, &sys.levels(st))
    }

    /// `x'` in `D^{x,n}`: both in `T_n`, levels more than `floor(h_n/n^2)` apart.
    pub fn in_d_stage(&self, lx: &[TowerLevel], lxp: &[TowerLevel], n: usize) -> Result<bool> {
        self.check(n)?;
        let (TowerLevel::Level(a), TowerLevel::Level(b)) = (&lx[n - 1], &lxp[n - 1]) else {
            return Ok(false);
        };
        let gap = if a >= b { a - b } else { b - a };
        Ok(gap.cmp(&self.margins[n - 1].level) == Ordering::Greater)
    }

    pub fn in_d(
        &self,
        sys: &RankOne,
        x: &OrbitState,
        x_prime: &OrbitState,
        n: usize,
    ) -> Result<bool> {
        self.in_d_stage(&sys.levels(x), &sys.levels(x_prime), n)
    }

    /// `x'` in `D_x = intersection of D^{x,n} over n3..=last`.
    pub fn in_d_all(&self, sys: &RankOne, x: &OrbitState, x_prime: &OrbitState) -> bool {
        let (lx, lxp) = (sys.levels(x), sys.levels(x_prime));
        (self.params.n3..=self.last).all(|n| self.in_d_stage(&lx, &lxp, n).unwrap_or(false))
    }

    /// Exact measure of `F_n` under the level-uniform measure of the top tower:
    /// each cell (level, column) of `T_n` inside `T_(n+1)` is repeated once per
    /// copy of `T_(n+1)` in `T_(M+1)`.
    pub fn measure_f_stage(&self, sys: &RankOne, n: usize) -> BigRatio {
        let mg = &self.margins[n - 1];
        let h = sys.height(n);
        let top = (&mg.level_hi).min(&(h - 1u32)).clone();
        let levels = if top >= mg.level {
            top - &mg.level + 1u32
        } else {
            BigUint::zero()
        };
        let cols = match &mg.column_hi {
            Some(hi) if *hi >= mg.column => hi - &mg.column + 1u32,
            _ => BigUint::zero(),
        };
        let copies: BigUint = sys.spec().cuts()[n..].iter().product();
        BigRatio::new(levels * cols * copies, sys.stats().top_height().clone())
    }
}
