//! Membership in the class `C_{gamma,gamma'}` stage by stage.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{cmp_int_pow, Exponent};
use crate::spec::RankOneSpec;
use crate::stats::TowerStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassParams {
    pub gamma: Exponent,
    pub gamma_prime: Exponent,
    /// First stage at which membership is required.
    pub n_start: usize,
}

impl ClassParams {
    pub fn new(gamma: Exponent, gamma_prime: Exponent, n_start: usize) -> Result<Self> {
        if !(gamma > Exponent::from(0) && gamma < gamma_prime && gamma_prime < Exponent::from(1)) {
            return Err(Error::domain(format!(
                "need 0 < gamma < gamma' < 1, got {gamma} and {gamma_prime}"
            )));
        }
        Ok(ClassParams {
            gamma,
            gamma_prime,
            n_start: n_start.max(1),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub stage: usize,
    /// `h_n^gamma <= p_n < h_n^gamma'`
    pub cut_in_window: bool,
    pub spacers_increasing: bool,
    /// `a_{n,p_n} <= h_n^gamma'`
    pub last_spacer_bounded: bool,
}

impl ClassRow {
    pub fn holds(&self) -> bool {
        self.cut_in_window && self.spacers_increasing && self.last_spacer_bounded
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub gamma: String,
    pub gamma_prime: String,
    pub rows: Vec<ClassRow>,
}

impl ClassReport {
    pub fn verdict(&self) -> bool {
        self.rows.iter().all(ClassRow::holds)
    }

    /// Smallest listed stage from which every row holds.
    pub fn member_from(&self) -> Option<usize> {
        let mut first = None;
        for row in self.rows.iter().rev() {
            if row.holds() {
                first = Some(row.stage);
            } else {
                break;
            }
        }
        first
    }
}

pub fn classify_stage(
    spec: &RankOneSpec,
    stats: &TowerStats,
    gamma: Exponent,
    gamma_prime: Exponent,
    n: usize,
) -> ClassRow {
    let p = spec.cut(n);
    let h = stats.height(n);
    let above_lower = cmp_int_pow(h, gamma, p) != Ordering::Greater;
    let below_upper = cmp_int_pow(h, gamma_prime, p) == Ordering::Greater;
    let last = spec.last_spacer(n);
    ClassRow {
        stage: n,
        cut_in_window: above_lower && below_upper,
        spacers_increasing: spec.spacers_increasing(n),
        last_spacer_bounded: cmp_int_pow(h, gamma_prime, &last) != Ordering::Less,
    }
}

pub fn classify(spec: &RankOneSpec, stats: &TowerStats, params: &ClassParams) -> ClassReport {
    let rows = (params.n_start..=spec.max_stage())
        .map(|n| classify_stage(spec, stats, params.gamma, params.gamma_prime, n))
        .collect();
    ClassReport {
        gamma: params.gamma.to_string(),
        gamma_prime: params.gamma_prime.to_string(),
        rows,
    }
}
