//! Sampled checks of the separation inequalities for points of the good sets.
//!
//! Every check reduces to whether two points share a level of some tower:
//! `d_H(a, b) >= 1/h_(n-1)` holds exactly when `a` and `b` are in different
//! levels of `T_n`.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::goodsets::GoodSets;
use crate::error::{Error, Result};
use crate::exact::{floor_pow, Exponent};
use crate::orbit::{OrbitState, RankOne, SamplingMode, TowerLevel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// Orbits of two points at distance `1/h_n` split at `T_n` after `r` steps,
    /// `h_n <= r <= h_n^(1+2 xi)`.
    #[serde(rename = "short:bl")]
    ShortBlocks,
    /// Two points sharing a level of `T_n` stay in distinct levels under
    /// distinct small shifts `0 <= i, j <= h_n / n^3`.
    #[serde(rename = "unif:dist")]
    UniformDistance,
    /// A point of `F` and a point of `D_x` never share a level of `T_(n+1)`
    /// under shifts up to `h_(n+1) / (n+1)^2`.
    #[serde(rename = "ffo")]
    FarOrbits,
}

impl Lemma {
    pub const ALL: [Lemma; 3] = [Lemma::ShortBlocks, Lemma::UniformDistance, Lemma::FarOrbits];

    pub fn name(&self) -> &'static str {
        match self {
            Lemma::ShortBlocks => "short:bl",
            Lemma::UniformDistance => "unif:dist",
            Lemma::FarOrbits => "ffo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeParams {
    pub n: usize,
    pub xi: Exponent,
    /// Cap on sampled points and on shift checks.
    pub budget: usize,
    pub seed: u64,
}

/// Replayable counterexample: top-tower levels of both points and the shifts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeWitness {
    pub x: String,
    pub x_prime: String,
    pub i: String,
    pub j: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub lemma: Lemma,
    pub n: usize,
    pub admissible_pairs: usize,
    pub checks: usize,
    pub violations: Vec<ProbeWitness>,
}

impl ProbeReport {
    /// No admissible pair was found within the budget.
    pub fn inconclusive(&self) -> bool {
        self.admissible_pairs == 0
    }
}

const SHIFTS_PER_PAIR: usize = 64;

fn same_level(sys: &RankOne, a: &OrbitState, b: &OrbitState, n: usize) -> Result<bool> {
    Ok(
        match (sys.level_in_tower(a, n)?, sys.level_in_tower(b, n)?) {
            (TowerLevel::Level(x), TowerLevel::Level(y)) => x == y,
            _ => false,
        },
    )
}

fn witness(
    sys: &RankOne,
    x: &OrbitState,
    xp: &OrbitState,
    i: &BigUint,
    j: &BigUint,
) -> ProbeWitness {
    ProbeWitness {
        x: sys.top_level(x).to_string(),
        x_prime: sys.top_level(xp).to_string(),
        i: i.to_string(),
        j: j.to_string(),
    }
}

fn sample_in_f<R: Rng>(
    sys: &RankOne,
    good: &GoodSets,
    rng: &mut R,
    tries: &mut usize,
    budget: usize,
) -> Option<OrbitState> {
    while *tries < budget {
        *tries += 1;
        let x = sys.sample(rng, SamplingMode::Levels);
        if good.in_f_all(sys, &x) {
            return Some(x);
        }
    }
    None
}

/// Uniform integer in `[lo, hi]`.
fn uniform<R: Rng>(rng: &mut R, lo: &BigUint, hi: &BigUint) -> BigUint {
    rng.gen_biguint_range(lo, &(hi + 1u32))
}

pub fn lemma_separation_probe(
    sys: &RankOne,
    good: &GoodSets,
    lemma: Lemma,
    params: &ProbeParams,
) -> Result<ProbeReport> {
    let n = params.n;
    let m = sys.max_stage();
    let ok_stage = match lemma {
        Lemma::ShortBlocks | Lemma::UniformDistance => n >= 2 && n <= m,
        Lemma::FarOrbits => n >= 1 && n <= m,
    };
    if !ok_stage {
        return Err(Error::StageOutOfRange { stage: n, max: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut report = ProbeReport {
        lemma,
        n,
        admissible_pairs: 0,
        checks: 0,
        violations: Vec::new(),
    };
    let mut tries = 0usize;
    while tries < params.budget && report.checks < params.budget {
        let Some(x) = sample_in_f(sys, good, &mut rng, &mut tries, params.budget) else {
            break;
        };
        let Some(xp) = partner_point(sys, good, lemma, &x, n, &mut rng, &mut tries, params.budget)?
        else {
            continue;
        };
        report.admissible_pairs += 1;
        match lemma {
            Lemma::ShortBlocks => short_blocks(sys, good, &x, &xp, params, &mut rng, &mut report)?,
            Lemma::UniformDistance => {
                uniform_distance(sys, &x, &xp, params, &mut rng, &mut report)?
            }
            Lemma::FarOrbits => far_orbits(sys, &x, &xp, params, &mut rng, &mut report)?,
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn partner_point<R: Rng>(
    sys: &RankOne,
    good: &GoodSets,
    lemma: Lemma,
    x: &OrbitState,
    n: usize,
    rng: &mut R,
    tries: &mut usize,
    budget: usize,
) -> Result<Option<OrbitState>> {
    match lemma {
        Lemma::ShortBlocks => {
            // same columns below n, a different column at n: distance exactly 1/h_n
            let mg = good.margins(n);
            let Some(hi) = mg.column_hi.clone() else {
                return Ok(None);
            };
            if hi <= mg.column {
                return Ok(None);
            }
            let mut c = uniform(rng, &mg.column, &(&hi - 1u32));
            if &c >= x.address.column(n) {
                c += 1u32;
            }
            let xp = sys.with_column(x, n, c)?;
            Ok(good.in_f_all(sys, &xp).then_some(xp))
        }
        Lemma::UniformDistance => {
            // same columns below n, fresh columns from n on: a shared level of T_n
            let mut xp = x.clone();
            for k in n..=sys.max_stage() {
                xp = sys.with_column(&xp, k, uniform(rng, &BigUint::one(), sys.spec().cut(k)))?;
            }
            Ok(good.in_f_all(sys, &xp).then_some(xp))
        }
        Lemma::FarOrbits => {
            while *tries < budget {
                *tries += 1;
                let xp = sys.sample(rng, SamplingMode::Levels);
                if good.in_d_all(sys, x, &xp) {
                    return Ok(Some(xp));
                }
            }
            Ok(None)
        }
    }
}

fn short_blocks<R: Rng>(
    sys: &RankOne,
    good: &GoodSets,
    x: &OrbitState,
    xp: &OrbitState,
    params: &ProbeParams,
    rng: &mut R,
    report: &mut ProbeReport,
) -> Result<()> {
    let n = params.n;
    let h = sys.height(n);
    let hi = floor_pow(h, Exponent::one() + params.xi * 2);
    for _ in 0..SHIFTS_PER_PAIR {
        if report.checks >= params.budget {
            break;
        }
        let r = uniform(rng, h, &hi);
        let (Ok(a), Ok(b)) = (sys.advance(x, &r), sys.advance(xp, &r)) else {
            continue;
        };
        if !(good.in_f_all(sys, &a) && good.in_f_all(sys, &b)) {
            continue;
        }
        report.checks += 1;
        if same_level(sys, &a, &b, n)? {
            report.violations.push(witness(sys, x, xp, &r, &r));
        }
    }
    Ok(())
}

/// Levels of `T_n` along `0..=len` steps, `None` past an escape.
fn level_track(
    sys: &RankOne,
    start: &OrbitState,
    n: usize,
    len: usize,
) -> Result<Vec<Option<TowerLevel>>> {
    let mut st = start.clone();
    let mut out = Vec::with_capacity(len + 1);
    out.push(Some(sys.level_in_tower(&st, n)?));
    for _ in 0..len {
        if sys.step(&mut st).is_err() {
            out.resize(len + 1, None);
            return Ok(out);
        }
        out.push(Some(sys.level_in_tower(&st, n)?));
    }
    Ok(out)
}

const EXHAUSTIVE_SHIFTS: usize = 1 << 12;

/// Checks `(i, j)` pairs from `[0, top]^2` with `i != j`, plus `G^i x in T_gate`
/// when a gate stage is given, for "not in one level of `T_tower`".
#[allow(clippy::too_many_arguments)]
fn shift_pairs<R: Rng>(
    sys: &RankOne,
    x: &OrbitState,
    xp: &OrbitState,
    top: &BigUint,
    tower: usize,
    gate: Option<usize>,
    distinct: bool,
    budget: usize,
    rng: &mut R,
    report: &mut ProbeReport,
) -> Result<()> {
    let same = |a: &Option<TowerLevel>, b: &Option<TowerLevel>| matches!((a, b), (Some(TowerLevel::Level(p)), Some(TowerLevel::Level(q))) if p == q);
    if let Some(len) = top.to_usize().filter(|&l| {
        l < EXHAUSTIVE_SHIFTS && (l + 1) * (l + 1) <= budget.saturating_sub(report.checks)
    }) {
        let tx = level_track(sys, x, tower, len)?;
        let txp = level_track(sys, xp, tower, len)?;
        let gx = match gate {
            Some(g) => level_track(sys, x, g, len)?,
            None => vec![Some(TowerLevel::Outside); len + 1],
        };
        for i in 0..=len {
            if tx[i].is_none() || (gate.is_some() && !matches!(gx[i], Some(TowerLevel::Level(_)))) {
                continue;
            }
            for (j, lj) in txp.iter().enumerate() {
                if (distinct && i == j) || lj.is_none() {
                    continue;
                }
                report.checks += 1;
                if same(&tx[i], lj) {
                    report
                        .violations
                        .push(witness(sys, x, xp, &i.into(), &j.into()));
                }
            }
        }
        return Ok(());
    }
    for _ in 0..SHIFTS_PER_PAIR {
        if report.checks >= budget {
            break;
        }
        let i = uniform(rng, &BigUint::zero(), top);
        let j = uniform(rng, &BigUint::zero(), top);
        if distinct && i == j {
            continue;
        }
        let (Ok(a), Ok(b)) = (sys.advance(x, &i), sys.advance(xp, &j)) else {
            continue;
        };
        if let Some(g) = gate {
            if !matches!(sys.level_in_tower(&a, g)?, TowerLevel::Level(_)) {
                continue;
            }
        }
        report.checks += 1;
        if same_level(sys, &a, &b, tower)? {
            report.violations.push(witness(sys, x, xp, &i, &j));
        }
    }
    Ok(())
}

fn uniform_distance<R: Rng>(
    sys: &RankOne,
    x: &OrbitState,
    xp: &OrbitState,
    params: &ProbeParams,
    rng: &mut R,
    report: &mut ProbeReport,
) -> Result<()> {
    let n = params.n;
    let top = sys.height(n) / BigUint::from(n * n * n);
    shift_pairs(sys, x, xp, &top, n, None, true, params.budget, rng, report)
}

fn far_orbits<R: Rng>(
    sys: &RankOne,
    x: &OrbitState,
    xp: &OrbitState,
    params: &ProbeParams,
    rng: &mut R,
    report: &mut ProbeReport,
) -> Result<()> {
    let n = params.n;
    let top = sys.height(n + 1) / BigUint::from((n + 1) * (n + 1));
    shift_pairs(
        sys,
        x,
        xp,
        &top,
        n + 1,
        Some(n),
        false,
        params.budget,
        rng,
        report,
    )
}
