//! Sorting matched indices of a product matching by horizontal-distance scale.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::analysis::goodsets::GoodSets;
use crate::error::{Error, Result};
use crate::exact::ceil_log2;
use crate::fbar::Matching;
use crate::orbit::{HorizontalDistance, OrbitState, RankOne, TowerLevel};

/// One factor of the product: the system, its good sets, and the two start points.
pub struct Factor<'a> {
    pub sys: &'a RankOne,
    pub good: &'a GoodSets,
    pub start: &'a OrbitState,
    pub start_prime: &'a OrbitState,
}

/// Where one matched index `s` lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "kebab-case")]
pub enum AtkClass {
    /// Some iterate misses the good product set.
    NotGood,
    /// In `A^k` for this `k`.
    Scale(u64),
    /// Both distances sit below the truncation, or the larger one cannot be told apart.
    Undecidable,
    /// No shared level at all, so the maximal distance is not below `1`.
    Unscaled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtkHistogram {
    pub n0: usize,
    pub r: usize,
    /// `|A^k|` for every nonempty `k`.
    pub counts: BTreeMap<u64, usize>,
    /// Size of the good-index set `H`.
    pub good: usize,
    pub undecidable: usize,
    pub unscaled: usize,
}

impl AtkHistogram {
    pub fn from_classes(n0: usize, classes: &[AtkClass]) -> Self {
        let mut h = AtkHistogram {
            n0,
            r: classes.len(),
            counts: BTreeMap::new(),
            good: 0,
            undecidable: 0,
            unscaled: 0,
        };
        for c in classes {
            match c {
                AtkClass::NotGood => continue,
                AtkClass::Scale(k) => *h.counts.entry(*k).or_default() += 1,
                AtkClass::Undecidable => h.undecidable += 1,
                AtkClass::Unscaled => h.unscaled += 1,
            }
            h.good += 1;
        }
        h
    }

    pub fn count(&self, k: u64) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Every `k >= 1` with `|A^k| > N / k^2`, i.e. `|A^k| k^2 > N`.
    pub fn over_bound(&self, n: u64) -> Vec<u64> {
        self.counts
            .iter()
            .filter(|(&k, &c)| k > 0 && (c as u128) * (k as u128) * (k as u128) > n as u128)
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Distance as `1/H` with a flag for the truncation sentinel, where the true
/// value is only known to be at most `1/H`.
fn scale(d: Option<HorizontalDistance>) -> Option<(BigUint, bool)> {
    d.map(|d| {
        let exact = d.is_exact();
        let h = match d {
            HorizontalDistance::Exact { height, .. }
            | HorizontalDistance::BelowResolution { height, .. } => height,
        };
        (h, exact)
    })
}

/// Class of one index from the four level vectors and good flags.
pub fn classify_index(
    t: &RankOne,
    s: &RankOne,
    lt: (&[TowerLevel], &[TowerLevel]),
    ls: (&[TowerLevel], &[TowerLevel]),
    good: bool,
) -> AtkClass {
    if !good {
        return AtkClass::NotGood;
    }
    let (Some((h1, e1)), Some((h2, e2))) = (
        scale(t.distance_from_levels(lt.0, lt.1)),
        scale(s.distance_from_levels(ls.0, ls.1)),
    ) else {
        return AtkClass::Unscaled;
    };
    // max(d1, d2) = 1 / min over the exact sides, when that side dominates
    let hmin = match (e1, e2) {
        (true, true) => h1.min(h2),
        (true, false) if h1 <= h2 => h1,
        (false, true) if h2 <= h1 => h2,
        _ => return AtkClass::Undecidable,
    };
    if hmin < BigUint::from(2u32) {
        return AtkClass::Unscaled;
    }
    // 2^-(k+1) <= 1/H < 2^-k  <=>  2^k < H <= 2^(k+1)
    AtkClass::Scale(ceil_log2(&hmin) - 1)
}

struct Cursor<'a> {
    sys: &'a RankOne,
    good: &'a GoodSets,
    state: OrbitState,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(sys: &'a RankOne, good: &'a GoodSets, start: &OrbitState) -> Self {
        Cursor {
            sys,
            good,
            state: start.clone(),
            pos: 0,
        }
    }

    fn seek(&mut self, i: usize) -> Result<()> {
        if i < self.pos {
            return Err(Error::domain("matching indices must increase"));
        }
        while self.pos < i {
            self.sys.step(&mut self.state)?;
            self.pos += 1;
        }
        Ok(())
    }

    /// Levels plus membership in `F` and `T_n0`.
    fn probe(&self, n0: usize) -> (Vec<TowerLevel>, bool) {
        let levels = self.sys.levels(&self.state);
        let good = matches!(levels[n0 - 1], TowerLevel::Level(_))
            && self.good.in_f_all_levels(self.sys, &self.state, &levels);
        (levels, good)
    }
}

/// Class of every matched index of `theta` between the product orbits of
/// `(x, y)` and `(x', y')`, with `t` carrying `x, x'` and `s` carrying `y, y'`.
pub fn classify_matching(
    theta: &Matching,
    t: &Factor,
    s: &Factor,
    n0: usize,
) -> Result<Vec<AtkClass>> {
    if n0 == 0 || n0 > t.sys.top_stage() || n0 > s.sys.top_stage() {
        return Err(Error::StageOutOfRange {
            stage: n0,
            max: t.sys.top_stage().min(s.sys.top_stage()),
        });
    }
    let mut tx = Cursor::new(t.sys, t.good, t.start);
    let mut txp = Cursor::new(t.sys, t.good, t.start_prime);
    let mut sy = Cursor::new(s.sys, s.good, s.start);
    let mut syp = Cursor::new(s.sys, s.good, s.start_prime);
    let mut out = Vec::with_capacity(theta.len());
    for &(i, j) in &theta.pairs {
        tx.seek(i)?;
        sy.seek(i)?;
        txp.seek(j)?;
        syp.seek(j)?;
        let (la, ga) = tx.probe(n0);
        let (lb, gb) = txp.probe(n0);
        let (lc, gc) = sy.probe(n0);
        let (ld, gd) = syp.probe(n0);
        out.push(classify_index(
            t.sys,
            s.sys,
            (&la, &lb),
            (&lc, &ld),
            ga && gb && gc && gd,
        ));
    }
    Ok(out)
}

/// `A^k_theta` as 0-based pair indices.
pub fn a_theta_k(
    theta: &Matching,
    t: &Factor,
    s: &Factor,
    k: u64,
    n0: usize,
) -> Result<Vec<usize>> {
    Ok(classify_matching(theta, t, s, n0)?
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == AtkClass::Scale(k))
        .map(|(i, _)| i)
        .collect())
}

pub fn atk_histogram(theta: &Matching, t: &Factor, s: &Factor, n0: usize) -> Result<AtkHistogram> {
    Ok(AtkHistogram::from_classes(
        n0,
        &classify_matching(theta, t, s, n0)?,
    ))
}

/// Whether the product iterate `i < len` of the unprimed start points lies in
/// `(F^T cap T_n0) x (F^S cap T_n0)`.
pub fn good_flags(t: &Factor, s: &Factor, n0: usize, len: usize) -> Result<Vec<bool>> {
    let mut a = Cursor::new(t.sys, t.good, t.start);
    let mut b = Cursor::new(s.sys, s.good, s.start);
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        a.seek(i)?;
        b.seek(i)?;
        out.push(a.probe(n0).1 && b.probe(n0).1);
    }
    Ok(out)
}

pub fn good_hits(t: &Factor, s: &Factor, n0: usize, len: usize) -> Result<usize> {
    Ok(good_flags(t, s, n0, len)?
        .into_iter()
        .filter(|&g| g)
        .count())
}
