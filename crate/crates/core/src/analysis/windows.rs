//! Window sets `I(M,w)`, `J(M,w)` of an index matching and the covering argument
//! that bounds the size of matchings whose windows stay thin.

use std::cmp::Ordering;
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{cmp_products, floor_pow, Exponent};
use crate::fbar::Matching;

/// `K`, `xi` and the word length `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowParams {
    pub k: u64,
    pub xi: Exponent,
    pub n: u64,
}

impl WindowParams {
    pub fn new(k: u64, xi: Exponent, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("K must be at least 1"));
        }
        if xi <= Exponent::from(0) || xi >= Exponent::one() {
            return Err(Error::domain(format!("xi = {xi} is not in (0, 1)")));
        }
        Ok(WindowParams { k, xi, n })
    }

    /// `floor(K^(1+xi))`, the integer reach of a window.
    pub fn reach(&self) -> u64 {
        let r = floor_pow(&BigUint::from(self.k), Exponent::one() + self.xi);
        u64::try_from(r).unwrap_or(u64::MAX)
    }

    /// `8 K^(1+xi) <= N`.
    pub fn applicable(&self) -> bool {
        let (u, v) = (*self.xi.numer(), *self.xi.denom());
        let k = BigUint::from(self.k);
        let eight = BigUint::from(8u32);
        let n = BigUint::from(self.n);
        cmp_products(&[(&k, u + v), (&eight, v)], &[(&n, v)]) != Ordering::Greater
    }

    /// `r < 4N / K^xi`, i.e. `r^v K^u < (4N)^v`.
    pub fn conclusion_holds(&self, r: usize) -> bool {
        let (u, v) = (*self.xi.numer(), *self.xi.denom());
        let r = BigUint::from(r);
        let k = BigUint::from(self.k);
        let n4 = BigUint::from(self.n) * 4u32;
        cmp_products(&[(&r, v), (&k, u)], &[(&n4, v)]) == Ordering::Less
    }

    /// `v/2 <= N / K^(1+xi)`, i.e. `v^d K^(d+u) <= (2N)^d` with `xi = u/d`.
    pub fn count_link_holds(&self, v: usize) -> bool {
        let (u, d) = (*self.xi.numer(), *self.xi.denom());
        let v = BigUint::from(v);
        let k = BigUint::from(self.k);
        let n2 = BigUint::from(self.n) * 2u32;
        cmp_products(&[(&v, d), (&k, d + u)], &[(&n2, d)]) != Ordering::Greater
    }
}

/// `I(M,w)` as a range of 0-based pair indices. It always starts at `w`,
/// because the first coordinates increase.
pub fn window_i(theta: &Matching, reach: u64, w: usize) -> Range<usize> {
    window(&theta.pairs, reach, w, |p| p.0)
}

pub fn window_j(theta: &Matching, reach: u64, w: usize) -> Range<usize> {
    window(&theta.pairs, reach, w, |p| p.1)
}

fn window(
    pairs: &[(usize, usize)],
    reach: u64,
    w: usize,
    coord: impl Fn(&(usize, usize)) -> usize,
) -> Range<usize> {
    let top = (coord(&pairs[w]) as u64).saturating_add(reach);
    let end = w + pairs[w..].partition_point(|p| coord(p) as u64 <= top);
    w..end
}

/// Both window families for every index, computed with two pointers.
pub fn window_sets(theta: &Matching, reach: u64) -> Vec<(Range<usize>, Range<usize>)> {
    let r = theta.len();
    let ends = |coords: Vec<usize>| {
        let mut out = Vec::with_capacity(r);
        let mut e = 0;
        for w in 0..r {
            e = e.max(w);
            let top = (coords[w] as u64).saturating_add(reach);
            while e < r && coords[e] as u64 <= top {
                e += 1;
            }
            out.push(e);
        }
        out
    };
    let ei = ends(theta.left().collect());
    let ej = ends(theta.right().collect());
    (0..r).map(|w| (w..ei[w], w..ej[w])).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CombReport {
    pub r: usize,
    pub reach: u64,
    /// `8 K^(1+xi) <= N`
    pub applicable: bool,
    /// Indices `s` (0-based) with `min(|I|, |J|) > 2K`.
    pub witnesses: Vec<usize>,
    /// `r < 4N/K^xi`, only evaluated when applicable and the hypothesis holds.
    pub conclusion: Option<bool>,
}

impl CombReport {
    pub fn hypothesis(&self) -> bool {
        self.applicable && self.witnesses.is_empty()
    }
}

pub fn comb_lemma_check(theta: &Matching, params: &WindowParams) -> CombReport {
    let reach = params.reach();
    let applicable = params.applicable();
    let cap = 2 * params.k as usize;
    let witnesses: Vec<usize> = window_sets(theta, reach)
        .into_iter()
        .enumerate()
        .filter(|(_, (i, j))| i.len().min(j.len()) > cap)
        .map(|(s, _)| s)
        .collect();
    let conclusion =
        (applicable && witnesses.is_empty()).then(|| params.conclusion_holds(theta.len()));
    CombReport {
        r: theta.len(),
        reach,
        applicable,
        witnesses,
        conclusion,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    I,
    J,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverBlock {
    pub pivot: usize,
    pub side: Side,
    pub start: usize,
    pub end: usize,
}

impl CoverBlock {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverTrace {
    pub blocks: Vec<CoverBlock>,
    pub r: usize,
    pub total: usize,
    /// `r <= sum |B_l|`
    pub covers: bool,
    /// `|B_l| <= 2K` for every block
    pub blocks_small: bool,
    /// `v/2 <= N / K^(1+xi)`
    pub count_bound: bool,
}

impl CoverTrace {
    pub fn v(&self) -> usize {
        self.blocks.len()
    }

    pub fn all_links(&self) -> bool {
        self.covers && self.blocks_small && self.count_bound
    }
}

/// Blocks `B_1..B_v`: each pivot is the least uncovered index and its block
/// is the smaller of `I` and `J` there, `J` on ties.
pub fn greedy_cover(theta: &Matching, params: &WindowParams) -> Result<CoverTrace> {
    let report = comb_lemma_check(theta, params);
    if !report.hypothesis() {
        return Err(Error::Hypothesis(if report.applicable {
            format!("window bound fails at {} indices", report.witnesses.len())
        } else {
            "8 K^(1+xi) > N".to_string()
        }));
    }
    let reach = params.reach();
    let sets = window_sets(theta, reach);
    let mut blocks = Vec::new();
    let mut covered_to = 0;
    while covered_to < theta.len() {
        let s = covered_to;
        let (i, j) = &sets[s];
        let (side, range) = if i.len() >= j.len() {
            (Side::J, j)
        } else {
            (Side::I, i)
        };
        blocks.push(CoverBlock {
            pivot: s,
            side,
            start: range.start,
            end: range.end,
        });
        covered_to = covered_to.max(range.end);
    }
    let total: usize = blocks.iter().map(CoverBlock::len).sum();
    let cap = 2 * params.k as usize;
    Ok(CoverTrace {
        covers: total >= theta.len(),
        blocks_small: blocks.iter().all(|b| b.len() <= cap),
        count_bound: params.count_link_holds(blocks.len()),
        r: theta.len(),
        total,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(n: usize) -> Matching {
        Matching::new((0..n).map(|s| (s, s)).collect())
    }

    #[test]
    fn consecutive_window() {
        let m = diag(20);
        assert_eq!(window_i(&m, 5, 0), 0..6);
        assert_eq!(window_j(&m, 5, 17), 17..20);
        let single = Matching::new(vec![(4, 9)]);
        assert_eq!(window_sets(&single, 100), vec![(0..1, 0..1)]);
    }

    #[test]
    fn reach_is_floor_of_power() {
        let p = WindowParams::new(16, Exponent::new(1, 2), 1000).unwrap();
        assert_eq!(p.reach(), 64);
        assert!(p.applicable());
        assert!(!WindowParams::new(16, Exponent::new(1, 2), 511)
            .unwrap()
            .applicable());
        assert!(WindowParams::new(16, Exponent::new(1, 2), 512)
            .unwrap()
            .applicable());
    }

    #[test]
    fn identity_matching_fails_hypothesis() {
        let p = WindowParams::new(16, Exponent::new(1, 2), 2000).unwrap();
        let r = comb_lemma_check(&diag(2000), &p);
        assert!(!r.witnesses.is_empty());
        assert_eq!(r.conclusion, None);
        assert!(greedy_cover(&diag(2000), &p).is_err());
    }

    #[test]
    fn empty_matching_is_trivial() {
        let p = WindowParams::new(16, Exponent::new(1, 2), 2000).unwrap();
        let r = comb_lemma_check(&Matching::default(), &p);
        assert_eq!(r.conclusion, Some(true));
        assert_eq!(greedy_cover(&Matching::default(), &p).unwrap().v(), 0);
    }

    #[test]
    fn two_far_clusters_need_two_blocks() {
        let p = WindowParams::new(16, Exponent::new(1, 2), 2000).unwrap();
        let mut pairs: Vec<(usize, usize)> = (0..10).map(|s| (s, 2 * s)).collect();
        pairs.extend((0..10).map(|s| (500 + s, 700 + s)));
        let t = greedy_cover(&Matching::new(pairs), &p).unwrap();
        assert_eq!(t.v(), 2);
        assert!(t.all_links());
        assert_eq!((t.blocks[0].start, t.blocks[0].end), (0, 10));
        assert_eq!(t.blocks[0].side, Side::J);
    }
}
