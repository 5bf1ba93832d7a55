//! The f-bar distance `1 - r/k` between equal-length words, where `r` is the
//! size of a largest order-preserving matching of equal symbols (an LCS).

use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::coding::SymbolWord;
use crate::error::{Error, Result};

/// Pairs `(i_s, j_s)` with both coordinates strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Matching { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.pairs
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
    }

    pub fn left(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn right(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FbarResult {
    pub k: usize,
    pub r: usize,
    pub matching: Option<Matching>,
}

impl FbarResult {
    pub fn value(&self) -> Ratio<u64> {
        Ratio::new((self.k - self.r) as u64, self.k as u64)
    }
}

/// True iff `m` is strictly increasing in both coordinates, in range, and pairs equal symbols.
pub fn matching_valid(a: &[u32], b: &[u32], m: &Matching) -> bool {
    m.is_monotone()
        && m.pairs
            .iter()
            .all(|&(i, j)| i < a.len() && j < b.len() && a[i] == b[j])
}

fn check_pair(a: &[u32], b: &[u32]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "words of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("empty words"));
    }
    Ok(a.len())
}

/// Last row of the LCS table: entry `j` is `LCS(a, b[..j])`.
pub fn lcs_row(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut row = vec![0u32; b.len() + 1];
    for &x in a {
        let mut diag = 0u32;
        for j in 1..=b.len() {
            let up = row[j];
            row[j] = if x == b[j - 1] {
                diag + 1
            } else {
                up.max(row[j - 1])
            };
            diag = up;
        }
    }
    row
}

/// Quadratic reference LCS length.
pub fn lcs_dp(a: &[u32], b: &[u32]) -> usize {
    *lcs_row(a, b).last().unwrap() as usize
}

fn lcs_table_matching(a: &[u32], b: &[u32], ia: usize, ib: usize, out: &mut Vec<(usize, usize)>) {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut t = vec![0u32; (n + 1) * w];
    for i in 1..=n {
        for j in 1..=m {
            t[i * w + j] = if a[i - 1] == b[j - 1] {
                t[(i - 1) * w + j - 1] + 1
            } else {
                t[(i - 1) * w + j].max(t[i * w + j - 1])
            };
        }
    }
    let mut pairs = Vec::with_capacity(t[n * w + m] as usize);
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        if a[i - 1] == b[j - 1] && t[i * w + j] == t[(i - 1) * w + j - 1] + 1 {
            pairs.push((ia + i - 1, ib + j - 1));
            i -= 1;
            j -= 1;
        } else if t[(i - 1) * w + j] >= t[i * w + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    out.extend(pairs.into_iter().rev());
}

const SMALL_TABLE: usize = 1 << 14;

fn hirschberg(a: &[u32], b: &[u32], ia: usize, ib: usize, out: &mut Vec<(usize, usize)>) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.len() * b.len() <= SMALL_TABLE || a.len() == 1 {
        lcs_table_matching(a, b, ia, ib, out);
        return;
    }
    let mid = a.len() / 2;
    let fwd = lcs_row(&a[..mid], b);
    let ra: Vec<u32> = a[mid..].iter().rev().copied().collect();
    let rb: Vec<u32> = b.iter().rev().copied().collect();
    let bwd = lcs_row(&ra, &rb);
    let m = b.len();
    let split = (0..=m)
        .max_by_key(|&j| (fwd[j] + bwd[m - j], std::cmp::Reverse(j)))
        .unwrap();
    hirschberg(&a[..mid], &b[..split], ia, ib, out);
    hirschberg(&a[mid..], &b[split..], ia + mid, ib + split, out);
}

/// One largest matching in linear space.
pub fn lcs_matching(a: &[u32], b: &[u32]) -> Matching {
    let mut pairs = Vec::new();
    hirschberg(a, b, 0, 0, &mut pairs);
    Matching { pairs }
}

/// Reference kernel; `with_matching` adds one optimal matching.
pub fn fbar_exact_symbols(a: &[u32], b: &[u32], with_matching: bool) -> Result<FbarResult> {
    let k = check_pair(a, b)?;
    if with_matching {
        let m = lcs_matching(a, b);
        Ok(FbarResult {
            k,
            r: m.len(),
            matching: Some(m),
        })
    } else {
        Ok(FbarResult {
            k,
            r: lcs_dp(a, b),
            matching: None,
        })
    }
}

pub fn fbar_exact(a: &SymbolWord, b: &SymbolWord) -> Result<FbarResult> {
    fbar_exact_symbols(&a.symbols, &b.symbols, true)
}

/// Bit-parallel LCS length, `O(k^2 / 64)` word operations.
pub fn lcs_bitparallel(a: &[u32], b: &[u32]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    // columns are positions of b; symbols of a that never occur in b match nothing
    let mut ids: HashMap<u32, usize> = HashMap::new();
    let mut occurrences: Vec<Vec<usize>> = Vec::new();
    for (j, &s) in b.iter().enumerate() {
        let id = *ids.entry(s).or_insert_with(|| {
            occurrences.push(Vec::new());
            occurrences.len() - 1
        });
        occurrences[id].push(j);
    }
    let blocks = b.len().div_ceil(64);
    let dense = occurrences.len().saturating_mul(blocks) <= 1 << 22;
    let mut peq: Vec<u64> = Vec::new();
    if dense {
        peq = vec![0u64; occurrences.len() * blocks];
        for (id, occ) in occurrences.iter().enumerate() {
            for &j in occ {
                peq[id * blocks + j / 64] |= 1u64 << (j % 64);
            }
        }
    }
    let mut v = vec![u64::MAX; blocks];
    let mut scratch = vec![0u64; blocks];
    for &x in a {
        let Some(&id) = ids.get(&x) else { continue };
        let mask: &[u64] = if dense {
            &peq[id * blocks..(id + 1) * blocks]
        } else {
            scratch.iter_mut().for_each(|w| *w = 0);
            for &j in &occurrences[id] {
                scratch[j / 64] |= 1u64 << (j % 64);
            }
            &scratch
        };
        let mut carry = 0u64;
        for (vw, &mw) in v.iter_mut().zip(mask) {
            let u = *vw & mw;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = (c1 | c2) as u64;
            *vw = s2 | (*vw & !mw);
        }
    }
    // bits past the end of b stay set, so only real columns count
    v.iter().map(|w| w.count_zeros() as usize).sum()
}

pub fn fbar_fast_symbols(a: &[u32], b: &[u32]) -> Result<FbarResult> {
    let k = check_pair(a, b)?;
    Ok(FbarResult {
        k,
        r: lcs_bitparallel(a, b),
        matching: None,
    })
}

pub fn fbar_fast(a: &SymbolWord, b: &SymbolWord) -> Result<FbarResult> {
    fbar_fast_symbols(&a.symbols, &b.symbols)
}

/// LCS restricted to cells with `|i - j| <= band`.
pub fn lcs_banded(a: &[u32], b: &[u32], band: usize) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return 0;
    }
    let width = 2 * band + 1;
    let mut prev = vec![0u32; width + 2];
    let mut cur = vec![0u32; width + 2];
    // column j of row i lives at slot j + band + 1 - i; slots 0 and width + 1 stay zero
    for i in 1..=n {
        cur.iter_mut().for_each(|c| *c = 0);
        let jlo = i.saturating_sub(band).max(1);
        let jhi = (i + band).min(m);
        for j in jlo..=jhi {
            let slot = j + band + 1 - i;
            let up = prev[slot + 1];
            let left = cur[slot - 1];
            let diag = prev[slot];
            cur[slot] = if a[i - 1] == b[j - 1] {
                diag + 1
            } else {
                up.max(left)
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    if n.abs_diff(m) > band {
        return 0;
    }
    prev[m + band + 1 - n] as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FbarBounds {
    pub lower: Ratio<u64>,
    pub upper: Ratio<u64>,
}

/// Sandwich on f-bar: the banded matching gives the upper end, the symbol
/// histograms the lower end. Both collapse to the exact value once
/// `band >= k - 1`.
pub fn fbar_bounds(a: &[u32], b: &[u32], band: i64) -> Result<FbarBounds> {
    let k = check_pair(a, b)?;
    if band <= 0 {
        return Err(Error::domain(format!("band must be positive, got {band}")));
    }
    let band = band as usize;
    let r = lcs_banded(a, b, band.min(k));
    let upper = Ratio::new((k - r) as u64, k as u64);
    if band + 1 >= k {
        return Ok(FbarBounds {
            lower: upper,
            upper,
        });
    }
    let mut hist: HashMap<u32, i64> = HashMap::new();
    for &x in a {
        *hist.entry(x).or_default() += 1;
    }
    for &x in b {
        *hist.entry(x).or_default() -= 1;
    }
    let l1: u64 = hist.values().map(|v| v.unsigned_abs()).sum();
    Ok(FbarBounds {
        lower: Ratio::new(l1, 2 * k as u64),
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let r = fbar_exact_symbols(&[0, 1, 0, 1], &[1, 1, 0, 0], true).unwrap();
        assert_eq!(r.r, 2);
        assert_eq!(r.value(), Ratio::new(1, 2));
        assert!(matching_valid(
            &[0, 1, 0, 1],
            &[1, 1, 0, 0],
            r.matching.as_ref().unwrap()
        ));
        assert_eq!(
            fbar_exact_symbols(&[0, 0, 0], &[1, 1, 1], false)
                .unwrap()
                .value(),
            Ratio::from(1)
        );
        assert!(fbar_exact_symbols(&[], &[], false).is_err());
        assert!(fbar_exact_symbols(&[1], &[1, 2], false).is_err());
    }

    #[test]
    fn bitparallel_crosses_block_boundaries() {
        let a: Vec<u32> = (0..300).map(|i| (i * 7 % 5) as u32).collect();
        let b: Vec<u32> = (0..300).map(|i| (i * 3 % 4) as u32).collect();
        assert_eq!(lcs_bitparallel(&a, &b), lcs_dp(&a, &b));
        assert_eq!(lcs_bitparallel(&a, &a), 300);
    }

    #[test]
    fn banded_matches_full_for_wide_band() {
        let a: Vec<u32> = (0..90).map(|i| (i * i % 7) as u32).collect();
        let b: Vec<u32> = (0..90).map(|i| (i * 5 % 3) as u32).collect();
        assert_eq!(lcs_banded(&a, &b, 90), lcs_dp(&a, &b));
        assert!(lcs_banded(&a, &b, 3) <= lcs_dp(&a, &b));
    }

    #[test]
    fn hirschberg_is_optimal_and_valid() {
        let a: Vec<u32> = (0..400).map(|i| (i * 13 % 11 % 3) as u32).collect();
        let b: Vec<u32> = (0..400).map(|i| (i * 17 % 7 % 3) as u32).collect();
        let m = lcs_matching(&a, &b);
        assert_eq!(m.len(), lcs_dp(&a, &b));
        assert!(matching_valid(&a, &b, &m));
    }

    #[test]
    fn bounds_reject_nonpositive_band() {
        assert!(fbar_bounds(&[1, 2], &[2, 1], 0).is_err());
        let b = fbar_bounds(&[0, 1], &[1, 0], 1).unwrap();
        assert_eq!(b.lower, b.upper);
        assert_eq!(b.upper, Ratio::new(1, 2));
    }
}
