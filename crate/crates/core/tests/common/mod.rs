//! Array-materialized stacking used as an oracle for the address-based orbit.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rankone::orbit::TowerLevel;
use rankone::spec::RankOneSpec;

/// Every level of `T_(M+1)`, bottom to top. `level[n-1][t]` is the level of
/// position `t` in `T_n` and `column[n-1][t]` its column of `T_n` inside `T_(n+1)`.
pub struct Stack {
    pub heights: Vec<usize>,
    pub level: Vec<Vec<Option<usize>>>,
    pub column: Vec<Vec<Option<usize>>>,
}

impl Stack {
    pub fn build(spec: &RankOneSpec) -> Stack {
        let m = spec.max_stage();
        // start with T_1: one level
        let mut level: Vec<Vec<Option<usize>>> = vec![vec![Some(0)]];
        let mut column: Vec<Vec<Option<usize>>> = Vec::new();
        let mut heights = vec![1usize];
        for n in 1..=m {
            let p = spec.cut(n).to_usize().unwrap();
            let h = *heights.last().unwrap();
            let mut new_level: Vec<Vec<Option<usize>>> = vec![Vec::new(); n];
            let mut new_column: Vec<Vec<Option<usize>>> = vec![Vec::new(); n];
            for c in 1..=p {
                for t in 0..h {
                    for k in 0..n {
                        new_level[k].push(level[k][t]);
                    }
                    for k in 0..n - 1 {
                        new_column[k].push(column[k][t]);
                    }
                    new_column[n - 1].push(Some(c));
                }
                let a = spec.spacer(n, &BigUint::from(c)).to_usize().unwrap();
                for _ in 0..a {
                    for k in 0..n {
                        new_level[k].push(None);
                        new_column[k].push(None);
                    }
                }
            }
            let top = new_level[0].len();
            new_level.push((0..top).map(Some).collect());
            level = new_level;
            column = new_column;
            heights.push(top);
        }
        Stack {
            heights,
            level,
            column,
        }
    }

    pub fn top(&self) -> usize {
        *self.heights.last().unwrap()
    }

    pub fn tower_level(&self, n: usize, t: usize) -> TowerLevel {
        match self.level[n - 1][t] {
            Some(l) => TowerLevel::Level(l.into()),
            None => TowerLevel::Outside,
        }
    }

    pub fn levels(&self, t: usize) -> Vec<TowerLevel> {
        (1..=self.heights.len())
            .map(|n| self.tower_level(n, t))
            .collect()
    }

    /// Stage-`n` symbol, with `h_n` standing for a spacer.
    pub fn symbol(&self, n: usize, t: usize) -> u32 {
        self.level[n - 1][t].unwrap_or(self.heights[n - 1]) as u32
    }

    /// Last stage at which positions `a` and `b` share a level.
    pub fn last_shared(&self, a: usize, b: usize) -> Option<usize> {
        (1..=self.heights.len())
            .rev()
            .find(|&n| matches!((self.level[n - 1][a], self.level[n - 1][b]), (Some(x), Some(y)) if x == y))
    }
}

/// Length of the longest common subsequence by trying every subsequence of `a`.
pub fn lcs_brute(a: &[u32], b: &[u32]) -> usize {
    let k = a.len();
    let mut best = 0;
    for mask in 0u32..(1 << k) {
        let ones = mask.count_ones() as usize;
        if ones <= best {
            continue;
        }
        let mut it = b.iter();
        if (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .all(|i| it.any(|&c| c == a[i]))
        {
            best = ones;
        }
    }
    best
}

/// Small staircase-like specs, all cuts at most `max_cut`.
pub fn small_spec(cuts: &[u64], rule: u8, spacers: &[Vec<u64>]) -> RankOneSpec {
    use rankone::spec::SpacerRule;
    let cuts: Vec<BigUint> = cuts.iter().map(|&p| p.into()).collect();
    let rule = match rule {
        0 => SpacerRule::None,
        1 => SpacerRule::Staircase { zero_prefix: 0 },
        2 => SpacerRule::Staircase { zero_prefix: 1 },
        _ => SpacerRule::Explicit(
            cuts.iter()
                .zip(spacers)
                .map(|(p, s)| {
                    (0..p.to_usize().unwrap())
                        .map(|i| BigUint::from(s[i % s.len()]))
                        .collect()
                })
                .collect(),
        ),
    };
    RankOneSpec::new("oracle", cuts, rule).unwrap()
}

/// Index matchings made of clusters of at most `2K` pairs, separated by more
/// than `reach` in both coordinates, fitting in `[0, n)`.
pub fn clustered_matching<R: rand::Rng>(
    rng: &mut R,
    k: u64,
    reach: u64,
    n: u64,
) -> rankone::fbar::Matching {
    let mut pairs = Vec::new();
    let (mut i, mut j) = (rng.gen_range(0..=reach), rng.gen_range(0..=reach));
    'outer: loop {
        let size = rng.gen_range(1..=2 * k);
        for _ in 0..size {
            if i >= n || j >= n {
                break 'outer;
            }
            pairs.push((i as usize, j as usize));
            i += rng.gen_range(1..=3);
            j += rng.gen_range(1..=3);
        }
        let (li, lj) = *pairs.last().unwrap();
        i = li as u64 + reach + rng.gen_range(1..=reach.max(2));
        j = lj as u64 + reach + rng.gen_range(1..=reach.max(2));
    }
    rankone::fbar::Matching::new(pairs)
}

/// Class of index pair `(i, j)` read straight off the materialized stacks:
/// `x, x'` are positions in `t`, `y, y'` positions in `s`.
pub struct ProductOracle<'a> {
    pub t: &'a Stack,
    pub s: &'a Stack,
    pub good_t: &'a rankone::analysis::goodsets::GoodSets,
    pub good_s: &'a rankone::analysis::goodsets::GoodSets,
    pub n0: usize,
}

impl ProductOracle<'_> {
    fn good(
        stack: &Stack,
        good: &rankone::analysis::goodsets::GoodSets,
        n0: usize,
        t: usize,
    ) -> bool {
        if stack.level[n0 - 1][t].is_none() {
            return false;
        }
        (good.params().n1..=good.last()).all(|n| {
            let mg = good.margins(n);
            let (Some(l), Some(c), Some(c_hi)) = (
                stack.level[n - 1][t],
                stack.column.get(n - 1).and_then(|c| c[t]),
                &mg.column_hi,
            ) else {
                return false;
            };
            let (l, c) = (BigUint::from(l), BigUint::from(c));
            l >= mg.level && l <= mg.level_hi && c >= mg.column && &c <= c_hi
        })
    }

    /// `(height, exact)` of the horizontal distance, `None` when no level is shared.
    fn distance(stack: &Stack, a: usize, b: usize) -> Option<(usize, bool)> {
        let m = stack.last_shared(a, b)?;
        Some((stack.heights[m - 1], m < stack.heights.len()))
    }

    pub fn class(
        &self,
        x: usize,
        xp: usize,
        y: usize,
        yp: usize,
        i: usize,
        j: usize,
    ) -> rankone::analysis::atk::AtkClass {
        use rankone::analysis::atk::AtkClass;
        let (a, b, c, d) = (x + i, xp + j, y + i, yp + j);
        let good = Self::good(self.t, self.good_t, self.n0, a)
            && Self::good(self.t, self.good_t, self.n0, b)
            && Self::good(self.s, self.good_s, self.n0, c)
            && Self::good(self.s, self.good_s, self.n0, d);
        if !good {
            return AtkClass::NotGood;
        }
        let (Some((h1, e1)), Some((h2, e2))) =
            (Self::distance(self.t, a, b), Self::distance(self.s, c, d))
        else {
            return AtkClass::Unscaled;
        };
        // the larger distance is the one with the smaller height; an inexact
        // side is at most 1/h_top so it only loses when the other side is exact
        let h = match (e1, e2) {
            (true, true) => h1.min(h2),
            (true, false) if h1 <= h2 => h1,
            (false, true) if h2 <= h1 => h2,
            _ => return AtkClass::Undecidable,
        };
        if h < 2 {
            return AtkClass::Unscaled;
        }
        // 2^-(k+1) <= 1/h < 2^-k
        let mut k = 0u64;
        while !((1usize << k) < h && h <= (1usize << (k + 1))) {
            k += 1;
        }
        AtkClass::Scale(k)
    }
}

#[derive(Debug, Default)]
pub struct AtkCheck {
    pub rounds: usize,
    pub indices: usize,
    /// Indices whose library class differs from the materialized one.
    pub mismatches: usize,
    /// Nonempty `A^k` with `2k < n0`.
    pub floor_violations: usize,
    /// Runs where the scale buckets plus the unresolved classes miss `H`.
    pub partition_failures: usize,
    /// Nonempty buckets seen.
    pub populated: usize,
}

/// Compare `classify_matching`, `a_theta_k` and `good_flags` with the
/// materialized definition on a two-stage product with towers below `10^3`.
pub fn atk_rounds(rounds: usize, seed: u64) -> AtkCheck {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rankone::analysis::atk::{
        a_theta_k, atk_histogram, classify_matching, good_flags, AtkClass, Factor,
    };
    use rankone::analysis::goodsets::{GoodSetParams, GoodSets};
    use rankone::coding::code_product_orbit;
    use rankone::exact::Exponent;
    use rankone::fbar::{fbar_exact_symbols, Matching};
    use rankone::orbit::RankOne;

    let ts = RankOneSpec::staircase("t", &[10, 12]).unwrap();
    let ss = RankOneSpec::staircase("s", &[12, 10]).unwrap();
    let params = GoodSetParams {
        gamma: Exponent::new(1, 10),
        n1: 2,
        n3: 2,
        last: None,
    };
    let (st, sst) = (Stack::build(&ts), Stack::build(&ss));
    let (t, s) = (RankOne::new(ts), RankOne::new(ss));
    let (gt, gs) = (
        GoodSets::new(&t, params).unwrap(),
        GoodSets::new(&s, params).unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 250;
    let mut out = AtkCheck::default();
    for round in 0..rounds {
        let n0 = 2 + round % 2;
        let (x, mut xp) = (rng.gen_range(0..550), rng.gen_range(0..550));
        let (y, mut yp) = (rng.gen_range(0..650), rng.gen_range(0..650));
        if round % 4 < 2 {
            // partners on the same level of T_2, so the diagonal has shared levels
            let same = |stack: &Stack, p: usize, rng: &mut ChaCha8Rng, cap: usize| {
                let c: Vec<usize> = (0..cap)
                    .filter(|&q| {
                        stack.level[1][p].is_some() && stack.level[1][q] == stack.level[1][p]
                    })
                    .collect();
                if c.is_empty() {
                    p
                } else {
                    c[rng.gen_range(0..c.len())]
                }
            };
            xp = same(&st, x, &mut rng, 550);
            yp = same(&sst, y, &mut rng, 650);
        }
        let state = |sys: &RankOne, p: usize| sys.decode(&BigUint::from(p)).unwrap();
        let (sx, sxp, sy, syp) = (state(&t, x), state(&t, xp), state(&s, y), state(&s, yp));
        let ft = Factor {
            sys: &t,
            good: &gt,
            start: &sx,
            start_prime: &sxp,
        };
        let fs = Factor {
            sys: &s,
            good: &gs,
            start: &sy,
            start_prime: &syp,
        };
        let u = code_product_orbit(&t, &s, &sx, &sy, n0, len).unwrap();
        let v = code_product_orbit(&t, &s, &sxp, &syp, n0, len).unwrap();
        let optimal = fbar_exact_symbols(&u.symbols, &v.symbols, true)
            .unwrap()
            .matching
            .unwrap();
        let diagonal = Matching::new((0..len).map(|i| (i, i)).collect());
        let oracle = ProductOracle {
            t: &st,
            s: &sst,
            good_t: &gt,
            good_s: &gs,
            n0,
        };
        for theta in [optimal, diagonal] {
            out.rounds += 1;
            out.indices += theta.len();
            let classes = classify_matching(&theta, &ft, &fs, n0).unwrap();
            let expected: Vec<AtkClass> = theta
                .pairs
                .iter()
                .map(|&(i, j)| oracle.class(x, xp, y, yp, i, j))
                .collect();
            out.mismatches += classes
                .iter()
                .zip(&expected)
                .filter(|(a, b)| a != b)
                .count();
            let hist = atk_histogram(&theta, &ft, &fs, n0).unwrap();
            let scaled: usize = hist.counts.values().sum();
            let h = expected.iter().filter(|c| **c != AtkClass::NotGood).count();
            if scaled + hist.undecidable + hist.unscaled != h || hist.good != h {
                out.partition_failures += 1;
            }
            for k in 0..12u64 {
                let ak = a_theta_k(&theta, &ft, &fs, k, n0).unwrap();
                let want: Vec<usize> = (0..theta.len())
                    .filter(|&i| expected[i] == AtkClass::Scale(k))
                    .collect();
                if ak != want {
                    out.mismatches += 1;
                }
                if 2 * k < n0 as u64 && !ak.is_empty() {
                    out.floor_violations += 1;
                }
            }
            out.populated += hist.counts.len();
        }
        let flags = good_flags(&ft, &fs, n0, len).unwrap();
        let want: Vec<bool> = (0..len)
            .map(|i| oracle.class(x, x, y, y, i, i) != AtkClass::NotGood)
            .collect();
        out.mismatches += flags.iter().zip(&want).filter(|(a, b)| a != b).count();
    }
    out
}
