//! Exact decisions about rational powers of big integers.
//!
//! Heights of rank-one towers grow doubly exponentially and the exponents that
//! show up are rationals such as `12800/13493`, so raising both sides of an
//! inequality to the common denominator produces integers with millions of
//! bits. [`cmp_products`] avoids most of that work: it brackets each side
//! between directed-rounding truncations at increasing precision and only
//! falls back to the full products when the brackets keep overlapping (true
//! ties). The answers are always exact.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

/// Non-negative rational with big-integer parts.
pub type BigRatio = Ratio<BigUint>;

/// Rational exponent such as `21/100`.
pub type Exponent = Ratio<u64>;

const START_PRECISION: u64 = 64;

/// `mant * 2^exp`
#[derive(Clone, Debug)]
struct Approx {
    mant: BigUint,
    exp: i64,
}

impl Approx {
    fn one() -> Self {
        Approx {
            mant: BigUint::one(),
            exp: 0,
        }
    }

    fn rounded(mant: BigUint, exp: i64, prec: u64, up: bool) -> Self {
        let bits = mant.bits();
        if bits <= prec {
            return Approx { mant, exp };
        }
        let shift = bits - prec;
        let inexact = mant.trailing_zeros().is_some_and(|tz| tz < shift);
        let mut m = mant >> shift;
        if up && inexact {
            m += 1u32;
        }
        Approx {
            mant: m,
            exp: exp + shift as i64,
        }
    }

    fn mul(&self, other: &Approx, prec: u64, up: bool) -> Approx {
        Approx::rounded(&self.mant * &other.mant, self.exp + other.exp, prec, up)
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// `t` with `2^(t-1) <= value < 2^t`.
    fn top(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    fn cmp(&self, other: &Approx) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.exp >= other.exp {
            let shifted = &self.mant << (self.exp - other.exp) as u64;
            shifted.cmp(&other.mant)
        } else {
            let shifted = &other.mant << (other.exp - self.exp) as u64;
            self.mant.cmp(&shifted)
        }
    }

    fn div(&self, other: &Approx, prec: u64) -> Approx {
        let extra = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let shift = extra.max(0) as u64;
        let q = (&self.mant << shift) / &other.mant;
        Approx::rounded(q, self.exp - shift as i64 - other.exp, prec, false)
    }

    fn floor(&self) -> BigUint {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            &self.mant >> (-self.exp) as u64
        }
    }
}

fn pow_bound(base: &BigUint, mut e: u64, prec: u64, up: bool) -> Approx {
    let mut acc = Approx::one();
    let mut b = Approx::rounded(base.clone(), 0, prec, up);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b, prec, up);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b, prec, up);
        }
    }
    acc
}

fn product_bound(terms: &[(&BigUint, u64)], prec: u64, up: bool) -> Approx {
    terms.iter().fold(Approx::one(), |acc, (b, e)| {
        acc.mul(&pow_bound(b, *e, prec, up), prec, up)
    })
}

fn product_bits(terms: &[(&BigUint, u64)]) -> u64 {
    terms
        .iter()
        .map(|(b, e)| b.bits().saturating_mul(*e))
        .fold(0u64, u64::saturating_add)
}

fn is_zero_product(terms: &[(&BigUint, u64)]) -> bool {
    terms.iter().any(|(b, e)| b.is_zero() && *e > 0)
}

/// Exact comparison of `prod lhs[i].0^lhs[i].1` against `prod rhs[j].0^rhs[j].1`.
pub fn cmp_products(lhs: &[(&BigUint, u64)], rhs: &[(&BigUint, u64)]) -> Ordering {
    match (is_zero_product(lhs), is_zero_product(rhs)) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let full = product_bits(lhs).max(product_bits(rhs)) + 1;
    let mut prec = START_PRECISION;
    loop {
        if prec >= full {
            // no truncation happens at this precision
            let l = product_bound(lhs, full, false);
            let r = product_bound(rhs, full, false);
            return l.cmp(&r);
        }
        let l_lo = product_bound(lhs, prec, false);
        let r_hi = product_bound(rhs, prec, true);
        if l_lo.cmp(&r_hi) == Ordering::Greater {
            return Ordering::Greater;
        }
        let l_hi = product_bound(lhs, prec, true);
        let r_lo = product_bound(rhs, prec, false);
        if l_hi.cmp(&r_lo) == Ordering::Less {
            return Ordering::Less;
        }
        prec = prec.saturating_mul(4);
    }
}

/// Compares `x^e` with `y` for non-negative rationals `x`, `y`.
pub fn cmp_ratio_pow(x: &BigRatio, e: Exponent, y: &BigRatio) -> Ordering {
    let (u, v) = (*e.numer(), *e.denom());
    cmp_products(
        &[(x.numer(), u), (y.denom(), v)],
        &[(x.denom(), u), (y.numer(), v)],
    )
}

/// Compares `a^e` with `b` for integers.
pub fn cmp_int_pow(a: &BigUint, e: Exponent, b: &BigUint) -> Ordering {
    let (u, v) = (*e.numer(), *e.denom());
    cmp_products(&[(a, u)], &[(b, v)])
}

/// `floor((num/den)^(u/v))`.
///
/// # Panics
/// If `den` or `v` is zero.
pub fn floor_ratio_pow(num: &BigUint, den: &BigUint, e: Exponent) -> BigUint {
    assert!(!den.is_zero(), "zero denominator");
    let (u, v) = (*e.numer(), *e.denom());
    assert!(v > 0, "zero exponent denominator");
    if u == 0 {
        return BigUint::one();
    }
    if num.is_zero() {
        return BigUint::zero();
    }
    // m <= (num/den)^(u/v)  <=>  m^v den^u <= num^u
    let fits = |m: &BigUint| cmp_products(&[(m, v), (den, u)], &[(num, u)]) != Ordering::Greater;
    let guess = estimate_ratio_pow(num, den, u, v);
    largest_satisfying(guess, fits)
}

/// `ceil((num/den)^(u/v))`.
pub fn ceil_ratio_pow(num: &BigUint, den: &BigUint, e: Exponent) -> BigUint {
    let f = floor_ratio_pow(num, den, e);
    let (u, v) = (*e.numer(), *e.denom());
    if u == 0 {
        return f;
    }
    if cmp_products(&[(&f, v), (den, u)], &[(num, u)]) == Ordering::Equal {
        f
    } else {
        f + 1u32
    }
}

/// `floor(x^e)` for an integer `x`.
pub fn floor_pow(x: &BigUint, e: Exponent) -> BigUint {
    floor_ratio_pow(x, &BigUint::one(), e)
}

/// `ceil(x^e)` for an integer `x`.
pub fn ceil_pow(x: &BigUint, e: Exponent) -> BigUint {
    ceil_ratio_pow(x, &BigUint::one(), e)
}

/// Largest `m >= 0` with `fits(m)`, where `fits` is monotone decreasing and `fits(0)` holds.
fn largest_satisfying(guess: BigUint, fits: impl Fn(&BigUint) -> bool) -> BigUint {
    let (mut lo, mut hi);
    if fits(&guess) {
        lo = guess;
        let mut step = BigUint::one();
        loop {
            let cand = &lo + &step;
            if fits(&cand) {
                lo = cand;
                step <<= 1u32;
            } else {
                hi = cand;
                break;
            }
        }
    } else {
        hi = guess;
        let mut step = BigUint::one();
        loop {
            let cand = if step >= hi {
                BigUint::zero()
            } else {
                &hi - &step
            };
            if fits(&cand) {
                lo = cand;
                break;
            }
            hi = cand;
            step <<= 1u32;
        }
    }
    // invariant: fits(lo), !fits(hi)
    while &hi - &lo > BigUint::one() {
        let mid = (&lo + &hi) >> 1u32;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Approximate `(num/den)^(u/v)`; only used to seed the certified search.
fn estimate_ratio_pow(num: &BigUint, den: &BigUint, u: u64, v: u64) -> BigUint {
    let approx_bits = (num.bits() as i128 - den.bits() as i128) * u as i128 / v as i128;
    if approx_bits <= 96 {
        let shift = approx_bits.max(0) as u64;
        return BigUint::one() << shift;
    }
    let prec = approx_bits as u64 + 64;
    let z = pow_bound(num, u, prec, false).div(&pow_bound(den, u, prec, false), prec);

    // leading 64 bits by bisection: root = m * 2^e with m < 2^64
    let top = z.top();
    let root_top = num_integer::Integer::div_floor(&(top + v as i64 - 1), &(v as i64));
    let e = root_top - 64;
    let coarse = 160;
    let z_coarse = Approx::rounded(z.mant.clone(), z.exp, coarse, false);
    let mut lo: u128 = 0;
    let mut hi: u128 = 1u128 << 64;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let r = Approx {
            mant: BigUint::from(mid),
            exp: e,
        };
        let p = pow_bound(&r.mant, v, coarse, false);
        let p = Approx {
            mant: p.mant,
            exp: p.exp + e * v as i64,
        };
        if p.cmp(&z_coarse) == Ordering::Greater {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Newton on r^v = z in fixed point with `guard` fractional bits
    let guard: u64 = 32;
    let mut r = BigUint::from(lo.max(1)) << ((e + guard as i64) as u64);
    let one_fixed = BigUint::one() << prec;
    for _ in 0..64 {
        let rv = pow_bound(&r, v, prec, false);
        let rv = Approx {
            mant: rv.mant,
            exp: rv.exp - (guard * v) as i64,
        };
        let q = z.div(&rv, prec);
        let q_fixed = Approx {
            mant: q.mant,
            exp: q.exp + prec as i64,
        }
        .floor();
        let (delta, grow) = if q_fixed >= one_fixed {
            (&q_fixed - &one_fixed, true)
        } else {
            (&one_fixed - &q_fixed, false)
        };
        let step = (&r * delta) / (BigUint::from(v) << prec);
        if step.is_zero() {
            break;
        }
        if grow {
            r += step;
        } else if step < r {
            r -= step;
        } else {
            r >>= 1u32;
        }
    }
    r >> guard
}

/// Bit length of `x - 1` for `x >= 1`; for `h >= 2` this is the `k` with `2^(k-1) < h <= 2^k`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if x.is_zero() {
        return 0;
    }
    (x - 1u32).bits()
}

/// Renders a rational as `num/den`.
pub fn ratio_string(r: &BigRatio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rounds `num/den` half-to-even at `places` decimal places and renders it.
pub fn decimal_half_even(num: &BigUint, den: &BigUint, places: u32) -> String {
    let scale = BigUint::from(10u32).pow(places);
    let scaled = num * &scale;
    let (q, r) = scaled.div_rem(den);
    let twice = &r << 1u32;
    let q = match twice.cmp(den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1u32,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u32
            }
        }
    };
    let (int_part, frac) = q.div_rem(&scale);
    if places == 0 {
        return int_part.to_string();
    }
    let frac = frac
        .to_u64()
        .map(|f| f.to_string())
        .unwrap_or_else(|| frac.to_string());
    format!("{int_part}.{frac:0>width$}", width = places as usize)
}

/// Parses `u/v` or `u` into an exponent.
pub fn parse_exponent(s: &str) -> Option<Exponent> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().ok()?;
            let b: u64 = b.trim().parse().ok()?;
            if b == 0 {
                return None;
            }
            Ratio::new(a, b)
        }
        None => Ratio::from_integer(s.parse().ok()?),
    };
    Some(r)
}

/// Serde helper writing big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn compares_small_powers() {
        assert_eq!(
            cmp_products(&[(&big(2), 5)], &[(&big(32), 1)]),
            Ordering::Equal
        );
        assert_eq!(
            cmp_products(&[(&big(3), 4)], &[(&big(80), 1)]),
            Ordering::Greater
        );
        assert_eq!(
            cmp_products(&[(&big(0), 3)], &[(&big(0), 0)]),
            Ordering::Less
        );
        assert_eq!(cmp_products(&[], &[(&big(1), 9)]), Ordering::Equal);
    }

    #[test]
    fn large_tie_falls_back_to_exact() {
        let a = (big(1) << 300u32) + 12345u32;
        let a2 = &a * &a;
        assert_eq!(cmp_products(&[(&a, 14)], &[(&a2, 7)]), Ordering::Equal);
        let a2p = &a2 + 1u32;
        assert_eq!(cmp_products(&[(&a, 14)], &[(&a2p, 7)]), Ordering::Less);
    }

    #[test]
    fn floor_and_ceil_match_naive_roots() {
        for x in 1u64..400 {
            for (u, v) in [(1u64, 2u64), (1, 3), (21, 100), (3, 10), (421, 400), (7, 5)] {
                let e = Ratio::new(u, v);
                let f = floor_pow(&big(x), e);
                // oracle: direct scan
                let target = big(x).pow(u as u32);
                let mut m = 0u64;
                while big(m + 1).pow(v as u32) <= target {
                    m += 1;
                }
                assert_eq!(f, big(m), "floor {x}^{u}/{v}");
                let c = ceil_pow(&big(x), e);
                let expect = if big(m).pow(v as u32) == target {
                    m
                } else {
                    m + 1
                };
                assert_eq!(c, big(expect), "ceil {x}^{u}/{v}");
            }
        }
    }

    #[test]
    fn large_root_brackets_hold() {
        let y = (big(1) << 700u32) - 987654321u64;
        let e = Ratio::new(12800, 13493);
        let m = floor_pow(&y, e);
        assert_ne!(
            cmp_products(&[(&m, 13493)], &[(&y, 12800)]),
            Ordering::Greater
        );
        let m1 = &m + 1u32;
        assert_eq!(
            cmp_products(&[(&m1, 13493)], &[(&y, 12800)]),
            Ordering::Greater
        );
        assert!(m.bits() > 600);
    }

    #[test]
    fn ratio_power_ceil() {
        // (9/4)^(1/2) = 3/2 -> ceil 2, floor 1
        assert_eq!(ceil_ratio_pow(&big(9), &big(4), Ratio::new(1, 2)), big(2));
        assert_eq!(floor_ratio_pow(&big(9), &big(4), Ratio::new(1, 2)), big(1));
        assert_eq!(ceil_ratio_pow(&big(16), &big(1), Ratio::new(1, 2)), big(4));
    }

    #[test]
    fn half_even_rendering() {
        assert_eq!(decimal_half_even(&big(1), &big(8), 2), "0.12");
        assert_eq!(decimal_half_even(&big(3), &big(8), 2), "0.38");
        assert_eq!(decimal_half_even(&big(1), &big(3), 6), "0.333333");
        assert_eq!(decimal_half_even(&big(2), &big(3), 6), "0.666667");
        assert_eq!(decimal_half_even(&big(1), &big(1), 6), "1.000000");
        assert_eq!(decimal_half_even(&big(1), &big(2_000_000), 6), "0.000000");
        assert_eq!(decimal_half_even(&big(3), &big(2_000_000), 6), "0.000002");
    }

    #[test]
    fn ceil_log2_buckets() {
        assert_eq!(ceil_log2(&big(1)), 0);
        assert_eq!(ceil_log2(&big(2)), 1);
        assert_eq!(ceil_log2(&big(4)), 2);
        assert_eq!(ceil_log2(&big(5)), 3);
    }
}
