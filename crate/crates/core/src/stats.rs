use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::exact::BigRatio;
use crate::spec::RankOneSpec;

/// Heights and spacer-mass quantities of a truncated construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStats {
    /// `h_1..h_{M+1}`.
    pub heights: Vec<BigUint>,
    /// `prod_{i<=n} p_i` at index `n`, starting with `1` at index 0.
    pub cut_products: Vec<BigUint>,
    /// `sum_i a_{n,i}` at index `n-1`.
    pub spacer_totals: Vec<BigUint>,
    /// `eps_n = sum_i a_{n,i} / prod_{i<=n} p_i` at index `n-1`.
    pub eps: Vec<BigRatio>,
    /// `K = prod (1 + eps_n)`.
    pub k_bound: BigRatio,
    /// `sum_{n<=M} eps_n`.
    pub eps_sum: BigRatio,
}

impl TowerStats {
    /// `h_n`, 1-based, `n <= M+1`.
    pub fn height(&self, n: usize) -> &BigUint {
        &self.heights[n - 1]
    }

    pub fn top_height(&self) -> &BigUint {
        self.heights.last().expect("h_1 always present")
    }

    /// Number of towers, `M+1`.
    pub fn towers(&self) -> usize {
        self.heights.len()
    }

    /// `prod_{i<=n} p_i`.
    pub fn cut_product(&self, n: usize) -> &BigUint {
        &self.cut_products[n]
    }
}

pub fn compute_stats(spec: &RankOneSpec) -> TowerStats {
    let m = spec.max_stage();
    let mut heights = Vec::with_capacity(m + 1);
    let mut cut_products = Vec::with_capacity(m + 1);
    let mut spacer_totals = Vec::with_capacity(m);
    let mut eps = Vec::with_capacity(m);
    let mut h = BigUint::one();
    let mut prod = BigUint::one();
    let mut k_bound = BigRatio::one();
    let mut eps_sum = BigRatio::zero();
    heights.push(h.clone());
    cut_products.push(prod.clone());
    for n in 1..=m {
        let p = spec.cut(n);
        let total = spec.spacer_total(n);
        h = p * &h + &total;
        prod *= p;
        let e = BigRatio::new(total.clone(), prod.clone());
        k_bound *= BigRatio::one() + &e;
        eps_sum += &e;
        heights.push(h.clone());
        cut_products.push(prod.clone());
        spacer_totals.push(total);
        eps.push(e);
    }
    TowerStats {
        heights,
        cut_products,
        spacer_totals,
        eps,
        k_bound,
        eps_sum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::RankOneSpec;

    #[test]
    fn single_stage_staircase() {
        let s = compute_stats(&RankOneSpec::staircase("a", &[2]).unwrap());
        assert_eq!(s.heights, vec![BigUint::from(1u32), BigUint::from(5u32)]);
    }

    #[test]
    fn two_stage_staircase() {
        let s = compute_stats(&RankOneSpec::staircase("a", &[2, 3]).unwrap());
        assert_eq!(s.height(3), &BigUint::from(21u32));
    }

    #[test]
    fn odometer_has_no_spacer_mass() {
        let s = compute_stats(&RankOneSpec::odometer("o", 2, 3).unwrap());
        let want: Vec<BigUint> = [1u32, 2, 4, 8].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(s.heights, want);
        assert!(s.eps.iter().all(|e| e.is_zero()));
        assert!(s.k_bound.is_one());
        assert!(s.eps_sum.is_zero());
    }
}
