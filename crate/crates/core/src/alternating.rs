//! Alternating height sequences and the staircase partner construction.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::classify::{classify, ClassParams, ClassReport};
use crate::error::{Error, Result};
use crate::exact::{
    ceil_ratio_pow, cmp_int_pow, cmp_products, decimal, floor_pow, ratio_string, Exponent,
};
use crate::spec::{RankOneSpec, SpacerRule};
use crate::stats::{compute_stats, TowerStats};

/// Outcome at one index `n` of the sequence being bracketed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlternationRow {
    Decided {
        n: usize,
        /// `m(n)`, 1-based.
        m: usize,
        /// `b_m^(1+delta) < a_n`
        lower: bool,
        /// `a_n^(1+delta) < b_(m+1)`
        upper: bool,
    },
    /// `a_n` lies below `b_1` or at or above the last `b`.
    Undecidable { n: usize },
}

impl AlternationRow {
    pub fn index(&self) -> usize {
        match *self {
            AlternationRow::Decided { n, .. } | AlternationRow::Undecidable { n } => n,
        }
    }

    /// `None` when undecidable.
    pub fn holds(&self) -> Option<bool> {
        match *self {
            AlternationRow::Decided { lower, upper, .. } => Some(lower && upper),
            AlternationRow::Undecidable { .. } => None,
        }
    }
}

/// Whether `b` is `a`-alternating with exponent `delta`, index by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternationReport {
    pub delta: String,
    pub n0: usize,
    pub rows: Vec<AlternationRow>,
}

impl AlternationReport {
    /// Every decided row from `n0` on holds.
    pub fn verdict(&self) -> bool {
        self.rows.iter().all(|r| r.holds() != Some(false))
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.holds() == Some(false))
            .map(AlternationRow::index)
    }

    /// Smallest index from which every decided row holds.
    pub fn threshold(&self) -> usize {
        match self.rows.iter().rev().find(|r| r.holds() == Some(false)) {
            Some(r) => r.index() + 1,
            None => self.n0,
        }
    }

    pub fn decided_from(&self, n: usize) -> usize {
        self.rows
            .iter()
            .filter(|r| r.index() >= n && r.holds().is_some())
            .count()
    }
}

/// Both directions of the mutual condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutualAlternation {
    /// Rows over `a`, bracketed by `b`.
    pub b_wrt_a: AlternationReport,
    /// Rows over `b`, bracketed by `a`.
    pub a_wrt_b: AlternationReport,
}

impl MutualAlternation {
    pub fn verdict(&self) -> bool {
        self.b_wrt_a.verdict() && self.a_wrt_b.verdict()
    }
}

fn check_increasing(name: &str, s: &[BigUint]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::domain(format!("sequence {name} is empty")));
    }
    if let Some(i) = s.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "sequence {name} not strictly increasing at index {}",
            i + 2
        )));
    }
    Ok(())
}

/// Rows `n >= n0` (1-based) of `a` against the brackets of `b`.
pub fn check_alternating(
    a: &[BigUint],
    b: &[BigUint],
    delta: Exponent,
    n0: usize,
) -> Result<AlternationReport> {
    check_increasing("a", a)?;
    check_increasing("b", b)?;
    if delta <= Exponent::from(0) {
        return Err(Error::domain("delta must be positive"));
    }
    let e = Exponent::one() + delta;
    let n0 = n0.max(1);
    let rows = a
        .iter()
        .enumerate()
        .skip(n0 - 1)
        .map(|(i, an)| {
            let n = i + 1;
            // number of b_j <= a_n
            let m = b.partition_point(|bj| bj <= an);
            if m == 0 || m == b.len() {
                return AlternationRow::Undecidable { n };
            }
            AlternationRow::Decided {
                n,
                m,
                lower: cmp_int_pow(&b[m - 1], e, an) == Ordering::Less,
                upper: cmp_int_pow(an, e, &b[m]) == Ordering::Less,
            }
        })
        .collect();
    Ok(AlternationReport {
        delta: delta.to_string(),
        n0,
        rows,
    })
}

pub fn check_delta_alternating(
    a: &[BigUint],
    b: &[BigUint],
    delta: Exponent,
    n0: usize,
) -> Result<MutualAlternation> {
    Ok(MutualAlternation {
        b_wrt_a: check_alternating(a, b, delta, n0)?,
        a_wrt_b: check_alternating(b, a, delta, n0)?,
    })
}

/// Inputs of the partner construction. `class.n_start` plays the role of `n'_T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartnerParams {
    pub class: ClassParams,
    pub eta: Exponent,
    /// Put no spacers on the `p^S = 2` prefix.
    pub zero_prefix: bool,
}

impl PartnerParams {
    pub fn new(class: ClassParams, eta: Exponent) -> Result<Self> {
        if class.gamma_prime >= Exponent::new(1, 3) {
            return Err(Error::Hypothesis(format!(
                "gamma' = {} is not below 1/3",
                class.gamma_prime
            )));
        }
        if eta <= Exponent::from(0) || eta >= Exponent::new(1, 100) {
            return Err(Error::Hypothesis(format!(
                "eta = {eta} is not in (0, 1/100)"
            )));
        }
        Ok(PartnerParams {
            class,
            eta,
            zero_prefix: false,
        })
    }

    pub fn n_prime(&self) -> usize {
        self.class.n_start
    }

    /// `1 + gamma/4`.
    pub fn lower_exponent(&self) -> Exponent {
        Exponent::one() + self.class.gamma / 4
    }

    /// `1 + (1/4 + eta) gamma`.
    pub fn chain_exponent(&self) -> Exponent {
        Exponent::one() + (Exponent::new(1, 4) + self.eta) * self.class.gamma
    }

    /// `1 / (1 + (1/4 + eta) gamma)`.
    pub fn upper_exponent(&self) -> Exponent {
        self.chain_exponent().recip()
    }
}

/// Selection window of one partner cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartnerWindow {
    /// Stage `w+1` of the chosen cut.
    pub stage: usize,
    /// `ceil((K_T prod_{i<=w+1} p^T_i)^(1+gamma/4))`
    #[serde(serialize_with = "decimal::serialize")]
    pub lower: BigUint,
    /// `floor((prod_{i<=w+2} p^T_i)^(1/(1+(1/4+eta)gamma)))`
    #[serde(serialize_with = "decimal::serialize")]
    pub upper: BigUint,
    /// `prod_{i<=w} p^S_i`
    #[serde(serialize_with = "decimal::serialize")]
    pub prefix_product: BigUint,
    #[serde(serialize_with = "decimal::serialize")]
    pub chosen: BigUint,
    /// `upper - lower >= 4 prod_{i<=w} p^S_i`
    pub length_bound: bool,
    /// `(prod_{i<=w} p^S_i)^(1+(1/4+eta)gamma) < prod_{i<=w+1} p^T_i`
    pub left_inequality: bool,
}

impl PartnerWindow {
    pub fn product(&self) -> BigUint {
        &self.prefix_product * &self.chosen
    }

    pub fn contains_choice(&self) -> bool {
        let prod = self.product();
        self.lower <= prod && prod <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartnerTrace {
    pub n_prime: usize,
    pub gamma: String,
    pub gamma_prime: String,
    pub eta: String,
    pub k_t: String,
    pub windows: Vec<PartnerWindow>,
}

impl PartnerTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

fn product(xs: &[BigUint]) -> BigUint {
    xs.iter().fold(BigUint::one(), |acc, x| acc * x)
}

/// Staircase partner `S` of `T` with `p^S_n = 2` up to `n'_T + 1` and the
/// smallest admissible cut in every later window. `S` stops at stage
/// `M_T - 1`, the last stage whose window is known.
pub fn construct_partner(
    spec_t: &RankOneSpec,
    params: &PartnerParams,
) -> Result<(RankOneSpec, PartnerTrace)> {
    let stats_t = compute_stats(spec_t);
    let report = classify(spec_t, &stats_t, &params.class);
    if let Some(row) = report.rows.iter().find(|r| !r.holds()) {
        return Err(Error::Hypothesis(format!(
            "T is not in C_({},{}) at stage {}",
            params.class.gamma, params.class.gamma_prime, row.stage
        )));
    }
    let m_t = spec_t.max_stage();
    let n_prime = params.n_prime();
    let m_s = m_t
        .checked_sub(1)
        .filter(|&m| m > n_prime + 1)
        .ok_or_else(|| {
            Error::Hypothesis(format!(
                "depth {m_t} leaves no stage after n'_T + 1 = {}",
                n_prime + 1
            ))
        })?;

    let p_t = spec_t.cuts();
    let k = &stats_t.k_bound;
    let (e_lo, e_hi, e_chain) = (
        params.lower_exponent(),
        params.upper_exponent(),
        params.chain_exponent(),
    );
    let mut cuts = vec![BigUint::from(2u32); n_prime + 1];
    let mut windows = Vec::new();
    for w in n_prime + 1..m_s {
        let prefix = product(&cuts);
        let prod_t1 = product(&p_t[..w + 1]);
        let prod_t2 = &prod_t1 * &p_t[w + 1];
        let lower = ceil_ratio_pow(&(k.numer() * &prod_t1), k.denom(), e_lo);
        let upper = floor_pow(&prod_t2, e_hi);
        let (q, r) = lower.div_rem(&prefix);
        let need = if r.bits() == 0 { q } else { q + 1u32 };
        let chosen = need.max(BigUint::from(2u32));
        let left_inequality = cmp_int_pow(&prefix, e_chain, &prod_t1) == Ordering::Less;
        let length_bound = upper >= lower && &upper - &lower >= &prefix << 2u32;
        let win = PartnerWindow {
            stage: w + 1,
            lower,
            upper,
            prefix_product: prefix,
            chosen,
            length_bound,
            left_inequality,
        };
        if win.product() > win.upper {
            return Err(Error::ConstructionFailure {
                stage: win.stage,
                lower: win.lower,
                upper: win.upper,
            });
        }
        cuts.push(win.chosen.clone());
        windows.push(win);
    }
    let zero_prefix = if params.zero_prefix { n_prime + 1 } else { 0 };
    let spec_s = RankOneSpec::new(
        format!("{}-partner", spec_t.label()),
        cuts,
        SpacerRule::Staircase { zero_prefix },
    )?;
    let trace = PartnerTrace {
        n_prime,
        gamma: params.class.gamma.to_string(),
        gamma_prime: params.class.gamma_prime.to_string(),
        eta: params.eta.to_string(),
        k_t: ratio_string(k),
        windows,
    };
    Ok((spec_s, trace))
}

/// Cut of `S` at one stage against the height ratios.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutRow {
    pub stage: usize,
    pub staircase: bool,
    /// `h_(n+1) / (K_S h_n) <= p_n <= h_(n+1) / h_n`
    pub ratio_window: bool,
    /// `h_n^(gamma/3) <= p_n <= h_n^(3 gamma')`
    pub power_window: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartnerReport {
    pub cut_rows: Vec<CutRow>,
    pub class_s: ClassReport,
    pub class_t: ClassReport,
    pub alternation: MutualAlternation,
    /// First stage from which every staircase and window row holds.
    pub cut_threshold: Option<usize>,
    pub class_s_from: Option<usize>,
    pub class_t_from: Option<usize>,
}

impl PartnerReport {
    pub fn staircase(&self) -> bool {
        self.cut_rows.iter().all(|r| r.staircase)
    }

    /// Membership of the pair in `L^(gamma/3, 3gamma', gamma/4)` at the computed stages.
    pub fn in_l(&self) -> bool {
        self.class_s_from.is_some() && self.class_t_from.is_some() && self.alternation_settles()
    }

    /// Both alternation directions have decided indices past their thresholds.
    pub fn alternation_settles(&self) -> bool {
        [&self.alternation.b_wrt_a, &self.alternation.a_wrt_b]
            .iter()
            .all(|r| r.decided_from(r.threshold()) > 0)
    }

    pub fn passes(&self) -> bool {
        self.staircase() && self.cut_threshold.is_some() && self.in_l()
    }
}

fn settle_from<I: DoubleEndedIterator<Item = (usize, bool)>>(rows: I) -> Option<usize> {
    let mut first = None;
    for (n, ok) in rows.rev() {
        if !ok {
            break;
        }
        first = Some(n);
    }
    first
}

fn cut_row(spec: &RankOneSpec, stats: &TowerStats, lo: Exponent, hi: Exponent, n: usize) -> CutRow {
    let p = spec.cut(n);
    let (h, h_next) = (stats.height(n), stats.height(n + 1));
    let k = &stats.k_bound;
    // h_(n+1) * den(K) <= p * num(K) * h_n   and   p * h_n <= h_(n+1)
    let ratio_window = cmp_products(
        &[(h_next, 1), (k.denom(), 1)],
        &[(p, 1), (k.numer(), 1), (h, 1)],
    ) != Ordering::Greater
        && p * h <= *h_next;
    let power_window =
        cmp_int_pow(h, lo, p) != Ordering::Greater && cmp_int_pow(h, hi, p) != Ordering::Less;
    CutRow {
        stage: n,
        staircase: spec.is_staircase_stage(n),
        ratio_window,
        power_window,
    }
}

/// Finite-stage check that `S` is a staircase partner of `T` for the class
/// `C_(gamma,gamma')` described by `params`.
pub fn verify_partner(
    spec_t: &RankOneSpec,
    spec_s: &RankOneSpec,
    params: &ClassParams,
) -> Result<PartnerReport> {
    let stats_t = compute_stats(spec_t);
    let stats_s = compute_stats(spec_s);
    let lo = params.gamma / 3;
    let hi = params.gamma_prime * 3;
    let wide = ClassParams::new(lo, hi, 1)?;
    let cut_rows: Vec<CutRow> = (1..=spec_s.max_stage())
        .map(|n| cut_row(spec_s, &stats_s, lo, hi, n))
        .collect();
    let cut_threshold = settle_from(
        cut_rows
            .iter()
            .map(|r| (r.stage, r.staircase && r.ratio_window && r.power_window)),
    );
    let class_s = classify(spec_s, &stats_s, &wide);
    let class_t = classify(spec_t, &stats_t, &wide);
    let alternation =
        check_delta_alternating(&stats_t.heights, &stats_s.heights, params.gamma / 4, 1)?;
    Ok(PartnerReport {
        cut_rows,
        class_s_from: class_s.member_from(),
        class_t_from: class_t.member_from(),
        class_s,
        class_t,
        alternation,
        cut_threshold,
    })
}

/// Inputs of [`intermediate_chain_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub gamma: Exponent,
    pub gamma_prime: Exponent,
    pub eta: Exponent,
    /// Rows below this index are skipped.
    pub from: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainRow {
    pub n: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    /// `(prod_{i<=n-2} p^S_i)^(1+(1/4+eta)gamma) < prod_{i<=n-1} p^T_i`
    pub left: Vec<ChainRow>,
    /// `(K_T prod_{i<=n-1} p^T_i)^(1+gamma/4) < prod_{i<=n-1} p^S_i`
    pub right: Vec<ChainRow>,
    /// `h^T_(n+2) <= (h^T_n)^(1+3gamma')`
    pub height_bound: Vec<ChainRow>,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.left
            .iter()
            .chain(&self.right)
            .chain(&self.height_bound)
            .all(|r| r.holds)
    }

    pub fn settles(rows: &[ChainRow]) -> Option<usize> {
        settle_from(rows.iter().map(|r| (r.n, r.holds)))
    }
}

pub fn intermediate_chain_check(
    spec_t: &RankOneSpec,
    spec_s: &RankOneSpec,
    params: &ChainParams,
) -> ChainReport {
    let stats_t = compute_stats(spec_t);
    let stats_s = compute_stats(spec_s);
    let (m_t, m_s) = (spec_t.max_stage(), spec_s.max_stage());
    let from = params.from.max(2);
    let e_chain = Exponent::one() + (Exponent::new(1, 4) + params.eta) * params.gamma;
    let e_lo = Exponent::one() + params.gamma / 4;
    let e_h = Exponent::one() + params.gamma_prime * 3;
    let k = &stats_t.k_bound;

    let left = (from..=(m_t + 1).min(m_s + 2))
        .map(|n| ChainRow {
            n,
            holds: cmp_int_pow(
                stats_s.cut_product(n - 2),
                e_chain,
                stats_t.cut_product(n - 1),
            ) == Ordering::Less,
        })
        .collect();
    let right = (from..=(m_t + 1).min(m_s + 1))
        .map(|n| {
            // (num/den * P_T)^(u/v) < P_S  <=>  num^u P_T^u < P_S^v den^u
            let (u, v) = (*e_lo.numer(), *e_lo.denom());
            let ord = cmp_products(
                &[(k.numer(), u), (stats_t.cut_product(n - 1), u)],
                &[(stats_s.cut_product(n - 1), v), (k.denom(), u)],
            );
            ChainRow {
                n,
                holds: ord == Ordering::Less,
            }
        })
        .collect();
    let height_bound = (params.from.max(1)..=(m_t + 1).saturating_sub(2))
        .map(|n| ChainRow {
            n,
            holds: cmp_int_pow(stats_t.height(n), e_h, stats_t.height(n + 2)) != Ordering::Less,
        })
        .collect();
    ChainReport {
        left,
        right,
        height_bound,
    }
}
