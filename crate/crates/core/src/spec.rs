//! Generating data of a rank-one construction and its file format.

use std::fmt;
use std::path::Path;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{ceil_pow, parse_exponent, Exponent};

/// Spacer placement per stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpacerRule {
    /// `a_{n,i} = 0`.
    None,
    /// `a_{n,i} = i`, except stages `n <= zero_prefix`, which carry no spacers.
    Staircase { zero_prefix: usize },
    /// One array of length `p_n` per stage.
    Explicit(Vec<Vec<BigUint>>),
}

/// Cuts `p_1..p_M` and spacers of a rank-one construction truncated at stage `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneSpec {
    label: String,
    cuts: Vec<BigUint>,
    spacers: SpacerRule,
    // prefix sums for explicit arrays: prefix[n-1][c-1] = sum_{i<c} a_{n,i}
    prefix: Vec<Vec<BigUint>>,
}

impl RankOneSpec {
    pub fn new(label: impl Into<String>, cuts: Vec<BigUint>, spacers: SpacerRule) -> Result<Self> {
        let two = BigUint::from(2u32);
        for (i, p) in cuts.iter().enumerate() {
            if *p < two {
                return Err(Error::spec(format!("cut p_{} = {p} is below 2", i + 1)));
            }
        }
        let mut prefix = Vec::new();
        if let SpacerRule::Explicit(arrays) = &spacers {
            if arrays.len() < cuts.len() {
                return Err(Error::spec(format!(
                    "{} spacer arrays for {} stages",
                    arrays.len(),
                    cuts.len()
                )));
            }
            for (n, (arr, p)) in arrays.iter().zip(&cuts).enumerate() {
                if arr.is_empty() {
                    return Err(Error::spec(format!(
                        "empty spacer array at stage {}",
                        n + 1
                    )));
                }
                if BigUint::from(arr.len()) != *p {
                    return Err(Error::spec(format!(
                        "spacer array at stage {} has length {}, expected p = {p}",
                        n + 1,
                        arr.len()
                    )));
                }
                let mut acc = BigUint::zero();
                let mut sums = Vec::with_capacity(arr.len() + 1);
                sums.push(acc.clone());
                for a in arr {
                    acc += a;
                    sums.push(acc.clone());
                }
                prefix.push(sums);
            }
        }
        let spacers = match spacers {
            SpacerRule::Explicit(mut arrays) => {
                arrays.truncate(cuts.len());
                SpacerRule::Explicit(arrays)
            }
            other => other,
        };
        Ok(RankOneSpec {
            label: label.into(),
            cuts,
            spacers,
            prefix,
        })
    }

    /// Staircase with the given cuts.
    pub fn staircase(label: impl Into<String>, cuts: &[u64]) -> Result<Self> {
        Self::new(
            label,
            cuts.iter().map(|&p| BigUint::from(p)).collect(),
            SpacerRule::Staircase { zero_prefix: 0 },
        )
    }

    /// Odometer: constant cut `p`, no spacers.
    pub fn odometer(label: impl Into<String>, p: u64, depth: usize) -> Result<Self> {
        Self::new(label, vec![BigUint::from(p); depth], SpacerRule::None)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_stage(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self) -> &[BigUint] {
        &self.cuts
    }

    pub fn spacer_rule(&self) -> &SpacerRule {
        &self.spacers
    }

    /// `p_n`, 1-based.
    pub fn cut(&self, n: usize) -> &BigUint {
        &self.cuts[n - 1]
    }

    fn staircase_active(&self, n: usize) -> Option<bool> {
        match &self.spacers {
            SpacerRule::None => Some(false),
            SpacerRule::Staircase { zero_prefix } => Some(n > *zero_prefix),
            SpacerRule::Explicit(_) => None,
        }
    }

    /// `a_{n,i}` for `1 <= i <= p_n`.
    pub fn spacer(&self, n: usize, i: &BigUint) -> BigUint {
        match self.staircase_active(n) {
            Some(true) => i.clone(),
            Some(false) => BigUint::zero(),
            None => {
                let SpacerRule::Explicit(arrays) = &self.spacers else {
                    unreachable!()
                };
                arrays[n - 1][i.to_usize().expect("explicit column index") - 1].clone()
            }
        }
    }

    pub fn spacer_is_zero(&self, n: usize, i: &BigUint) -> bool {
        match self.staircase_active(n) {
            Some(active) => !active,
            None => self.spacer(n, i).is_zero(),
        }
    }

    /// `sum_{i<c} a_{n,i}`.
    pub fn spacers_before(&self, n: usize, c: &BigUint) -> BigUint {
        match self.staircase_active(n) {
            Some(true) => {
                if c.is_zero() {
                    BigUint::zero()
                } else {
                    (c * (c - 1u32)) >> 1u32
                }
            }
            Some(false) => BigUint::zero(),
            None => self.prefix[n - 1][c.to_usize().expect("explicit column index") - 1].clone(),
        }
    }

    /// `sum_i a_{n,i}`.
    pub fn spacer_total(&self, n: usize) -> BigUint {
        self.spacers_before(n, &(self.cut(n) + 1u32))
    }

    /// `a_{n,p_n}`.
    pub fn last_spacer(&self, n: usize) -> BigUint {
        self.spacer(n, self.cut(n))
    }

    /// Whether the spacers of stage `n` are strictly increasing in the column index.
    pub fn spacers_increasing(&self, n: usize) -> bool {
        match self.staircase_active(n) {
            Some(active) => active,
            None => {
                let SpacerRule::Explicit(arrays) = &self.spacers else {
                    unreachable!()
                };
                arrays[n - 1].windows(2).all(|w| w[0] < w[1])
            }
        }
    }

    /// Whether `a_{n,i} = i` for every column of stage `n`.
    pub fn is_staircase_stage(&self, n: usize) -> bool {
        match self.staircase_active(n) {
            Some(active) => active,
            None => {
                let SpacerRule::Explicit(arrays) = &self.spacers else {
                    unreachable!()
                };
                arrays[n - 1]
                    .iter()
                    .enumerate()
                    .all(|(i, a)| *a == BigUint::from(i + 1))
            }
        }
    }

    /// Same construction cut at a smaller depth.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth > self.max_stage() {
            return Err(Error::spec(format!(
                "cannot extend a depth-{} spec to {depth}",
                self.max_stage()
            )));
        }
        let spacers = match &self.spacers {
            SpacerRule::Explicit(a) => SpacerRule::Explicit(a[..depth].to_vec()),
            other => other.clone(),
        };
        Self::new(self.label.clone(), self.cuts[..depth].to_vec(), spacers)
    }

    /// Explicit-cut spec file describing this spec.
    pub fn to_file(&self) -> SpecFile {
        let spacers = match &self.spacers {
            SpacerRule::None => SpacersSection::None,
            SpacerRule::Staircase { zero_prefix } => SpacersSection::Staircase {
                zero_prefix: *zero_prefix,
            },
            SpacerRule::Explicit(a) => SpacersSection::Explicit {
                arrays: a
                    .iter()
                    .map(|row| row.iter().cloned().map(Big).collect())
                    .collect(),
            },
        };
        SpecFile {
            label: self.label.clone(),
            max_stage: self.max_stage(),
            cuts: CutsSection::Explicit {
                values: self.cuts.iter().cloned().map(Big).collect(),
            },
            spacers,
        }
    }
}

/// Big integer that reads from a TOML integer or a decimal string, and writes
/// an integer whenever it fits in `i64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Big(pub BigUint);

impl Serialize for Big {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Big {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BigVisitor;
        impl Visitor<'_> for BigVisitor {
            type Value = Big;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Big, E> {
                u64::try_from(v)
                    .map(|v| Big(BigUint::from(v)))
                    .map_err(|_| E::custom("negative value"))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Big, E> {
                Ok(Big(BigUint::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Big, E> {
                v.trim()
                    .parse::<BigUint>()
                    .map(Big)
                    .map_err(|_| E::custom(format!("not a decimal integer: {v:?}")))
            }
        }
        d.deserialize_any(BigVisitor)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowChoice {
    #[default]
    Smallest,
    Largest,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CutsSection {
    Explicit {
        values: Vec<Big>,
    },
    /// `p_n` in `[h_n^gamma, h_n^gamma')`, after an explicit prefix.
    PowerWindow {
        gamma: String,
        gamma_prime: String,
        #[serde(default)]
        choice: WindowChoice,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<Big>,
    },
}

fn is_zero_usize(v: &usize) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpacersSection {
    None,
    Staircase {
        #[serde(default, skip_serializing_if = "is_zero_usize")]
        zero_prefix: usize,
    },
    Explicit {
        arrays: Vec<Vec<Big>>,
    },
}

/// On-disk spec document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub label: String,
    pub max_stage: usize,
    pub cuts: CutsSection,
    pub spacers: SpacersSection,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::spec(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Byte-stable rendering.
    pub fn to_canonical_string(&self) -> String {
        toml::to_string(self).expect("spec documents always serialize")
    }

    fn spacer_rule(&self) -> SpacerRule {
        match &self.spacers {
            SpacersSection::None => SpacerRule::None,
            SpacersSection::Staircase { zero_prefix } => SpacerRule::Staircase {
                zero_prefix: *zero_prefix,
            },
            SpacersSection::Explicit { arrays } => SpacerRule::Explicit(
                arrays
                    .iter()
                    .map(|row| row.iter().map(|b| b.0.clone()).collect())
                    .collect(),
            ),
        }
    }

    /// Materializes the cuts up to `max_stage`.
    pub fn resolve(&self) -> Result<RankOneSpec> {
        let depth = self.max_stage;
        if depth == 0 {
            return Err(Error::spec("max_stage must be at least 1"));
        }
        let rule = self.spacer_rule();
        let cuts = match &self.cuts {
            CutsSection::Explicit { values } => {
                if values.len() < depth {
                    return Err(Error::spec(format!(
                        "{} cut values for max_stage {depth}",
                        values.len()
                    )));
                }
                values[..depth].iter().map(|b| b.0.clone()).collect()
            }
            CutsSection::PowerWindow {
                gamma,
                gamma_prime,
                choice,
                seed,
                prefix,
            } => {
                let g = parse_exponent(gamma)
                    .ok_or_else(|| Error::spec(format!("bad gamma {gamma:?}")))?;
                let gp = parse_exponent(gamma_prime)
                    .ok_or_else(|| Error::spec(format!("bad gamma_prime {gamma_prime:?}")))?;
                if !(g > Exponent::from(0) && g < gp && gp < Exponent::from(1)) {
                    return Err(Error::spec(
                        "power window needs 0 < gamma < gamma_prime < 1",
                    ));
                }
                power_window_cuts(
                    &prefix.iter().map(|b| b.0.clone()).collect::<Vec<_>>(),
                    &rule,
                    depth,
                    g,
                    gp,
                    *choice,
                    *seed,
                )?
            }
        };
        RankOneSpec::new(self.label.clone(), cuts, rule)
    }
}

fn spacer_total_for(rule: &SpacerRule, n: usize, p: &BigUint) -> Result<BigUint> {
    Ok(match rule {
        SpacerRule::None => BigUint::zero(),
        SpacerRule::Staircase { zero_prefix } => {
            if n <= *zero_prefix {
                BigUint::zero()
            } else {
                (p * (p + 1u32)) >> 1u32
            }
        }
        SpacerRule::Explicit(arrays) => {
            let row = arrays
                .get(n - 1)
                .ok_or_else(|| Error::spec(format!("no spacer array for stage {n}")))?;
            row.iter().sum()
        }
    })
}

fn power_window_cuts(
    prefix: &[BigUint],
    rule: &SpacerRule,
    depth: usize,
    gamma: Exponent,
    gamma_prime: Exponent,
    choice: WindowChoice,
    seed: u64,
) -> Result<Vec<BigUint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    let mut cuts = Vec::with_capacity(depth);
    let mut h = BigUint::one();
    for n in 1..=depth {
        let p = if let Some(p) = prefix.get(n - 1) {
            p.clone()
        } else {
            let lo = ceil_pow(&h, gamma).max(two.clone());
            // largest p with p < h^gamma'
            let hi_excl = ceil_pow(&h, gamma_prime);
            if hi_excl <= lo {
                return Err(Error::spec(format!(
                    "power window [h^gamma, h^gamma') holds no cut >= 2 at stage {n} (h = {h})"
                )));
            }
            match choice {
                WindowChoice::Smallest => lo,
                WindowChoice::Largest => hi_excl - 1u32,
                WindowChoice::Uniform => rng.gen_biguint_range(&lo, &hi_excl),
            }
        };
        let total = spacer_total_for(rule, n, &p)?;
        h = &p * &h + total;
        cuts.push(p);
    }
    Ok(cuts)
}
