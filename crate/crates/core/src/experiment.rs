//! Seeded experiment runs over the constructed pair and the baselines: pair
//! sampling, f-bar sweeps, `A^k` histograms and summary tables.
//!
//! Every pair `i` of subject `s` draws from its own ChaCha stream, so records
//! do not depend on thread count or on the other pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alternating::{construct_partner, PartnerParams, PartnerTrace};
use crate::analysis::atk::{classify_matching, good_flags, AtkHistogram, Factor};
use crate::analysis::goodsets::{GoodSetParams, GoodSets};
use crate::baselines::{odometer_pair, Sturmian};
use crate::classify::ClassParams;
use crate::coding::{code_product_orbit, SymbolWord};
use crate::error::{Error, Result};
use crate::exact::{decimal_half_even, parse_exponent, Exponent};
use crate::fbar::{fbar_exact_symbols, fbar_fast_symbols, Matching};
use crate::orbit::{OrbitState, RankOne, SamplingMode};
use crate::spec::{RankOneSpec, SpecFile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The `1/100` separation line drawn in reports.
pub const THRESHOLD: (u64, u64) = (1, 100);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    /// The staircase `T` and its partner `S`.
    Constructed,
    /// Dyadic times triadic odometer.
    Odometer,
    /// Golden-rotation Sturmian coding.
    Rotation,
}

impl Subject {
    pub fn name(&self) -> &'static str {
        match self {
            Subject::Constructed => "constructed",
            Subject::Odometer => "odometer",
            Subject::Rotation => "rotation",
        }
    }

    fn stream(&self) -> u64 {
        match self {
            Subject::Constructed => 0,
            Subject::Odometer => 1,
            Subject::Rotation => 2,
        }
    }
}

fn default_subjects() -> Vec<Subject> {
    vec![Subject::Constructed, Subject::Odometer, Subject::Rotation]
}

fn default_budget() -> usize {
    100_000
}

fn default_eta() -> String {
    "1/128".into()
}

/// On-disk experiment config. Paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    /// Staircase `T`.
    pub t_spec: PathBuf,
    /// Partner `S`; constructed from `T` when absent.
    #[serde(default)]
    pub s_spec: Option<PathBuf>,
    pub gamma: String,
    pub gamma_prime: String,
    #[serde(default = "default_eta")]
    pub eta: String,
    /// First stage of the class check on `T`.
    #[serde(default = "one")]
    pub n_start: usize,
    /// Stage of the coding partition.
    pub n0: usize,
    /// Word lengths, increasing.
    pub lengths: Vec<usize>,
    pub pairs: usize,
    pub seed: u64,
    /// Rejection-sampling attempts per pair.
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub n1: usize,
    pub n3: usize,
    /// Last stage of the good sets; defaults to the deepest stage of each system.
    #[serde(default)]
    pub last: Option<usize>,
    #[serde(default = "default_subjects")]
    pub subjects: Vec<Subject>,
    /// Word lengths of the `A^k` diagnostic; defaults to the first length.
    #[serde(default)]
    pub atk_lengths: Vec<usize>,
    /// Thinned copies of the optimal matching added per pair.
    #[serde(default)]
    pub perturbations: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn exponent(field: &str, s: &str) -> Result<Exponent> {
    parse_exponent(s).ok_or_else(|| Error::input(format!("bad {field} {s:?}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::input(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.t_spec = base.join(&cfg.t_spec);
        cfg.s_spec = cfg.s_spec.map(|p| base.join(p));
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.lengths.is_empty()
            || self.lengths.windows(2).any(|w| w[0] >= w[1])
            || self.lengths[0] == 0
        {
            return Err(Error::input("lengths must be positive and increasing"));
        }
        if self.n0 == 0 || self.n1 == 0 || self.n3 == 0 {
            return Err(Error::input("stages start at 1"));
        }
        if self.subjects.is_empty() {
            return Err(Error::input("no subjects"));
        }
        for f in [
            ("gamma", &self.gamma),
            ("gamma_prime", &self.gamma_prime),
            ("eta", &self.eta),
        ] {
            exponent(f.0, f.1)?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical rendering, in hex.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("configs always serialize");
        Sha256::digest(text.as_bytes())
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    pub fn class_params(&self) -> Result<ClassParams> {
        ClassParams::new(
            exponent("gamma", &self.gamma)?,
            exponent("gamma_prime", &self.gamma_prime)?,
            self.n_start,
        )
    }

    pub fn partner_params(&self) -> Result<PartnerParams> {
        PartnerParams::new(self.class_params()?, exponent("eta", &self.eta)?)
    }

    pub fn atk_lengths(&self) -> Vec<usize> {
        if self.atk_lengths.is_empty() {
            vec![self.lengths[0]]
        } else {
            self.atk_lengths.clone()
        }
    }

    pub fn max_length(&self) -> usize {
        *self
            .lengths
            .iter()
            .chain(&self.atk_lengths)
            .max()
            .expect("validated")
    }
}

/// Everything a run needs, built once from a config.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub hash: String,
    pub t: RankOne,
    pub s: RankOne,
    pub good_t: GoodSets,
    pub good_s: GoodSets,
    pub trace: Option<PartnerTrace>,
    odometers: (RankOne, RankOne),
}

/// Four start points of one pair: `(x, y)` and `(x', y')`.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum PairPoints {
    Towers {
        x: OrbitState,
        y: OrbitState,
        x_prime: OrbitState,
        y_prime: OrbitState,
    },
    Circle {
        x: u64,
        x_prime: u64,
    },
}

#[derive(Clone, Debug)]
pub struct SampledPair {
    pub subject: Subject,
    pub index: usize,
    pub points: PairPoints,
}

/// Start points as decimal top-tower levels, or circle positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStart {
    pub x: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    pub x_prime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_prime: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FbarRecord {
    pub version: String,
    pub config_hash: String,
    pub subject: Subject,
    pub pair: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Exact value `(k - r)/k` in lowest terms.
    pub fbar: String,
    pub fbar_decimal: String,
    /// Indices `i < N` whose product iterate lies in the good set; constructed pair only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_hits: Option<usize>,
    pub start: PairStart,
}

impl FbarRecord {
    pub fn value(&self) -> Result<Ratio<u64>> {
        let (a, b) = self
            .fbar
            .split_once('/')
            .ok_or_else(|| Error::input(format!("bad fraction {:?}", self.fbar)))?;
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::input(format!("bad fraction {:?}", self.fbar)))
        };
        let den = parse(b)?;
        if den == 0 {
            return Err(Error::input("zero denominator"));
        }
        Ok(Ratio::new(parse(a)?, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtkBucket {
    pub k: u64,
    pub count: usize,
    /// `N / k^2`, as a fraction
    pub bound: String,
    pub over: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtkRecord {
    pub version: String,
    pub config_hash: String,
    pub pair: usize,
    pub n: usize,
    /// `optimal` or `thinned-<i>`.
    pub matching: String,
    pub r: usize,
    pub n0: usize,
    /// Size of `H`.
    pub good: usize,
    pub undecidable: usize,
    pub unscaled: usize,
    /// Total of the buckets below `n0 / 2`.
    pub below_floor: usize,
    pub buckets: Vec<AtkBucket>,
    pub start: PairStart,
}

/// Timing line for the sidecar file.
#[derive(Clone, Debug)]
pub struct Timing {
    pub subject: Subject,
    pub pair: usize,
    pub n: usize,
    pub seconds: f64,
}

/// Subjects with fewer admissible pairs than requested, with the count found.
pub type Shortfall = Vec<(Subject, usize)>;

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub records: Vec<FbarRecord>,
    pub timings: Vec<Timing>,
    pub shortfall: Shortfall,
}

impl SweepOutput {
    pub fn jsonl(&self) -> String {
        to_jsonl(&self.records)
    }

    pub fn timings_tsv(&self) -> String {
        let mut out = String::from("subject\tpair\tn\tseconds\n");
        for t in &self.timings {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.6}",
                t.subject.name(),
                t.pair,
                t.n,
                t.seconds
            );
        }
        out
    }
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

fn rng_for(seed: u64, subject: Subject, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((subject.stream() << 32) | index as u64);
    rng
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_config(ExperimentConfig::read(path)?)
    }

    pub fn from_config(config: ExperimentConfig) -> Result<Self> {
        let t_spec = SpecFile::read(&config.t_spec)?.resolve()?;
        let (s_spec, trace) = match &config.s_spec {
            Some(p) => (SpecFile::read(p)?.resolve()?, None),
            None => {
                let (s, tr) = construct_partner(&t_spec, &config.partner_params()?)?;
                (s, Some(tr))
            }
        };
        Self::from_specs(config, t_spec, s_spec, trace)
    }

    pub fn from_specs(
        config: ExperimentConfig,
        t_spec: RankOneSpec,
        s_spec: RankOneSpec,
        trace: Option<PartnerTrace>,
    ) -> Result<Self> {
        config.validate()?;
        let t = RankOne::new(t_spec);
        let s = RankOne::new(s_spec);
        let gp = |sys: &RankOne| -> Result<GoodSetParams> {
            Ok(GoodSetParams {
                gamma: config.class_params()?.gamma / 3,
                n1: config.n1,
                n3: config.n3,
                last: config.last.map(|l| l.min(sys.max_stage())),
            })
        };
        let good_t = GoodSets::new(&t, gp(&t)?)?;
        let good_s = GoodSets::new(&s, gp(&s)?)?;
        Ok(Experiment {
            hash: config.hash(),
            config,
            t,
            s,
            good_t,
            good_s,
            trace,
            odometers: odometer_pair()?,
        })
    }

    fn factors(&self, subject: Subject) -> (&RankOne, &RankOne) {
        match subject {
            Subject::Odometer => (&self.odometers.0, &self.odometers.1),
            _ => (&self.t, &self.s),
        }
    }

    /// Draws pair `index` of `subject`. Constructed pairs take `(x, y)` from
    /// `F^T x F^S` and `(x', y')` from `D_x x D_y`; baseline pairs are uniform.
    /// `None` when the budget runs out.
    pub fn sample_pair(&self, subject: Subject, index: usize) -> Option<SampledPair> {
        let mut rng = rng_for(self.config.seed, subject, index);
        let need = BigUint::from(self.config.max_length());
        let budget = self.config.budget;
        let points = match subject {
            Subject::Rotation => PairPoints::Circle {
                x: rng.gen(),
                x_prime: rng.gen(),
            },
            _ => {
                let (a, b) = self.factors(subject);
                let filtered = subject == Subject::Constructed;
                let mut tries = 0usize;
                let mut draw =
                    |sys: &RankOne, accept: &dyn Fn(&OrbitState) -> bool| -> Option<OrbitState> {
                        while tries < budget {
                            tries += 1;
                            let p = sys.sample(&mut rng, SamplingMode::Levels);
                            if sys.advance(&p, &need).is_ok() && accept(&p) {
                                return Some(p);
                            }
                        }
                        None
                    };
                let x = draw(a, &|p| !filtered || self.good_t.in_f_all(a, p))?;
                let y = draw(b, &|p| !filtered || self.good_s.in_f_all(b, p))?;
                let x_prime = draw(a, &|p| !filtered || self.good_t.in_d_all(a, &x, p))?;
                let y_prime = draw(b, &|p| !filtered || self.good_s.in_d_all(b, &y, p))?;
                PairPoints::Towers {
                    x,
                    y,
                    x_prime,
                    y_prime,
                }
            }
        };
        Some(SampledPair {
            subject,
            index,
            points,
        })
    }

    /// Coded words of `(x, y)` and `(x', y')` of length `len`.
    pub fn words(&self, pair: &SampledPair, len: usize) -> Result<(SymbolWord, SymbolWord)> {
        match &pair.points {
            PairPoints::Circle { x, x_prime } => {
                let rot = Sturmian::default();
                Ok((rot.code(*x, len), rot.code(*x_prime, len)))
            }
            PairPoints::Towers {
                x,
                y,
                x_prime,
                y_prime,
            } => {
                let (a, b) = self.factors(pair.subject);
                let n0 = self.config.n0;
                Ok((
                    code_product_orbit(a, b, x, y, n0, len)?,
                    code_product_orbit(a, b, x_prime, y_prime, n0, len)?,
                ))
            }
        }
    }

    pub fn start(&self, pair: &SampledPair) -> PairStart {
        match &pair.points {
            PairPoints::Circle { x, x_prime } => PairStart {
                x: x.to_string(),
                y: None,
                x_prime: x_prime.to_string(),
                y_prime: None,
            },
            PairPoints::Towers {
                x,
                y,
                x_prime,
                y_prime,
            } => {
                let (a, b) = self.factors(pair.subject);
                PairStart {
                    x: a.top_level(x).to_string(),
                    y: Some(b.top_level(y).to_string()),
                    x_prime: a.top_level(x_prime).to_string(),
                    y_prime: Some(b.top_level(y_prime).to_string()),
                }
            }
        }
    }

    fn factor_pair<'a>(&'a self, pair: &'a SampledPair) -> Option<(Factor<'a>, Factor<'a>)> {
        match (&pair.points, pair.subject) {
            (
                PairPoints::Towers {
                    x,
                    y,
                    x_prime,
                    y_prime,
                },
                Subject::Constructed,
            ) => Some((
                Factor {
                    sys: &self.t,
                    good: &self.good_t,
                    start: x,
                    start_prime: x_prime,
                },
                Factor {
                    sys: &self.s,
                    good: &self.good_s,
                    start: y,
                    start_prime: y_prime,
                },
            )),
            _ => None,
        }
    }

    /// All admissible pairs of one subject, in index order.
    pub fn pairs(&self, subject: Subject) -> Vec<SampledPair> {
        (0..self.config.pairs)
            .into_par_iter()
            .filter_map(|i| self.sample_pair(subject, i))
            .collect()
    }

    /// f-bar of every pair at every configured length, prefixes of one word pair.
    pub fn fbar_sweep(&self) -> Result<SweepOutput> {
        let mut out = SweepOutput::default();
        let top = *self.config.lengths.last().expect("validated");
        for &subject in &self.config.subjects {
            let pairs = self.pairs(subject);
            if pairs.len() < self.config.pairs {
                out.shortfall.push((subject, pairs.len()));
            }
            let rows: Vec<Result<Vec<(FbarRecord, Timing)>>> = pairs
                .par_iter()
                .map(|pair| {
                    let (a, b) = self.words(pair, top)?;
                    let start = self.start(pair);
                    let flags = match self.factor_pair(pair) {
                        Some((ft, fs)) => Some(good_flags(&ft, &fs, self.config.n0, top)?),
                        None => None,
                    };
                    self.config
                        .lengths
                        .iter()
                        .map(|&n| {
                            let clock = Instant::now();
                            let res = fbar_fast_symbols(&a.symbols[..n], &b.symbols[..n])?;
                            let seconds = clock.elapsed().as_secs_f64();
                            let v = res.value();
                            let hits = flags
                                .as_ref()
                                .map(|f| f[..n].iter().filter(|&&g| g).count());
                            Ok((
                                FbarRecord {
                                    version: VERSION.into(),
                                    config_hash: self.hash.clone(),
                                    subject,
                                    pair: pair.index,
                                    n,
                                    k: res.k,
                                    r: res.r,
                                    fbar: format!("{}/{}", v.numer(), v.denom()),
                                    fbar_decimal: decimal_half_even(
                                        &BigUint::from(*v.numer()),
                                        &BigUint::from(*v.denom()),
                                        6,
                                    ),
                                    good_hits: hits,
                                    start: start.clone(),
                                },
                                Timing {
                                    subject,
                                    pair: pair.index,
                                    n,
                                    seconds,
                                },
                            ))
                        })
                        .collect()
                })
                .collect();
            for row in rows {
                for (rec, t) in row? {
                    out.records.push(rec);
                    out.timings.push(t);
                }
            }
        }
        Ok(out)
    }

    /// `A^k` histograms of the optimal matching, and of thinned copies, for
    /// every constructed pair at every `A^k` length.
    pub fn atk_histograms(&self) -> Result<(Vec<AtkRecord>, Shortfall)> {
        let pairs = self.pairs(Subject::Constructed);
        let mut shortfall = Vec::new();
        if pairs.len() < self.config.pairs {
            shortfall.push((Subject::Constructed, pairs.len()));
        }
        let lengths = self.config.atk_lengths();
        let top = *lengths.iter().max().expect("nonempty");
        let rows: Vec<Result<Vec<AtkRecord>>> = pairs
            .par_iter()
            .map(|pair| {
                let (a, b) = self.words(pair, top)?;
                let (ft, fs) = self.factor_pair(pair).expect("constructed pair");
                let start = self.start(pair);
                let mut recs = Vec::new();
                for &n in &lengths {
                    let res = fbar_exact_symbols(&a.symbols[..n], &b.symbols[..n], true)?;
                    let optimal = res.matching.expect("requested");
                    let mut rng =
                        rng_for(self.config.seed ^ 0xA7C0, Subject::Constructed, pair.index);
                    let mut sources = vec![("optimal".to_string(), optimal.clone())];
                    for i in 0..self.config.perturbations {
                        sources.push((format!("thinned-{i}"), thin(&optimal, &mut rng)));
                    }
                    for (name, theta) in sources {
                        let classes = classify_matching(&theta, &ft, &fs, self.config.n0)?;
                        let h = AtkHistogram::from_classes(self.config.n0, &classes);
                        recs.push(self.atk_record(pair.index, n, name, &h, start.clone()));
                    }
                }
                Ok(recs)
            })
            .collect();
        let mut out = Vec::new();
        for r in rows {
            out.extend(r?);
        }
        Ok((out, shortfall))
    }

    fn atk_record(
        &self,
        pair: usize,
        n: usize,
        matching: String,
        h: &AtkHistogram,
        start: PairStart,
    ) -> AtkRecord {
        let floor = below_floor(self.config.n0);
        let over = h.over_bound(n as u64);
        AtkRecord {
            version: VERSION.into(),
            config_hash: self.hash.clone(),
            pair,
            n,
            matching,
            r: h.r,
            n0: h.n0,
            good: h.good,
            undecidable: h.undecidable,
            unscaled: h.unscaled,
            below_floor: h.counts.range(..floor).map(|(_, c)| c).sum(),
            buckets: h
                .counts
                .iter()
                .map(|(&k, &count)| AtkBucket {
                    k,
                    count,
                    bound: if k == 0 {
                        "inf".into()
                    } else {
                        let b = Ratio::new(n as u128, (k as u128) * (k as u128));
                        format!("{}/{}", b.numer(), b.denom())
                    },
                    over: over.contains(&k),
                })
                .collect(),
            start,
        }
    }
}

/// Smallest `k` not below `n0 / 2`.
pub fn below_floor(n0: usize) -> u64 {
    n0.div_ceil(2) as u64
}

/// Keeps each pair with probability one half.
pub fn thin<R: Rng>(theta: &Matching, rng: &mut R) -> Matching {
    Matching::new(
        theta
            .pairs
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect(),
    )
}

/// One row of the summary table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub subject: Subject,
    pub n: usize,
    pub pairs: usize,
    pub median: Ratio<u64>,
    pub min: Ratio<u64>,
}

/// Median (mean of the two middle values for even counts) and minimum of f-bar
/// per subject and length.
pub fn summarize(records: &[FbarRecord]) -> Result<Vec<SummaryRow>> {
    let mut groups: BTreeMap<(Subject, usize), Vec<Ratio<u64>>> = BTreeMap::new();
    for r in records {
        groups.entry((r.subject, r.n)).or_default().push(r.value()?);
    }
    Ok(groups
        .into_iter()
        .map(|((subject, n), mut v)| {
            v.sort();
            let m = v.len();
            let median = if m % 2 == 1 {
                v[m / 2]
            } else {
                (v[m / 2 - 1] + v[m / 2]) / Ratio::from_integer(2)
            };
            SummaryRow {
                subject,
                n,
                pairs: m,
                median,
                min: v[0],
            }
        })
        .collect())
}

pub fn read_records(text: &str) -> Result<Vec<FbarRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::input(format!("bad record: {e}"))))
        .collect()
}

fn dec(r: &Ratio<u64>) -> String {
    decimal_half_even(&BigUint::from(*r.numer()), &BigUint::from(*r.denom()), 6)
}

/// Tab-separated summary with decimals rounded half-even to 6 places.
pub fn report_tsv(rows: &[SummaryRow]) -> String {
    let threshold = Ratio::new(THRESHOLD.0, THRESHOLD.1);
    let mut out =
        String::from("subject\tn\tpairs\tmedian\tmedian_exact\tmin\tmin_exact\tthreshold\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}/{}\t{}\t{}/{}\t{}",
            r.subject.name(),
            r.n,
            r.pairs,
            dec(&r.median),
            r.median.numer(),
            r.median.denom(),
            dec(&r.min),
            r.min.numer(),
            r.min.denom(),
            dec(&threshold),
        );
    }
    out
}

/// Gnuplot script drawing median f-bar against `N` per subject, reading `table`.
pub fn plot_script(rows: &[SummaryRow], table: &str) -> String {
    let mut subjects: Vec<Subject> = rows.iter().map(|r| r.subject).collect();
    subjects.dedup();
    let mut out = String::new();
    let _ = writeln!(out, "set terminal pngcairo size 900,600");
    let _ = writeln!(out, "set output 'fbar_medians.png'");
    let _ = writeln!(out, "set datafile separator '\\t'");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set logscale x");
    let _ = writeln!(out, "set xlabel 'N'");
    let _ = writeln!(out, "set ylabel 'median f-bar'");
    let plots: Vec<String> = subjects
        .iter()
        .map(|s| {
            format!(
                "'{table}' using ($1 eq '{0}' ? $2 : 1/0):4 with linespoints title '{0}'",
                s.name()
            )
        })
        .chain(std::iter::once(format!(
            "{} with lines dashtype 2 title 'threshold'",
            dec(&Ratio::new(THRESHOLD.0, THRESHOLD.1))
        )))
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}

/// Manifest line for batch f-bar: two word files and an optional prefix length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub left: PathBuf,
    pub right: PathBuf,
    pub prefix: Option<usize>,
}

/// Tab-separated `left right [prefix]` lines; `#` starts a comment.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split('\t').collect();
            match parts.as_slice() {
                [a, b] | [a, b, _] => Ok(ManifestEntry {
                    left: base.join(a),
                    right: base.join(b),
                    prefix: match parts.get(2) {
                        Some(p) => Some(
                            p.parse()
                                .map_err(|_| Error::input(format!("bad prefix in {l:?}")))?,
                        ),
                        None => None,
                    },
                }),
                _ => Err(Error::input(format!("bad manifest line {l:?}"))),
            }
        })
        .collect()
}
