use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use rankone::alternating::{
    construct_partner, intermediate_chain_check, verify_partner, ChainParams, ChainReport,
    PartnerParams,
};
use rankone::analysis::goodsets::GoodSets;
use rankone::analysis::probes::{lemma_separation_probe, Lemma, ProbeParams};
use rankone::classify::{classify, ClassParams};
use rankone::coding::SymbolWord;
use rankone::exact::{parse_exponent, ratio_string, Exponent};
use rankone::experiment::{
    parse_manifest, plot_script, read_records, report_tsv, summarize, to_jsonl, Experiment,
    ExperimentConfig,
};
use rankone::fbar::{fbar_bounds, fbar_exact_symbols, fbar_fast_symbols};
use rankone::orbit::{RankOne, SamplingMode};
use rankone::spec::{RankOneSpec, SpecFile};
use rankone::stats::compute_stats;
use rankone::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rankone",
    version,
    about = "Rank-one systems, staircase partners and f-bar diagnostics"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed; overrides config seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncate specs to this many stages.
    #[arg(long, global = true)]
    max_stage: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Args, Clone)]
struct ClassArgs {
    #[arg(long, default_value = "21/100")]
    gamma: String,
    #[arg(long, default_value = "3/10")]
    gamma_prime: String,
    /// First stage checked (`n'_T` for the partner construction).
    #[arg(long, default_value_t = 5)]
    n_start: usize,
}

impl ClassArgs {
    fn params(&self) -> Result<ClassParams> {
        ClassParams::new(
            exponent(&self.gamma)?,
            exponent(&self.gamma_prime)?,
            self.n_start,
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Fast,
    Bounds,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a spec file into explicit cuts.
    BuildSpec {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heights, cut products, spacer mass and K.
    Stats { spec: PathBuf },
    /// Stage-by-stage membership in C_(gamma,gamma').
    Classify {
        spec: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Build the staircase partner S of T.
    ConstructPartner {
        spec: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value = "1/128")]
        eta: String,
        /// No spacers on the p = 2 prefix.
        #[arg(long)]
        zero_prefix: bool,
        /// Where S goes; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check that S is a staircase partner of T.
    VerifyPartner {
        t: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Cut-product and height inequalities between T and S.
    ChainCheck {
        t: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value = "1/128")]
        eta: String,
    },
    /// Sample points of the top tower.
    Sample {
        spec: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Mode::Levels)]
        mode: Mode,
    },
    /// Code an orbit, or a product orbit with --partner, as a word file.
    Code {
        spec: PathBuf,
        #[arg(long)]
        stage: usize,
        #[arg(long)]
        len: usize,
        /// Top-tower level of the start point; sampled when absent.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        partner: Option<PathBuf>,
        #[arg(long)]
        partner_start: Option<String>,
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// f-bar between two word files, or every line of a manifest.
    Fbar {
        #[arg(required_unless_present = "manifest")]
        left: Option<PathBuf>,
        #[arg(required_unless_present = "manifest")]
        right: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Fast)]
        method: Method,
        #[arg(long, default_value_t = 64)]
        band: i64,
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// f-bar records for every pair and length of an experiment config.
    FbarSweep { config: PathBuf },
    /// A^k histograms of the constructed pair.
    AtkHistogram { config: PathBuf },
    /// Sampled separation checks on the good sets of T and S.
    ProbeLemmas {
        config: PathBuf,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        /// Stages to probe; defaults to n1 up to the last stage of each system.
        #[arg(long, value_delimiter = ',')]
        stages: Vec<usize>,
        #[arg(long)]
        xi: Option<String>,
    },
    /// Summary table and plot script from f-bar records.
    Report { records: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Levels,
    Columns,
}

/// Exit status: 0 success, 2 a check failed, 3 bad input.
enum Outcome {
    Ok,
    Failed,
}

fn exponent(s: &str) -> Result<Exponent> {
    parse_exponent(s).ok_or_else(|| Error::MalformedInput(format!("bad exponent {s:?}")))
}

fn biguint(s: &str) -> Result<num_bigint::BigUint> {
    s.parse()
        .map_err(|_| Error::MalformedInput(format!("bad integer {s:?}")))
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn spec(&self, path: &Path) -> Result<RankOneSpec> {
        let mut file = SpecFile::read(path)?;
        if let Some(m) = self.global.max_stage {
            file.max_stage = m;
        }
        file.resolve()
    }

    fn emit<T: Serialize>(&self, text: impl FnOnce() -> String, record: &T) {
        let line = match self.global.format {
            Format::Text => text(),
            Format::Records => serde_json::to_string(record).expect("records serialize") + "\n",
        };
        // a closed pipe is not an error
        let _ = std::io::stdout().write_all(line.as_bytes());
    }

    fn out_dir(&self, fallback: Option<&PathBuf>) -> Result<PathBuf> {
        let dir = self
            .global
            .out_dir
            .clone()
            .or_else(|| fallback.cloned())
            .unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn experiment(&self, path: &Path) -> Result<Experiment> {
        let mut cfg = ExperimentConfig::read(path)?;
        if let Some(seed) = self.global.seed {
            cfg.seed = seed;
        }
        let t = self.spec(&cfg.t_spec)?;
        let (s, trace) = match &cfg.s_spec {
            Some(p) => (self.spec(p)?, None),
            None => {
                let (s, tr) = construct_partner(&t, &cfg.partner_params()?)?;
                (s, Some(tr))
            }
        };
        Experiment::from_specs(cfg, t, s, trace)
    }
}

fn write_or_print(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn read_word(path: &Path) -> Result<SymbolWord> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"#") {
        SymbolWord::from_text(
            std::str::from_utf8(&bytes)
                .map_err(|_| Error::MalformedInput("word file is not UTF-8".into()))?,
        )
    } else {
        SymbolWord::read_binary(&bytes[..])
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let ctx = Ctx { global: cli.global };
    match cli.command {
        Command::BuildSpec { spec, out } => {
            let s = ctx.spec(&spec)?;
            write_or_print(out.as_deref(), s.to_file().to_canonical_string().as_bytes())?;
            Ok(Outcome::Ok)
        }
        Command::Stats { spec } => {
            let s = ctx.spec(&spec)?;
            let st = compute_stats(&s);
            let rec = json!({
                "label": s.label(),
                "max_stage": s.max_stage(),
                "heights": st.heights.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                "cut_products": st.cut_products.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                "eps": st.eps.iter().map(ratio_string).collect::<Vec<_>>(),
                "eps_sum": ratio_string(&st.eps_sum),
                "k_bound": ratio_string(&st.k_bound),
            });
            ctx.emit(
                || {
                    let mut t = format!("{} (max stage {})\n", s.label(), s.max_stage());
                    for (n, h) in st.heights.iter().enumerate() {
                        t += &format!(
                            "h_{} = {} ({} bits)\n",
                            n + 1,
                            if h.bits() <= 256 {
                                h.to_string()
                            } else {
                                "..".into()
                            },
                            h.bits()
                        );
                    }
                    t + &format!(
                        "eps_sum = {}\nK = {}\n",
                        ratio_string(&st.eps_sum),
                        ratio_string(&st.k_bound)
                    )
                },
                &rec,
            );
            Ok(Outcome::Ok)
        }
        Command::Classify { spec, class } => {
            let s = ctx.spec(&spec)?;
            let report = classify(&s, &compute_stats(&s), &class.params()?);
            let verdict = report.verdict();
            ctx.emit(
                || {
                    let mut t = String::new();
                    for r in &report.rows {
                        t += &format!(
                            "stage {:>3}  cut {:5}  increasing {:5}  bounded {:5}\n",
                            r.stage, r.cut_in_window, r.spacers_increasing, r.last_spacer_bounded
                        );
                    }
                    t + &format!("verdict {verdict}\n")
                },
                &json!({"verdict": verdict, "member_from": report.member_from(), "report": report}),
            );
            Ok(if verdict {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::ConstructPartner {
            spec,
            class,
            eta,
            zero_prefix,
            out,
            trace,
        } => {
            let t = ctx.spec(&spec)?;
            let mut params = PartnerParams::new(class.params()?, exponent(&eta)?)?;
            params.zero_prefix = zero_prefix;
            let (s, tr) = construct_partner(&t, &params)?;
            write_or_print(out.as_deref(), s.to_file().to_canonical_string().as_bytes())?;
            if let Some(p) = trace {
                fs::write(p, tr.to_json())?;
            }
            Ok(Outcome::Ok)
        }
        Command::VerifyPartner { t, s, class } => {
            let (t, s) = (ctx.spec(&t)?, ctx.spec(&s)?);
            let r = verify_partner(&t, &s, &class.params()?)?;
            let (ab, ba) = (&r.alternation.b_wrt_a, &r.alternation.a_wrt_b);
            ctx.emit(
                || {
                    format!(
                        "staircase {}\ncut windows from {:?}\nclass S from {:?}\nclass T from {:?}\nalternation thresholds {} {}\npasses {}\n",
                        r.staircase(),
                        r.cut_threshold,
                        r.class_s_from,
                        r.class_t_from,
                        ab.threshold(),
                        ba.threshold(),
                        r.passes()
                    )
                },
                &json!({"passes": r.passes(), "report": r}),
            );
            Ok(if r.passes() {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::ChainCheck { t, s, class, eta } => {
            let (t, s) = (ctx.spec(&t)?, ctx.spec(&s)?);
            let c = class.params()?;
            let r = intermediate_chain_check(
                &t,
                &s,
                &ChainParams {
                    gamma: c.gamma,
                    gamma_prime: c.gamma_prime,
                    eta: exponent(&eta)?,
                    from: 1,
                },
            );
            let settle = [
                ChainReport::settles(&r.left),
                ChainReport::settles(&r.right),
                ChainReport::settles(&r.height_bound),
            ];
            ctx.emit(
                || format!("left from {:?}\nright from {:?}\nheight bound from {:?}\n", settle[0], settle[1], settle[2]),
                &json!({"left_from": settle[0], "right_from": settle[1], "height_bound_from": settle[2], "report": r}),
            );
            Ok(if settle.iter().all(Option::is_some) {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::Sample { spec, count, mode } => {
            let sys = RankOne::new(ctx.spec(&spec)?);
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed.unwrap_or(0));
            let mode = match mode {
                Mode::Levels => SamplingMode::Levels,
                Mode::Columns => SamplingMode::Columns,
            };
            for _ in 0..count {
                let st = sys.sample(&mut rng, mode);
                let top = sys.top_level(&st).to_string();
                ctx.emit(
                    || {
                        let cols: Vec<String> =
                            st.address.columns().iter().map(|c| c.to_string()).collect();
                        format!("level {top}  columns [{}]\n", cols.join(", "))
                    },
                    &json!({"top_level": top, "state": st}),
                );
            }
            Ok(Outcome::Ok)
        }
        Command::Code {
            spec,
            stage,
            len,
            start,
            partner,
            partner_start,
            binary,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.global.seed.unwrap_or(0));
            let mut point = |sys: &RankOne, level: &Option<String>| -> Result<_> {
                match level {
                    Some(l) => sys.decode(&biguint(l)?),
                    None => Ok(sys.sample(&mut rng, SamplingMode::Levels)),
                }
            };
            let a = RankOne::new(ctx.spec(&spec)?);
            let x = point(&a, &start)?;
            let word = match partner {
                Some(p) => {
                    let b = RankOne::new(ctx.spec(&p)?);
                    let y = point(&b, &partner_start)?;
                    rankone::coding::code_product_orbit(&a, &b, &x, &y, stage, len)?
                }
                None => a.code_orbit(&x, stage, len)?,
            };
            let mut bytes = Vec::new();
            if binary {
                word.write_binary(&mut bytes)?;
            } else {
                bytes = word.to_text().into_bytes();
            }
            write_or_print(out.as_deref(), &bytes)?;
            Ok(Outcome::Ok)
        }
        Command::Fbar {
            left,
            right,
            manifest,
            method,
            band,
            prefix,
        } => {
            let jobs = match manifest {
                Some(m) => parse_manifest(
                    &fs::read_to_string(&m)?,
                    m.parent().unwrap_or(Path::new(".")),
                )?,
                None => vec![rankone::experiment::ManifestEntry {
                    left: left.expect("required"),
                    right: right.expect("required"),
                    prefix,
                }],
            };
            for job in jobs {
                let (a, b) = (read_word(&job.left)?, read_word(&job.right)?);
                let n = job.prefix.or(prefix).unwrap_or(a.len().min(b.len()));
                if n > a.len() || n > b.len() {
                    return Err(Error::MalformedInput(format!(
                        "prefix {n} is longer than a word"
                    )));
                }
                let (a, b) = (&a.symbols[..n], &b.symbols[..n]);
                let clock = Instant::now();
                let rec = match method {
                    Method::Exact | Method::Fast => {
                        let r = if method == Method::Exact {
                            fbar_exact_symbols(a, b, false)?
                        } else {
                            fbar_fast_symbols(a, b)?
                        };
                        let v = r.value();
                        json!({"left": job.left, "right": job.right, "k": r.k, "r": r.r, "fbar": format!("{}/{}", v.numer(), v.denom())})
                    }
                    Method::Bounds => {
                        let r = fbar_bounds(a, b, band)?;
                        json!({"left": job.left, "right": job.right, "k": n, "lower": r.lower.to_string(), "upper": r.upper.to_string()})
                    }
                };
                ctx.emit(
                    || {
                        format!(
                            "{} {} {} ({:.3}s)\n",
                            job.left.display(),
                            job.right.display(),
                            rec.get("fbar")
                                .map(|v| v.as_str().unwrap_or("").to_string())
                                .unwrap_or_else(|| format!(
                                    "[{}, {}]",
                                    rec["lower"].as_str().unwrap_or(""),
                                    rec["upper"].as_str().unwrap_or("")
                                )),
                            clock.elapsed().as_secs_f64()
                        )
                    },
                    &rec,
                );
            }
            Ok(Outcome::Ok)
        }
        Command::FbarSweep { config } => {
            let exp = ctx.experiment(&config)?;
            let dir = ctx.out_dir(exp.config.out_dir.as_ref())?;
            let out = exp.fbar_sweep()?;
            fs::write(dir.join("records.jsonl"), out.jsonl())?;
            fs::write(dir.join("timings.tsv"), out.timings_tsv())?;
            let rows = summarize(&out.records)?;
            ctx.emit(
                || report_tsv(&rows),
                &json!({"records": out.records.len(), "shortfall": out.shortfall.iter().map(|(s, n)| json!({"subject": s, "admissible": n})).collect::<Vec<_>>()}),
            );
            for (s, n) in &out.shortfall {
                eprintln!(
                    "{}",
                    json!({"warning": "partial", "subject": s, "admissible": n, "requested": exp.config.pairs})
                );
            }
            Ok(if out.shortfall.is_empty() {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::AtkHistogram { config } => {
            let exp = ctx.experiment(&config)?;
            let dir = ctx.out_dir(exp.config.out_dir.as_ref())?;
            let (recs, shortfall) = exp.atk_histograms()?;
            fs::write(dir.join("atk.jsonl"), to_jsonl(&recs))?;
            for r in &recs {
                ctx.emit(
                    || {
                        let buckets: Vec<String> = r.buckets.iter().map(|b| format!("{}:{}{}", b.k, b.count, if b.over { "!" } else { "" })).collect();
                        format!(
                            "pair {} n {} {}  r {} H {} undecidable {} unscaled {} below-floor {}  {}\n",
                            r.pair, r.n, r.matching, r.r, r.good, r.undecidable, r.unscaled, r.below_floor, buckets.join(" ")
                        )
                    },
                    r,
                );
            }
            Ok(if shortfall.is_empty() {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::ProbeLemmas {
            config,
            budget,
            stages,
            xi,
        } => {
            let exp = ctx.experiment(&config)?;
            let c = exp.config.class_params()?;
            let xi = match xi {
                Some(x) => exponent(&x)?,
                None => default_xi(c.gamma, c.gamma_prime),
            };
            let systems: [(&str, &RankOne, &GoodSets); 2] =
                [("T", &exp.t, &exp.good_t), ("S", &exp.s, &exp.good_s)];
            for (name, sys, good) in systems {
                let list: Vec<usize> = if stages.is_empty() {
                    (exp.config.n1.max(2)..sys.max_stage()).collect()
                } else {
                    stages
                        .iter()
                        .copied()
                        .filter(|&n| n < sys.max_stage())
                        .collect()
                };
                for n in list {
                    for lemma in Lemma::ALL {
                        let params = ProbeParams {
                            n,
                            xi,
                            budget,
                            seed: exp.config.seed ^ ((n as u64) << 8),
                        };
                        let r = lemma_separation_probe(sys, good, lemma, &params)?;
                        ctx.emit(
                            || {
                                format!(
                                    "{name} {:<9} n {:>3}  pairs {:>5}  checks {:>6}  violations {}{}\n",
                                    lemma.name(),
                                    n,
                                    r.admissible_pairs,
                                    r.checks,
                                    r.violations.len(),
                                    if r.inconclusive() { "  inconclusive" } else { "" }
                                )
                            },
                            &json!({"system": name, "report": r, "inconclusive": r.inconclusive()}),
                        );
                    }
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Report { records } => {
            let recs = read_records(&fs::read_to_string(&records)?)?;
            if recs.is_empty() {
                return Ok(Outcome::Failed);
            }
            let rows = summarize(&recs)?;
            let dir = ctx.out_dir(records.parent().map(Path::to_path_buf).as_ref())?;
            let table = report_tsv(&rows);
            fs::write(dir.join("report.tsv"), &table)?;
            fs::write(dir.join("plot.gp"), plot_script(&rows, "report.tsv"))?;
            ctx.emit(
                || table.clone(),
                &json!({"rows": rows.len(), "table": dir.join("report.tsv")}),
            );
            Ok(Outcome::Ok)
        }
    }
}

/// `min(gamma, 1 - gamma', gamma/4) / 100`
fn default_xi(gamma: Exponent, gamma_prime: Exponent) -> Exponent {
    let delta = gamma / 4;
    gamma.min(Exponent::from(1) - gamma_prime).min(delta) / 100
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::MalformedSpec(_) => "malformed-spec",
        Error::MalformedInput(_) => "malformed-input",
        Error::OrbitEscape { .. } => "orbit-escape",
        Error::StageOutOfRange { .. } => "stage-out-of-range",
        Error::Domain(_) => "domain",
        Error::ConstructionFailure { .. } => "construction-failure",
        Error::Hypothesis(_) => "hypothesis",
        Error::Io(_) => "io",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConstructionFailure { .. } | Error::Hypothesis(_) | Error::OrbitEscape { .. } => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": "usage", "message": e.to_string().trim(), "exit": 3})
            );
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            let code = exit_code(&e);
            eprintln!(
                "{}",
                json!({"error": error_kind(&e), "message": e.to_string(), "exit": code})
            );
            ExitCode::from(code)
        }
    }
}
