//! `pnx`: command-line access to the exact engine.
//!
//! Exit codes: 0 success, 1 a checked assertion failed, 2 usage or input error.

pub mod campaign;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use pnx_core::kms::{self, BoundaryMeasure, InverseTemperature};
use pnx_core::regular_rep::Carrier;
use pnx_core::relations::{primes_up_to, relation_suite};
use pnx_core::semigroup::{cup, minimal_common_upper_bounds, CupResult, PNElement, QQElement};
use pnx_core::{GenWord, WMonomial};

pub use campaign::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "pnx",
    version,
    about = "Exact computations in the Toeplitz algebra of P x| N^x"
)]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least common upper bound `left cup right` with its quotients.
    Cup(Pair),
    /// Is `left <= right` in Q x| Q*_+? Elements are `r,x` with rationals `p/q`.
    Order {
        #[arg(long)]
        left: QQElement,
        #[arg(long)]
        right: QQElement,
    },
    /// Minimal common upper bounds within `k, c <= bound`.
    Mub {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
    /// Normal form of a generator word such as "v3* t^2 v3".
    Reduce {
        #[arg(allow_hyphen_values = true)]
        word: Option<String>,
        #[arg(long = "word", conflicts_with = "word")]
        word_flag: Option<String>,
    },
    /// KMS functionals.
    #[command(subcommand)]
    Kms(KmsCommand),
    /// Relation suite and regular-representation cross-checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long)]
    pub left: PNElement,
    #[arg(long)]
    pub right: PNElement,
}

#[derive(Debug, Args)]
pub struct Campaign {
    #[arg(long, default_value = "2")]
    pub beta: InverseTemperature,
    /// Boundary measure as a JSON file; Lebesgue when omitted.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub max_m: u64,
    #[arg(long, default_value_t = 20)]
    pub max_a: u64,
}

#[derive(Debug, Subcommand)]
pub enum KmsCommand {
    /// phi_beta of a monomial given as a word or as --left/--right.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        #[arg(long, requires = "right", conflicts_with = "word")]
        left: Option<PNElement>,
        #[arg(long, requires = "left")]
        right: Option<PNElement>,
        #[arg(long, default_value = "2")]
        beta: InverseTemperature,
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// phi(xy) = phi(y sigma_{i beta}(x)) on random monomial pairs.
    Check(Campaign),
    /// Smallest eigenvalues of Gram matrices phi(x_i^* x_j) of random sets.
    Gram {
        #[command(flatten)]
        campaign: Campaign,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
    },
    /// (a-1) a^{-beta} for the orthogonal projections W_(k,a) W*_(k,a).
    Obstruction {
        #[arg(long)]
        a: BigInt,
        #[arg(long, default_value = "1")]
        beta: InverseTemperature,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CarrierArg {
    Semigroup,
    Integers,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Reduce both sides of every presentation identity.
    Relations {
        #[arg(long, value_delimiter = ',', conflicts_with = "prime_bound")]
        primes: Option<Vec<u64>>,
        #[arg(long, default_value_t = 13)]
        prime_bound: u64,
        #[arg(long, default_value_t = 30)]
        composite_bound: u64,
    },
    /// Compare symbolic reduction with truncated regular-representation matrices.
    Rep {
        #[arg(long, value_parser = parse_slice, default_value = "80,42")]
        slice: (u64, u64),
        #[arg(long, value_enum, default_value = "semigroup")]
        carrier: CarrierArg,
        #[arg(long, value_delimiter = ',', conflicts_with = "prime_bound")]
        primes: Option<Vec<u64>>,
        #[arg(long, default_value_t = 13)]
        prime_bound: u64,
        #[arg(long, default_value_t = 30)]
        composite_bound: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_m: u64,
        #[arg(long, default_value_t = 8)]
        max_a: u64,
    },
}

fn parse_slice(s: &str) -> Result<(u64, u64), String> {
    let (m, a) = s.split_once(',').ok_or("expected M,A")?;
    let m = m.trim().parse().map_err(|e| format!("M: {e}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("A: {e}"))?;
    if a == 0 {
        return Err("A must be at least 1".into());
    }
    Ok((m, a))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pnx_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Result of a command: the rendered report and whether its assertions held.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn info(json: Value, text: String) -> Self {
        Outcome { ok: true, json, text }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("reports serialize")
        } else {
            self.text.clone()
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn load_measure(path: &Option<PathBuf>) -> Result<BoundaryMeasure, CliError> {
    match path {
        None => Ok(BoundaryMeasure::Lebesgue),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            Ok(BoundaryMeasure::from_json(&text)?)
        }
    }
}

fn check_primes(primes: &[u64]) -> Result<(), CliError> {
    match primes.iter().find(|&&p| primes_up_to(p).last() != Some(&p)) {
        Some(p) => Err(CliError::Usage(format!("{p} is not prime"))),
        None => Ok(()),
    }
}

fn config(c: &Campaign, json: bool) -> Result<RunConfig, CliError> {
    if c.trials == 0 || c.max_a == 0 {
        return Err(CliError::Usage("--trials and --max-a must be positive".into()));
    }
    Ok(RunConfig {
        seed: c.seed,
        max_m: c.max_m,
        max_a: c.max_a,
        beta: c.beta.clone(),
        measure: load_measure(&c.measure)?,
        trials: c.trials,
        json,
        ..RunConfig::default()
    })
}

fn monomial_text(x: &Option<WMonomial>) -> String {
    match x {
        Some(x) => format!("{x} [{}]", x.to_generator_word()),
        None => "0".into(),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Cup(Pair { left, right }) => {
            let r = cup(left, right);
            let text = match &r {
                CupResult::Infinite => format!("{left} cup {right} = infinite (no common upper bound)\n"),
                CupResult::Finite {
                    sigma,
                    alpha,
                    beta,
                    left_quot,
                    right_quot,
                } => format!(
                    "sigma {sigma}\nalpha {alpha}\nbeta {beta}\nleft_quot {left_quot}\nright_quot {right_quot}\n"
                ),
            };
            Ok(Outcome::info(json!({"left": left, "right": right, "cup": r}), text))
        }
        Command::Order { left, right } => {
            let v = left.leq(right);
            Ok(Outcome::info(
                json!({"left": left.to_string(), "right": right.to_string(), "leq": v}),
                format!("{v}\n"),
            ))
        }
        Command::Mub { pair, bound } => {
            if *bound == 0 {
                return Err(CliError::Usage("--bound must be positive".into()));
            }
            let r = minimal_common_upper_bounds(&pair.left, &pair.right, *bound);
            let list: Vec<String> = r.elements.iter().map(ToString::to_string).collect();
            let text = format!(
                "{}\n(minimal within k, c <= {bound}; {} element(s))\n",
                if list.is_empty() {
                    "none".to_string()
                } else {
                    list.join(" ")
                },
                list.len()
            );
            Ok(Outcome::info(to_json(&r), text))
        }
        Command::Reduce { word, word_flag } => {
            let text = word.as_deref().or(word_flag.as_deref()).unwrap_or("");
            let w = GenWord::parse(text)?;
            let x = w.to_monomial();
            Ok(Outcome::info(
                json!({
                    "word": w.to_string(),
                    "zero": x.is_none(),
                    "left": x.as_ref().map(|x| x.left()),
                    "right": x.as_ref().map(|x| x.right()),
                    "generators": x.as_ref().map(|x| x.to_generator_word()),
                }),
                format!("{}\n", monomial_text(&x)),
            ))
        }
        Command::Kms(k) => run_kms(k, cli.json),
        Command::Verify(v) => run_verify(v, cli.json),
    }
}

fn run_kms(cmd: &KmsCommand, json: bool) -> Result<Outcome, CliError> {
    match cmd {
        KmsCommand::Eval {
            word,
            left,
            right,
            beta,
            measure,
        } => {
            let omega = load_measure(measure)?;
            let x = match (word, left, right) {
                (Some(w), _, _) => GenWord::parse(w)?.to_monomial(),
                (None, Some(l), Some(r)) => Some(WMonomial::new(l.clone(), r.clone())),
                _ => return Err(CliError::Usage("give --word or both --left and --right".into())),
            };
            let b = beta.to_f64();
            let exact = match &x {
                None => Some(pnx_core::BetaValue::zero()),
                Some(x) => match kms::kms_value(x, &omega) {
                    Ok(v) => Some(v),
                    Err(pnx_core::Error::NonExactMeasure(_)) => None,
                    Err(e) => return Err(e.into()),
                },
            };
            let numeric = x.as_ref().map_or(pnx_core::BetaValue::zero().eval(b), |x| {
                kms::kms_value_f64(x, b, &omega)
            });
            let mut text = format!("x = {}\n", monomial_text(&x));
            if let Some(v) = &exact {
                writeln!(text, "phi(x) = {v}").unwrap();
            }
            writeln!(text, "phi(x) at beta = {beta}: {} + {}i", numeric.re, numeric.im).unwrap();
            Ok(Outcome::info(
                json!({
                    "monomial": x.as_ref().map(ToString::to_string),
                    "beta": beta.to_string(),
                    "measure": omega,
                    "exact": exact,
                    "value": [numeric.re, numeric.im],
                }),
                text,
            ))
        }
        KmsCommand::Check(c) => {
            let cfg = config(c, json)?;
            let r = campaign::kms_check_campaign(&cfg)?;
            let text = format!(
                "KMS condition at beta = {} ({} mode): {}/{} pairs pass, {} with non-zero value, max |delta| = {:e}\n",
                r.beta, r.mode, r.passed, r.trials, r.nontrivial, r.max_float_delta
            );
            Ok(Outcome {
                ok: r.failures.is_empty(),
                json: to_json(&r),
                text,
            })
        }
        KmsCommand::Gram { campaign, max_size } => {
            let cfg = config(campaign, json)?;
            let r = campaign::gram_campaign(&cfg, *max_size);
            let text = format!(
                "{} Gram matrices (size <= {}) at beta = {}: min eigenvalue {:e}, {} below -{:e}{}\n",
                r.sets,
                r.max_size,
                r.beta,
                r.min_eigenvalue,
                r.negative.len(),
                r.tolerance,
                if r.asserted { "" } else { " (reported, not asserted)" }
            );
            Ok(Outcome {
                ok: r.passed(),
                json: to_json(&r),
                text,
            })
        }
        KmsCommand::Obstruction { a, beta } => {
            let o = kms::beta_obstruction(a, beta.to_f64())?;
            let text = format!(
                "a = {}, beta = {}: {} orthogonal projections ({} pairs checked{}), value (a-1) a^-beta = {}, violated = {}\n",
                o.a,
                o.beta,
                o.count,
                o.orthogonal_pairs_checked,
                if o.orthogonality_exhaustive { ", exhaustive" } else { ", sampled" },
                o.value_f64,
                o.violated
            );
            Ok(Outcome::info(to_json(&o), text))
        }
    }
}

fn run_verify(cmd: &VerifyCommand, json: bool) -> Result<Outcome, CliError> {
    match cmd {
        VerifyCommand::Relations {
            primes,
            prime_bound,
            composite_bound,
        } => {
            let primes = primes.clone().unwrap_or_else(|| primes_up_to(*prime_bound));
            check_primes(&primes)?;
            let r = relation_suite(&primes, *composite_bound);
            let mut text = format!(
                "{} identities checked (primes {:?}, indices <= {}), {} failure(s)\n",
                r.checked,
                r.primes,
                r.composite_bound,
                r.failures.len()
            );
            for f in &r.failures {
                let value = |v: &Option<WMonomial>| v.as_ref().map_or("0".into(), ToString::to_string);
                writeln!(
                    text,
                    "FAIL {} {:?}: {} = {}  [{} vs {}]",
                    f.label,
                    f.params,
                    f.lhs,
                    f.rhs,
                    value(&f.lhs_value),
                    value(&f.rhs_value)
                )
                .unwrap();
            }
            Ok(Outcome {
                ok: r.passed(),
                json: to_json(&r),
                text,
            })
        }
        VerifyCommand::Rep {
            slice,
            carrier,
            primes,
            prime_bound,
            composite_bound,
            trials,
            seed,
            max_m,
            max_a,
        } => {
            let primes = primes.clone().unwrap_or_else(|| primes_up_to(*prime_bound));
            check_primes(&primes)?;
            if *max_a == 0 {
                return Err(CliError::Usage("--max-a must be positive".into()));
            }
            let cfg = RunConfig {
                seed: *seed,
                max_m: *max_m,
                max_a: *max_a,
                slice: *slice,
                trials: *trials,
                json,
                ..RunConfig::default()
            };
            let carrier = match carrier {
                CarrierArg::Semigroup => Carrier::Semigroup,
                CarrierArg::Integers => Carrier::Integers,
            };
            let r = campaign::rep_campaign(&cfg, carrier, &primes, *composite_bound);
            let mut text = format!(
                "{:?} carrier on slice ({},{}): {} relation sides + {} products; {} mismatched, {} with < {} certified columns (min {})\n",
                r.carrier,
                r.slice.0,
                r.slice.1,
                r.relation_sides,
                r.products,
                r.mismatched.len(),
                r.under_certified.len(),
                campaign::MIN_CERTIFIED,
                r.min_certified
            );
            for c in r.mismatched.iter().take(10) {
                writeln!(
                    text,
                    "MISMATCH {} at {:?}",
                    c.case,
                    &c.mismatched[..c.mismatched.len().min(3)]
                )
                .unwrap();
            }
            Ok(Outcome {
                ok: r.passed(),
                json: to_json(&r),
                text,
            })
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(o) => {
            let _ = writeln!(out, "{}", o.render(cli.json).trim_end());
            o.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
