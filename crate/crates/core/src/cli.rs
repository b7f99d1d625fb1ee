//! Command-line front end.
//!
//! Exit status: 0 when the run reaches its expected verdict, 2 when it does
//! not, 1 on usage or internal errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebra::{validate, LieAlgebra};
use crate::cartan::Series;
use crate::cqgrel::derive_commutativity;
use crate::error::{Error, Result};
use crate::exactlin::{Rationals, RankMode, Verdict};
use crate::flows::{expand_word, FlowWord};
use crate::quadind::{
    adjoint_family, coefficient_prover, product_family, certify::certify, CustomFamily, Degree, FunctionFamily,
    ProverOptions, SamplerConfig,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "LIEQR_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lieqr", version, about = "Exact certificates for simply-laced Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Modular)]
    pub mode: ModeArg,

    /// First sample batch is this many times the column count.
    #[arg(long, global = true, default_value_t = 2)]
    pub multiplier: usize,

    #[arg(long, global = true, default_value_t = 5)]
    pub prime_retries: usize,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,

    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Modular,
    Exact,
}

impl From<ModeArg> for RankMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Modular => RankMode::Modular,
            ModeArg::Exact => RankMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixture {
    /// `(1, cos, sin)` on the rational circle.
    Circle,
    /// `[x, x]`.
    Duplicate,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Build the algebra, validate it, optionally export structure constants.
    Build {
        #[arg(long)]
        series: Series,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        emit_structure_constants: Option<PathBuf>,
    },
    /// Certify the linear or quadratic dimension of the coordinate functions.
    Quadind {
        #[arg(long, required_unless_present = "fixture", requires = "rank")]
        series: Option<Series>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, value_enum, conflicts_with_all = ["series", "rank"])]
        fixture: Option<Fixture>,
        /// Certify the span of the functions instead of their products.
        #[arg(long)]
        linear: bool,
        /// Allow long-running E-series quadratic runs.
        #[arg(long)]
        long: bool,
    },
    /// Replay the coefficient-comparison proof symbolically.
    Prove {
        #[arg(long)]
        series: Series,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Certify a product of adjoint families, e.g. `A1,A2`.
    Product {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        linear: bool,
    },
    /// Check the commutation derivation for n x n matrix coefficients.
    Cqg {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Expand a flow word applied to H1 symbolically.
    Expand {
        #[arg(long)]
        series: Series,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        word: String,
    },
}

/// Fully resolved configuration; embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub mode: RankMode,
    pub seed: u64,
    pub multiplier: usize,
    pub prime_retries: usize,
    pub threads: Option<usize>,
    pub json: Option<PathBuf>,
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandConfig {
    Build { series: Series, rank: usize, emit_structure_constants: Option<PathBuf> },
    Quadind { series: Option<Series>, rank: Option<usize>, fixture: Option<Fixture>, linear: bool, long: bool },
    Prove { series: Series, rank: usize, trace: Option<PathBuf> },
    Product { spec: String, linear: bool },
    Cqg { n: usize, trace: Option<PathBuf> },
    Expand { series: Series, rank: usize, word: String },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Build { .. } => "build",
            CommandConfig::Quadind { .. } => "quadind",
            CommandConfig::Prove { .. } => "prove",
            CommandConfig::Product { .. } => "product",
            CommandConfig::Cqg { .. } => "cqg",
            CommandConfig::Expand { .. } => "expand",
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let g = cli.global;
        let command = match cli.command {
            CliCommand::Build { series, rank, emit_structure_constants } => {
                CommandConfig::Build { series, rank, emit_structure_constants }
            }
            CliCommand::Quadind { series, rank, fixture, linear, long } => {
                CommandConfig::Quadind { series, rank, fixture, linear, long }
            }
            CliCommand::Prove { series, rank, trace } => CommandConfig::Prove { series, rank, trace },
            CliCommand::Product { spec, linear } => CommandConfig::Product { spec, linear },
            CliCommand::Cqg { n, trace } => CommandConfig::Cqg { n, trace },
            CliCommand::Expand { series, rank, word } => CommandConfig::Expand { series, rank, word },
        };
        RunConfig {
            command,
            mode: g.mode.into(),
            seed: g.seed,
            multiplier: g.multiplier,
            prime_retries: g.prime_retries,
            threads: g.threads,
            json: g.json,
            verbose: g.verbose,
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            multiplier: self.multiplier,
            mode: self.mode,
            prime_retries: self.prime_retries,
            ..SamplerConfig::default()
        }
    }
}

/// The JSON report; fields that do not apply to a command are null.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub series: Option<String>,
    pub rank: Option<usize>,
    pub dim: Option<usize>,
    pub expected_quad_dim: Option<usize>,
    pub degree: Option<Degree>,
    pub expected_rank: Option<usize>,
    pub mode: Option<RankMode>,
    pub prime: Option<u64>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub rank_found: Option<usize>,
    pub verdict: String,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_null: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    pub success: bool,
    pub config: RunConfig,
}

impl Report {
    fn new(config: &RunConfig, verdict: &str, success: bool) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: config.command.name().to_string(),
            series: None,
            rank: None,
            dim: None,
            expected_quad_dim: None,
            degree: None,
            expected_rank: None,
            mode: None,
            prime: None,
            seed: config.seed,
            samples: None,
            rank_found: None,
            verdict: verdict.to_string(),
            elapsed_ms: 0,
            candidate_null: None,
            trace_path: None,
            success,
            config: config.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.success {
            EXIT_OK
        } else {
            EXIT_VERDICT
        }
    }
}

fn verdict_name(v: Verdict) -> String {
    match v {
        Verdict::CertifiedFullRank => "certified-full-rank",
        Verdict::RankDeficientCandidate => "rank-deficient-candidate",
        Verdict::LikelyDependent => "likely-dependent",
    }
    .to_string()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

/// Parses `A1,A1,D4`.
pub fn parse_product_spec(spec: &str) -> Result<Vec<(Series, usize)>> {
    spec.split(',')
        .map(|part| {
            let part = part.trim();
            let bad = || Error::Parse(format!("bad factor `{part}` in product spec (expected e.g. A2)"));
            let head = part.get(..1).ok_or_else(bad)?;
            let series: Series = head.parse()?;
            let rank: usize = part[1..].parse().map_err(|_| bad())?;
            Ok((series, rank))
        })
        .collect()
}

fn algebra(series: Series, rank: usize) -> Result<Arc<LieAlgebra>> {
    Ok(Arc::new(LieAlgebra::build(series, rank)?))
}

/// Runs a resolved configuration, writing human-readable output to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<Report> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = config.threads {
            b = b.num_threads(t.max(1));
        }
        b.build().map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
    };
    let start = Instant::now();
    let mut text = String::new();
    let mut report = pool.install(|| dispatch(config, &mut text))?;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    let _ = writeln!(text, "verdict: {} ({} ms)", report.verdict, report.elapsed_ms);
    out.write_all(text.as_bytes()).map_err(|e| Error::Invalid(format!("cannot write output: {e}")))?;
    if let Some(path) = &config.json {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Invalid(e.to_string()))?;
        write_file(path, &(json + "\n"))?;
    }
    Ok(report)
}

fn dispatch(config: &RunConfig, out: &mut String) -> Result<Report> {
    match &config.command {
        CommandConfig::Build { series, rank, emit_structure_constants } => {
            let l = algebra(*series, *rank)?;
            let v = validate(&l);
            let _ = writeln!(out, "{}: dimension {}, {} positive roots", l.name(), l.dim(), l.roots().num_positive());
            for f in &v.families {
                let status = if f.passed { "ok" } else { "FAILED" };
                let _ = writeln!(out, "  {:<14} {:>8} checked  {}", f.name, f.checked, status);
                if let Some(w) = &f.witness {
                    let _ = writeln!(out, "    witness: {w}");
                }
            }
            if let Some(path) = emit_structure_constants {
                write_file(path, &l.structure_constants_text())?;
                let _ = writeln!(out, "structure constants written to {}", path.display());
            }
            let mut r = Report::new(config, if v.passed() { "valid" } else { "invalid" }, v.passed());
            r.series = Some(series.to_string());
            r.rank = Some(*rank);
            r.dim = Some(l.dim());
            Ok(r)
        }
        CommandConfig::Quadind { series, rank, fixture, linear, long } => {
            let degree = if *linear { Degree::Linear } else { Degree::Quadratic };
            let family: Arc<dyn FunctionFamily> = match (fixture, series, rank) {
                (Some(Fixture::Circle), _, _) => Arc::new(CustomFamily::circle()),
                (Some(Fixture::Duplicate), _, _) => Arc::new(CustomFamily::duplicate()),
                (None, Some(s), Some(n)) => {
                    if *s == Series::E && degree == Degree::Quadratic && !*long {
                        return Err(Error::Invalid(format!(
                            "quadratic certification of {s}{n} is long-running; pass --long to run it"
                        )));
                    }
                    Arc::new(adjoint_family(algebra(*s, *n)?))
                }
                _ => return Err(Error::Invalid("quadind needs --series and --rank, or --fixture".into())),
            };
            let mut r = certify_family(config, family.as_ref(), degree, out)?;
            r.series = series.map(|s| s.to_string()).or_else(|| fixture.map(|f| format!("{f:?}").to_lowercase()));
            r.rank = *rank;
            Ok(r)
        }
        CommandConfig::Product { spec, linear } => {
            let degree = if *linear { Degree::Linear } else { Degree::Quadratic };
            let parts = parse_product_spec(spec)?
                .into_iter()
                .map(|(s, n)| Ok(Arc::new(adjoint_family(algebra(s, n)?)) as Arc<dyn FunctionFamily>))
                .collect::<Result<Vec<_>>>()?;
            let family = product_family(parts)?;
            let mut r = certify_family(config, &family, degree, out)?;
            r.series = Some(spec.clone());
            Ok(r)
        }
        CommandConfig::Prove { series, rank, trace } => {
            let l = algebra(*series, *rank)?;
            let opts = ProverOptions { seed: config.seed, ..ProverOptions::default() };
            let p = coefficient_prover(&l, &opts)?;
            let _ = writeln!(
                out,
                "{}: {} unknowns, {} scheduled words (+{} extension), {} distinct constraints",
                p.algebra, p.unknowns, p.scheduled_words, p.extension_words, p.constraints
            );
            let _ = writeln!(out, "rank {} / {}, nullspace dimension {}", p.rank, p.unknowns, p.nullspace_dim);
            if !p.free_unknowns.is_empty() {
                let _ = writeln!(out, "free: {}", p.free_unknowns.join(", "));
            }
            if config.verbose {
                out.push_str(&p.trace_text());
            }
            if let Some(path) = trace {
                write_file(path, &p.trace_text())?;
                let _ = writeln!(out, "trace written to {}", path.display());
            }
            let mut r = Report::new(config, if p.closes() { "closes" } else { "nullspace-nonzero" }, p.closes());
            r.series = Some(series.to_string());
            r.rank = Some(*rank);
            r.dim = Some(l.dim());
            r.expected_quad_dim = Some(p.unknowns);
            r.rank_found = Some(p.rank);
            r.trace_path = trace.as_ref().map(|t| t.display().to_string());
            Ok(r)
        }
        CommandConfig::Cqg { n, trace } => {
            let proof = derive_commutativity(*n)?;
            for s in &proof.steps {
                let status = if s.holds { "ok" } else { "FAILED" };
                let _ = writeln!(out, "{}  {}  => {}", s.trace_line(), status, s.conclusion);
            }
            let _ = writeln!(
                out,
                "{} tuples, {} antipode checks ({})",
                proof.steps.len(),
                proof.antipode_checks,
                if proof.antipode_consistent { "consistent" } else { "INCONSISTENT" }
            );
            if let Some(path) = trace {
                write_file(path, &proof.trace_text())?;
            }
            let ok = proof.verified();
            let mut r = Report::new(config, if ok { "verified" } else { "counterexample" }, ok);
            r.rank = Some(*n);
            r.samples = Some(proof.steps.len());
            r.trace_path = trace.as_ref().map(|t| t.display().to_string());
            Ok(r)
        }
        CommandConfig::Expand { series, rank, word } => {
            let l = algebra(*series, *rank)?;
            let w = FlowWord::parse(&l, word)?;
            let (ring, v) = expand_word(&l, &w, &l.basis_vector(&Rationals, l.h(1)))?;
            for (k, p) in v.iter().enumerate() {
                let _ = writeln!(out, "{} = {}", l.label(k), ring.format(p));
            }
            let mut r = Report::new(config, "expanded", true);
            r.series = Some(series.to_string());
            r.rank = Some(*rank);
            r.dim = Some(l.dim());
            Ok(r)
        }
    }
}

fn certify_family(
    config: &RunConfig,
    family: &dyn FunctionFamily,
    degree: Degree,
    out: &mut String,
) -> Result<Report> {
    let m = family.dimension();
    let cert = certify(family, degree, &config.sampler())?;
    let cols = degree.columns(m);
    let _ = writeln!(out, "family {} (dimension {m}), {degree:?} columns {cols}", family.label());
    let prime = cert.prime.map_or_else(|| "-".to_string(), |p| p.to_string());
    let _ = writeln!(out, "mode {:?}, prime {prime}, seed {}, samples {}", cert.mode, cert.seed, cert.samples);
    if let Some(e) = cert.exact_rank {
        let _ = writeln!(out, "exact audit rank {e}");
    }
    let _ = writeln!(out, "rank {} / {cols}", cert.rank);
    if let Some(c) = &cert.candidate_null {
        let _ = writeln!(out, "candidate dependence ({}): {}", describe_columns(m, degree), c.join(" "));
        let _ = writeln!(out, "confirmed on {} fresh batches", cert.confirmed_batches);
    }
    let verdict = verdict_name(cert.verdict);
    let mut r = Report::new(config, &verdict, cert.verdict.is_certified());
    r.dim = Some(m);
    r.expected_quad_dim = Some(m * (m + 1) / 2);
    r.degree = Some(degree);
    r.expected_rank = Some(cols);
    r.mode = Some(cert.mode);
    r.prime = cert.prime;
    r.samples = Some(cert.samples);
    r.rank_found = Some(cert.rank);
    r.candidate_null = cert.candidate_null;
    Ok(r)
}

fn describe_columns(m: usize, degree: Degree) -> String {
    match degree {
        Degree::Linear => format!("columns 1..{m}"),
        Degree::Quadratic => "columns (i,j), i <= j, colexicographic".to_string(),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// status. Reports go to `out`, diagnostics to `err`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_ERROR
                }
            };
        }
    };
    let config = RunConfig::from_cli(cli);
    match run(&config, out) {
        Ok(report) => report.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
