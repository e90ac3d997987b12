use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use twistfock_core::algebra::{
    check_cartan_relations, check_heisenberg_covariance, conventions_table, jacobi_sample, random_triples, BracketReport,
    CartanReport, ConventionsRow, CovarianceReport, GeneratorDictionary, JacobiReport,
};
use twistfock_core::character::{character_table, generating_function, hwv_search, CharacterTable, HwvReport};
use twistfock_core::checks::{self, SuiteReport};
use twistfock_core::fock::{sector_allows, FockMonomial, FockVector};
use twistfock_core::lattice::{Lattice, LatticeVector};
use twistfock_core::scalar::{parse_rational, rational_to_string, Rational};
use twistfock_core::vertex::{ModeIndex, PhaseConvention};
use twistfock_core::{BracketChecker, Engine, Rank};

mod render;

const OUT_DIR_VAR: &str = "TWISTFOCK_OUT_DIR";

#[derive(Parser)]
#[command(name = "twistfock", version, about = "Exact checks for the twisted vertex-operator realization of A_{2l}^{(2)}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run operator-identity and bracket verification suites.
    Verify(VerifyArgs),
    /// Weight multiplicities and graded dimensions near the top degree.
    Character(CharacterArgs),
    /// Search the window for vectors killed by every raising operator.
    Hwv(HwvArgs),
    /// Static lattice data.
    Tables(TablesArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Rank l of the underlying B_l lattice (at least 2).
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Depth of the degree window below the top degree, e.g. 3 or 5/2.
    #[arg(long, default_value = "3")]
    depth: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file; defaults to $TWISTFOCK_OUT_DIR/<command>-l<rank>.<ext> when that is set, else stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (0 uses all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Largest |m| for vertex modes and |n| for Heisenberg modes.
    #[arg(long, default_value_t = 2)]
    modes: i32,
    #[arg(long, value_enum, default_value_t = Convention::FullExponent)]
    phase_convention: Convention,
    /// Suites to run (comma separated or repeated); all when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Vec<Suite>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Treat mismatches with the stated structure constants as failures.
    #[arg(long)]
    strict_paper: bool,
}

#[derive(Args)]
struct CharacterArgs {
    #[command(flatten)]
    common: Common,
    /// Cross-check graded dimensions against the product formula.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct HwvArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Convention::FullExponent)]
    phase_convention: Convention,
    /// Restrict the search to pure exponentials 1⊗e^{λ+α}.
    #[arg(long)]
    pure_exponentials: bool,
}

#[derive(Args)]
struct TablesArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = What::Roots)]
    what: What,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    FullExponent,
    LatticeOnly,
}

impl From<Convention> for PhaseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::FullExponent => PhaseConvention::FullExponent,
            Convention::LatticeOnly => PhaseConvention::LatticeOnly,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Heisenberg,
    Grading,
    Contraction,
    Covariance,
    Brackets,
    Cartan,
    Jacobi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum What {
    Roots,
    Cocycle,
    PMap,
    Gram,
    Gcm,
}

/// Configuration problems map to exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_rank(l: usize) -> anyhow::Result<Rank> {
    Rank::new(l).map_err(|e| usage(e.to_string()))
}

fn parse_depth(s: &str) -> anyhow::Result<Rational> {
    let d = parse_rational(s).ok_or_else(|| usage(format!("invalid depth {s:?}")))?;
    if d < Rational::from_integer(0) {
        return Err(usage("depth must be nonnegative"));
    }
    Ok(d)
}

fn pool(jobs: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("thread pool")
}

/// Rendered output plus whether the run found a failure.
struct Rendered {
    body: String,
    failed: bool,
}

fn emit(common: &Common, command: &str, rendered: &Rendered) -> anyhow::Result<()> {
    let path = match (&common.output, std::env::var_os(OUT_DIR_VAR)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("{command}-l{}.{}", common.rank, common.format.ext()))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(&p, &rendered.body).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("{command}: wrote {}", p.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(rendered.body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyConfig {
    rank: usize,
    depth: String,
    modes: i32,
    phase_convention: PhaseConvention,
    suites: Vec<Suite>,
    seed: u64,
    strict_paper: bool,
}

#[derive(Serialize, Default)]
struct VerifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    heisenberg: Option<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grading: Option<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    contraction: Option<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covariance: Option<CovarianceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brackets: Option<Vec<BracketReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conventions: Option<Vec<ConventionsRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cartan: Option<CartanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jacobi: Option<JacobiReport>,
}

#[derive(Serialize)]
struct CovarianceSummary {
    checks: usize,
    failures: Vec<CovarianceReport>,
}

#[derive(Serialize)]
struct Status {
    failures: usize,
    warnings: usize,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    command: &'static str,
    config: &'a VerifyConfig,
    report: &'a VerifyReport,
    status: Status,
}

fn covariance(engine: &Engine, basis: &[FockMonomial], modes: i32) -> anyhow::Result<CovarianceSummary> {
    let rank = engine.lattice().rank();
    let l = rank.get();
    let roots: Vec<LatticeVector> = engine.roots().all().into_iter().map(|(_, r)| r).collect();
    let mut cases = Vec::new();
    for tn in -2 * modes..=2 * modes {
        for dir in 0..=l {
            let allowed = if tn == 0 { dir < l } else { sector_allows(rank, dir, tn) };
            if !allowed {
                continue;
            }
            for alpha in &roots {
                for td in -2 * modes..=2 * modes {
                    cases.push((LatticeVector::basis(rank, dir), alpha.clone(), tn, td));
                }
            }
        }
    }
    let results: Vec<CovarianceReport> = cases
        .par_iter()
        .map(|(h, a, tn, td)| check_heisenberg_covariance(engine, h, a, *tn, ModeIndex::from_twice(*td), basis))
        .collect::<Result<_, _>>()?;
    Ok(CovarianceSummary { checks: results.len(), failures: results.into_iter().filter(|r| !r.holds).collect() })
}

fn run_verify(args: &VerifyArgs) -> anyhow::Result<Rendered> {
    let common = &args.common;
    let rank = parse_rank(common.rank)?;
    let depth = parse_depth(&common.depth)?;
    if args.modes < 0 {
        return Err(usage("--modes must be nonnegative"));
    }
    let mut suites = args.suite.clone();
    if suites.is_empty() {
        suites = Suite::value_variants().to_vec();
    }
    suites.sort();
    suites.dedup();
    let config = VerifyConfig {
        rank: rank.get(),
        depth: rational_to_string(&depth),
        modes: args.modes,
        phase_convention: args.phase_convention.into(),
        suites: suites.clone(),
        seed: args.seed,
        strict_paper: args.strict_paper,
    };
    let engine = Engine::new(rank, args.phase_convention.into());
    let fs = engine.fock();
    let basis = fs.window_basis(&depth);
    let mut report = VerifyReport::default();
    pool(common.jobs)?.install(|| -> anyhow::Result<()> {
        for suite in &suites {
            match suite {
                Suite::Heisenberg => {
                    let monos = checks::random_monomials(fs, 100, 6, args.seed);
                    report.heisenberg = Some(checks::heisenberg_relations(fs, &monos, 6)?);
                }
                Suite::Grading => report.grading = Some(checks::grading(&engine, &basis, args.modes)?),
                Suite::Contraction => {
                    let vectors: Vec<FockVector> = basis.iter().step_by(7).map(|m| FockVector::from_monomial(m.clone())).collect();
                    report.contraction = Some(checks::contraction(fs.lattice(), &vectors, 6)?);
                }
                Suite::Covariance => report.covariance = Some(covariance(&engine, &basis, args.modes)?),
                Suite::Brackets => {
                    let reports = BracketChecker::new(&engine, basis.clone()).check_all(args.modes)?;
                    report.conventions = Some(conventions_table(&reports));
                    report.brackets = Some(reports);
                }
                Suite::Cartan => {
                    let dict = GeneratorDictionary::build(&engine, &basis)?;
                    report.cartan = Some(check_cartan_relations(&engine, &dict, &basis)?);
                }
                Suite::Jacobi => {
                    let triples = random_triples(&engine, 64, args.seed);
                    report.jacobi = Some(jacobi_sample(&engine, &triples, &basis)?);
                }
            }
        }
        Ok(())
    })?;
    let mut failures = 0;
    for s in [&report.heisenberg, &report.grading, &report.contraction].into_iter().flatten() {
        failures += s.failures.len();
    }
    failures += report.covariance.as_ref().map_or(0, |c| c.failures.len());
    failures += report.brackets.as_ref().map_or(0, |b| b.iter().filter(|r| !r.consistent).count());
    failures += report.cartan.as_ref().map_or(0, |c| c.failures.len());
    failures += report.jacobi.as_ref().map_or(0, |j| j.failures.len());
    let warnings = report.brackets.as_ref().map_or(0, |b| b.iter().filter(|r| r.matches_reference == Some(false)).count());
    let failed = failures > 0 || (args.strict_paper && warnings > 0);
    let status = Status { failures, warnings };
    let body = match common.format {
        Format::Json => serde_json::to_string_pretty(&VerifyOutput { command: "verify", config: &config, report: &report, status })? + "\n",
        Format::Csv => render::verify_csv(&report)?,
        Format::Text => render::verify_text(&config, &report, &status),
    };
    Ok(Rendered { body, failed })
}

#[derive(Serialize)]
struct CharacterOutput<'a> {
    command: &'static str,
    table: &'a CharacterTable,
    graded_dimensions: Vec<(String, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn run_character(args: &CharacterArgs) -> anyhow::Result<Rendered> {
    let rank = parse_rank(args.common.rank)?;
    let depth = parse_depth(&args.common.depth)?;
    let table = pool(args.common.jobs)?.install(|| character_table(rank, &depth))?;
    let dims = table.graded_dimensions();
    let oracle_agrees = args.oracle.then(|| generating_function(rank, &depth) == dims);
    let graded_dimensions = dims.iter().map(|(k, v)| (rational_to_string(k), *v)).collect();
    let out = CharacterOutput { command: "character", table: &table, graded_dimensions, oracle_agrees };
    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv => render::character_csv(&table)?,
        Format::Text => render::character_text(&table, &dims, oracle_agrees),
    };
    Ok(Rendered { body, failed: oracle_agrees == Some(false) || !table.complete })
}

fn run_hwv(args: &HwvArgs) -> anyhow::Result<Rendered> {
    let rank = parse_rank(args.common.rank)?;
    let depth = parse_depth(&args.common.depth)?;
    let engine = Engine::new(rank, args.phase_convention.into());
    let report: HwvReport = pool(args.common.jobs)?.install(|| hwv_search(&engine, &depth, args.pure_exponentials))?;
    let failed = !report.is_unique_vacuum();
    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => render::hwv_csv(&report)?,
        Format::Text => render::hwv_text(&report),
    };
    Ok(Rendered { body, failed })
}

fn run_tables(args: &TablesArgs) -> anyhow::Result<Rendered> {
    let rank = parse_rank(args.common.rank)?;
    let lattice = Lattice::new(rank);
    let table = render::static_table(&lattice, args.what);
    let body = match args.common.format {
        Format::Json => serde_json::to_string_pretty(&table)? + "\n",
        Format::Csv => render::table_csv(&table)?,
        Format::Text => render::table_text(&table),
    };
    Ok(Rendered { body, failed: false })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (name, common, result) = match &cli.command {
        Command::Verify(a) => ("verify", &a.common, run_verify(a)),
        Command::Character(a) => ("character", &a.common, run_character(a)),
        Command::Hwv(a) => ("hwv", &a.common, run_hwv(a)),
        Command::Tables(a) => ("tables", &a.common, run_tables(a)),
    };
    let rendered = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{name}: {e:#}");
            return ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 });
        }
    };
    if let Err(e) = emit(common, name, &rendered) {
        eprintln!("{name}: {e:#}");
        return ExitCode::from(1);
    }
    if rendered.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
