//! Command-line front end: `analyze`, `verify` and `gen`.
//!
//! Exit codes: 0 ok, 1 CD violation found, 2 parse/usage error, 3 graph not
//! strongly connected, 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::curvature::{verify_graph, CurvatureReport, Dimension, VerifyOptions, ViolationSource};
use crate::error::{Error, Result};
use crate::generate::{generate, GraphModel, DEFAULT_EDGE_PROBABILITY};
use crate::graph::{parse_edge_list, parse_json_graph, DirectedGraph};
use crate::report::{format_real, to_csv, to_json, ReportKind};
use crate::stochastic::validate_alpha;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "cdgraph",
    version,
    about = "Curvature-dimension analysis of strongly connected directed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-vertex C, theorem bound and optimal curvature.
    Analyze(AnalyzeArgs),
    /// Check CD(m, K) at every vertex; exits 1 on any violation.
    Verify(VerifyArgs),
    /// Print a generated graph as an edge list.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// `.json` extension or a leading `{` selects JSON.
    Auto,
    EdgeList,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Cycle,
    BidirectedComplete,
    RandomSc,
}

impl From<ModelArg> for GraphModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Cycle => GraphModel::Cycle,
            ModelArg::BidirectedComplete => GraphModel::BidirectedComplete,
            ModelArg::RandomSc => GraphModel::RandomSc,
        }
    }
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let alpha: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    validate_alpha(alpha).map_err(|e| e.to_string())?;
    Ok(alpha)
}

fn parse_dimension(s: &str) -> std::result::Result<Dimension, String> {
    s.parse::<Dimension>().map_err(|e| e.to_string())
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("{s:?} is not a finite number")),
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file (edge list or JSON).
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub input_format: InputFormat,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Laziness α in [0, 1).
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Dimension m >= 1, or `inf`.
    #[arg(long, value_parser = parse_dimension)]
    pub m: Dimension,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_dimension, default_value = "2")]
    pub m: Dimension,
    /// Random functions tried per vertex.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test this K at every vertex instead of C − (1 − α).
    #[arg(long = "K-override", value_parser = parse_finite, allow_negative_numbers = true)]
    pub k_override: Option<f64>,
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability for random-sc.
    #[arg(short = 'p', default_value_t = DEFAULT_EDGE_PROBABILITY)]
    pub p: f64,
}

pub fn read_graph(path: &Path, format: InputFormat) -> Result<DirectedGraph> {
    let text = fs::read_to_string(path)?;
    let json = match format {
        InputFormat::Json => true,
        InputFormat::EdgeList => false,
        InputFormat::Auto => {
            path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{')
        }
    };
    if json {
        parse_json_graph(&text)
    } else {
        parse_edge_list(&text)
    }
}

fn render(report: &CurvatureReport, kind: ReportKind, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(report, kind),
        OutputFormat::Csv => to_csv(report),
    }
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let g = read_graph(&args.input.file, args.input.input_format)?;
    let options = VerifyOptions {
        samples: args.samples,
        seed: args.seed,
        k_override: None,
    };
    let report = verify_graph(&g, args.alpha, args.m, &options)?;
    emit(
        &render(&report, ReportKind::Analyze, args.input.format),
        args.input.output.as_deref(),
        stdout,
    )?;
    Ok(EXIT_OK)
}

fn run_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let g = read_graph(&args.input.file, args.input.input_format)?;
    let options = VerifyOptions {
        samples: args.samples,
        seed: args.seed,
        k_override: args.k_override,
    };
    let report = verify_graph(&g, args.alpha, args.m, &options)?;
    emit(
        &render(&report, ReportKind::Verify, args.input.format),
        args.input.output.as_deref(),
        stdout,
    )?;
    for v in report.violations() {
        let f: Vec<String> = v.f.iter().map(|x| format_real(*x)).collect();
        let source = match v.source {
            ViolationSource::Pencil => "pencil",
            ViolationSource::Sampled => "sampled",
        };
        writeln!(
            stderr,
            "violation: vertex {} ({source}) residual {} f=[{}]",
            report.vertices[v.vertex].label,
            format_real(v.residual),
            f.join(", ")
        )?;
    }
    Ok(if report.all_cd_hold() { EXIT_OK } else { EXIT_VIOLATION })
}

fn run_gen(args: &GenArgs, stdout: &mut dyn Write) -> Result<i32> {
    let g = generate(args.model.into(), args.n, args.p, args.seed)?;
    writeln!(stdout, "{}", g.to_edge_list())?;
    Ok(EXIT_OK)
}

/// Runs one command and returns the process exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a, stdout),
        Command::Verify(v) => run_verify(v, stdout, stderr),
        Command::Gen(g) => run_gen(g, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e, stderr),
    }
}

fn report_error(e: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            e.exit_code()
        }
    }
}
