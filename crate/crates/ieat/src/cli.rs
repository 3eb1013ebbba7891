//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when some tests of a battery failed (the
//! others are still written), 2 on any fatal configuration or IO error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ieat_core::{
    hypothesis_report, resolve_category, select_valence_words, EmbeddingTable, Pooling,
    RunOptions, StimulusManifest, TestResult, TiePolicy, DEFAULT_EXACT_LIMIT,
    DEFAULT_MC_SAMPLES,
};

use crate::config::{load_battery, load_manifest, load_norms, Battery};
use crate::embeddings::{load_embeddings, sniff_format, EmbeddingFormat};
use crate::parallel::Parallel;
use crate::render::{
    render_hypotheses, render_results, render_specificity, render_valence, OutputFormat,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TEST_FAILURE: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ieat", version, about = "Association tests over image embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every test of a battery and write one row per test.
    Run(RunArgs),
    /// Estimate false-positive rates by randomly re-partitioning one test's stimuli.
    Specificity(SpecificityArgs),
    /// Pick the most pleasant and most unpleasant high-imagery words from rated norms.
    SelectValence(ValenceArgs),
    /// Run a battery and evaluate the intersectional hypotheses on its results.
    Hypotheses(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// Packed binary if the file starts with the `IEAT` magic, CSV otherwise.
    Auto,
    Csv,
    PackedBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormatArg {
    /// From the output file extension: `.csv`, `.md`, otherwise plain table.
    Auto,
    PlainTable,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiePolicyArg {
    Strict,
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolingArg {
    PerImage,
    PerExemplarMean,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Embedding table.
    #[arg(long, default_value = "embeddings.csv")]
    pub embeddings: PathBuf,
    /// Embedding file format.
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    /// Stimulus manifest (JSON).
    #[arg(long, default_value = "manifest.json")]
    pub manifest: PathBuf,
    /// Battery of test specs (TOML).
    #[arg(long, default_value = "battery.toml")]
    pub battery: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; `-` writes to standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub out_format: OutFormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct StatArgs {
    /// Largest partition count enumerated exactly; above it Monte-Carlo is used.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub exact_limit: u64,
    /// Monte-Carlo draws.
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Whether partitions tying the observed statistic count towards p.
    #[arg(long, value_enum, default_value = "strict")]
    pub tie_policy: TiePolicyArg,
    /// One vector per image, or one mean vector per exemplar.
    #[arg(long, value_enum, default_value = "per-image")]
    pub pooling: PoolingArg,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub stats: StatArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpecificityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub stats: StatArgs,
    /// Name of the battery test whose stimuli are re-partitioned; defaults to the first.
    #[arg(long)]
    pub test: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01")]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ValenceArgs {
    /// Ratings table with columns `word,valence,imagery`.
    #[arg(long, default_value = "norms.csv")]
    pub norms: PathBuf,
    /// Words per list.
    #[arg(long, default_value_t = 11)]
    pub k: usize,
    /// Minimum imagery rating.
    #[arg(long, default_value_t = 0.0)]
    pub imagery_min: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl StatArgs {
    pub fn options(&self) -> RunOptions {
        RunOptions {
            exact_limit: self.exact_limit,
            mc_samples: self.mc_samples,
            seed: self.seed,
            tie_policy: match self.tie_policy {
                TiePolicyArg::Strict => TiePolicy::Strict,
                TiePolicyArg::Inclusive => TiePolicy::Inclusive,
            },
            pooling: match self.pooling {
                PoolingArg::PerImage => Pooling::PerImage,
                PoolingArg::PerExemplarMean => Pooling::PerExemplarMean,
            },
        }
    }
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        match self.out_format {
            OutFormatArg::PlainTable => OutputFormat::PlainTable,
            OutFormatArg::Csv => OutputFormat::Csv,
            OutFormatArg::Markdown => OutputFormat::Markdown,
            OutFormatArg::Auto => match self.out.extension().and_then(|e| e.to_str()) {
                Some("csv") => OutputFormat::Csv,
                Some("md") => OutputFormat::Markdown,
                _ => OutputFormat::PlainTable,
            },
        }
    }

    fn write(&self, text: &str, stdout: &mut dyn Write) -> Result<()> {
        if self.out == Path::new("-") {
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        } else {
            fs::write(&self.out, text).map_err(|e| Error::io(&self.out, e))
        }
    }
}

struct Inputs {
    table: EmbeddingTable,
    manifest: StimulusManifest,
    battery: Battery,
}

fn load_inputs(args: &InputArgs) -> Result<Inputs> {
    let manifest = load_manifest(&args.manifest)?;
    let battery = load_battery(&args.battery)?;
    let format = match args.format {
        FormatArg::Csv => EmbeddingFormat::Csv,
        FormatArg::PackedBinary => EmbeddingFormat::PackedBinary,
        FormatArg::Auto => sniff_format(&args.embeddings)?,
    };
    let table = load_embeddings(&args.embeddings, format)?;
    Ok(Inputs {
        table,
        manifest,
        battery,
    })
}

/// Runs the battery; returns the successful results and the failure messages.
fn run_battery(args: &RunArgs) -> Result<(Vec<TestResult>, Vec<String>)> {
    let inputs = load_inputs(&args.input)?;
    let exec = Parallel::new(args.stats.threads)?;
    let options = args.stats.options();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for result in exec.run_battery(&inputs.battery.tests, &inputs.manifest, &inputs.table, &options) {
        match result {
            Ok(r) => ok.push(r),
            Err(e) => failed.push(e.to_string()),
        }
    }
    Ok((ok, failed))
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (results, failed) = run_battery(args)?;
    args.output
        .write(&render_results(&results, args.output.format()), stdout)?;
    Ok(report_failures(&failed, stderr))
}

pub fn cmd_hypotheses(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (results, failed) = run_battery(args)?;
    let report = hypothesis_report(&results)?;
    args.output.write(&render_hypotheses(&report), stdout)?;
    Ok(report_failures(&failed, stderr))
}

fn report_failures(failed: &[String], stderr: &mut dyn Write) -> i32 {
    for message in failed {
        let _ = writeln!(stderr, "error: {message}");
    }
    if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_TEST_FAILURE
    }
}

pub fn cmd_specificity(args: &SpecificityArgs, stdout: &mut dyn Write) -> Result<i32> {
    ieat_core::specificity::check_arguments(usize::MAX, [1; 4], args.trials, &args.alphas)?;
    let inputs = load_inputs(&args.input)?;
    let spec = match &args.test {
        Some(name) => inputs
            .battery
            .tests
            .iter()
            .find(|s| &s.name == name)
            .ok_or_else(|| Error::Usage(format!("battery has no test named `{name}`")))?,
        None => &inputs.battery.tests[0],
    };
    let options = args.stats.options();
    let pooling = spec.pooling.unwrap_or(options.pooling);
    let mut pool = Vec::new();
    let mut sizes = [0; 4];
    for (size, category) in sizes.iter_mut().zip(spec.categories()) {
        let set = resolve_category(&inputs.manifest, &inputs.table, category, pooling)
            .map_err(|e| ieat_core::Error::Test {
                name: spec.name.clone(),
                source: Box::new(e),
            })?;
        *size = set.size();
        pool.extend_from_slice(set.vectors());
    }
    let options = RunOptions {
        tie_policy: spec.tie_policy.unwrap_or(options.tie_policy),
        ..options
    };
    let exec = Parallel::new(args.stats.threads)?;
    let report = exec.specificity_eval(&pool, sizes, args.trials, &args.alphas, args.stats.seed, &options)?;
    args.output
        .write(&render_specificity(&report, args.output.format()), stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_select_valence(args: &ValenceArgs, stdout: &mut dyn Write) -> Result<i32> {
    if args.k == 0 {
        return Err(ieat_core::Error::InvalidK.into());
    }
    let norms = load_norms(&args.norms)?;
    let selection = select_valence_words(&norms, args.k, args.imagery_min)
        .map_err(|e| Error::invalid(&args.norms, e))?;
    args.output
        .write(&render_valence(&selection, args.output.format()), stdout)?;
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args, stdout, stderr),
        Command::Hypotheses(args) => cmd_hypotheses(args, stdout, stderr),
        Command::Specificity(args) => cmd_specificity(args, stdout),
        Command::SelectValence(args) => cmd_select_valence(args, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FATAL
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_FATAL
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            }
        }
    }
}
