use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fss_rank::corpus::{Membership, Window};
use fss_rank::pipeline::{self, MedianTest, Precision, RunConfig, Stage};
use fss_rank::ranking::StratifiedRanking;
use fss_rank::synth::{synthetic_corpus, SynthConfig};
use fss_rank::Error;

/// Fractional Scientific Strength and gender-stratified rank shifts.
#[derive(Debug, Parser)]
#[command(name = "fss-rank", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Directory holding researchers.csv, fields.csv, publications.csv, bylines.csv and wages.csv.
    #[arg(long, global = true, value_name = "DIR")]
    corpus_dir: Option<PathBuf>,
    /// Where outputs are written.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Observation window, START:END inclusive.
    #[arg(long, global = true, value_name = "A:B")]
    window: Option<String>,
    /// Seed for anything sampled, e.g. `synth`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// key=value settings applied on top of the command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// `full` for shortest round-trip numbers instead of 6 significant digits.
    #[arg(long, global = true, value_name = "P")]
    precision: Option<String>,
    /// Fail with exit code 3 on degenerate statistics instead of warning.
    #[arg(long, global = true)]
    strict: bool,
    /// Minimum share of field members with a publication.
    #[arg(long, global = true, value_name = "X")]
    min_share: Option<f64>,
    /// Minimum headcount of each gender per field.
    #[arg(long, global = true, value_name = "N")]
    min_per_gender: Option<usize>,
    /// Which researchers count as field members: all or full_window.
    #[arg(long, global = true)]
    membership: Option<String>,
    /// key=value credit weights.
    #[arg(long, global = true, value_name = "FILE")]
    weights_file: Option<PathBuf>,
    /// year,subject_category,mean_cited_citations rows replacing computed baselines.
    #[arg(long = "override", global = true, value_name = "FILE")]
    baselines_override: Option<PathBuf>,
    /// merged or within_gender.
    #[arg(long, global = true)]
    ranking: Option<String>,
    /// t_test or mann_whitney.
    #[arg(long, global = true)]
    median_test: Option<String>,
    #[arg(long, global = true, value_name = "H")]
    kde_bandwidth: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    kde_grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the corpus; write eligibility and gender-incidence tables.
    Ingest,
    /// Fractional author shares per publication.
    Shares,
    /// Citation baselines per year and subject category.
    Baselines,
    /// FSS of every researcher.
    Compute,
    /// Pooled and gender-stratified rankings, shifts and classes.
    Rank,
    /// Descriptive statistics, tests, correlations and densities.
    Stats,
    /// Text summary from outputs already in the output directory.
    Report,
    /// Every stage plus manifest.json.
    Run,
    /// Write a seeded synthetic corpus to --out-dir.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    fields: usize,
    #[arg(long, default_value_t = 40)]
    researchers: usize,
    #[arg(long, default_value_t = 2)]
    areas: usize,
    #[arg(long, default_value_t = 0.5)]
    female_share: f64,
    #[arg(long, default_value_t = 1.5)]
    male_advantage: f64,
}

fn parse<T: std::str::FromStr>(flag: &str, value: &str) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("--{flag}: {e}")))
}

fn build_config(g: &Global) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(v) = &g.corpus_dir {
        cfg.corpus_dir = v.clone();
    }
    if let Some(v) = &g.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = &g.window {
        cfg.window = parse::<Window>("window", v)?;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = &g.precision {
        cfg.precision = parse::<Precision>("precision", v)?;
    }
    cfg.strict = g.strict;
    if let Some(v) = g.min_share {
        cfg.eligibility.min_productive_share = v;
    }
    if let Some(v) = g.min_per_gender {
        cfg.eligibility.min_per_gender = v;
    }
    if let Some(v) = &g.membership {
        cfg.eligibility.membership = parse::<Membership>("membership", v)?;
    }
    cfg.weights_file = g.weights_file.clone().or(cfg.weights_file);
    cfg.baselines_override = g.baselines_override.clone().or(cfg.baselines_override);
    if let Some(v) = &g.ranking {
        cfg.ranking = parse::<StratifiedRanking>("ranking", v)?;
    }
    if let Some(v) = &g.median_test {
        cfg.median_test = parse::<MedianTest>("median-test", v)?;
    }
    if g.kde_bandwidth.is_some() {
        cfg.kde_bandwidth = g.kde_bandwidth;
    }
    if let Some(v) = g.kde_grid {
        cfg.kde_grid = v;
    }
    if let Some(file) = &g.config {
        cfg.apply_file(file)?;
    }
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        cfg.timestamp = Some(parse("SOURCE_DATE_EPOCH", epoch.trim())?);
    }
    cfg.resolve()
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = build_config(&cli.global)?;
    let stage = match cli.command {
        Command::Ingest => Stage::Ingest,
        Command::Shares => Stage::Shares,
        Command::Baselines => Stage::Baselines,
        Command::Compute => Stage::Compute,
        Command::Rank => Stage::Rank,
        Command::Stats => Stage::Stats,
        Command::Report => Stage::Report,
        Command::Run => {
            let manifest = pipeline::run_pipeline(&cfg)?;
            warn_all(&manifest.warnings);
            eprintln!(
                "wrote {} files to {}",
                manifest.outputs.len() + 1,
                cfg.out_dir.display()
            );
            return Ok(());
        }
        Command::Synth(args) => {
            let synth = SynthConfig {
                fields: args.fields,
                researchers_per_field: args.researchers,
                areas: args.areas,
                female_share: args.female_share,
                male_advantage: args.male_advantage,
                window: cfg.window,
                seed: cfg.seed,
                ..SynthConfig::default()
            };
            let corpus = synthetic_corpus(&synth)?;
            corpus.write_dir(&cfg.out_dir)?;
            eprintln!(
                "wrote {} researchers and {} publications to {}",
                corpus.researchers().len(),
                corpus.publications().len(),
                cfg.out_dir.display()
            );
            return Ok(());
        }
    };
    let outcome = pipeline::run_stage(&cfg, stage)?;
    warn_all(&outcome.warnings);
    if stage == Stage::Report {
        if let Some(f) = outcome.outputs.get(pipeline::SUMMARY_FILE) {
            print!("{}", String::from_utf8_lossy(&f.bytes));
        }
    }
    let names: Vec<&str> = outcome.outputs.names().collect();
    eprintln!(
        "{stage}: wrote {} to {}",
        names.join(", "),
        cfg.out_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
