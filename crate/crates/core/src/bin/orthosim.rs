use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orthosim::ingest::load_manifest;
use orthosim::ortho::load_annotations;
use orthosim::report::{
    compare_command, emit_plot_series, load_profiles, profile_command, write_plot_csv,
    ComparisonSpec, PlotKind, ProfileOptions, DEFAULT_TOP_K,
};
use orthosim::tokenize::TokenizationPolicy;
use orthosim::{Error, Result};

const SEED_ENV: &str = "ORTHOSIM_SEED";

#[derive(Parser)]
#[command(name = "orthosim", version, about = "Orthographic profiles and corpus comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Cumulative frequency of word lengths
    Cfd,
    /// Final-vowel fractions
    Vowels,
}

#[derive(Subcommand)]
enum Command {
    /// Profile one corpus from the manifest
    Profile {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        corpus: String,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        /// Leave numeric-ending tokens out of the vowel statistics
        #[arg(long)]
        exclude_numeric: bool,
        /// Lemma groups (TSV, base type first) for the calibrated type-token ratio
        #[arg(long)]
        lemma_map: Option<PathBuf>,
        /// type<TAB>category lines used to label the top-k list
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Tokenization policy as a JSON file
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the comparisons listed in a spec file
    Compare {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's alpha
        #[arg(long)]
        alpha: Option<f64>,
        /// Seed for Shapiro-Wilk subsampling (ORTHOSIM_SEED takes precedence)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exclude_numeric: bool,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot series as CSV
    Plot {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        corpora: Vec<String>,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Divide cumulative counts by the corpus total
        #[arg(long)]
        relative: bool,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_policy(path: Option<&Path>) -> Result<TokenizationPolicy> {
    match path {
        None => Ok(TokenizationPolicy::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            TokenizationPolicy::from_json(&text)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        None => Box::new(io::stdout().lock()),
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
    })
}

fn write_all(out: Option<&Path>, text: &str) -> Result<()> {
    let mut w = output(out)?;
    let res = w.write_all(text.as_bytes()).and_then(|_| w.flush());
    res.map_err(|e| Error::io(out.unwrap_or(Path::new("<stdout>")), e))
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

/// Ok(true) when every comparison slot succeeded.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Profile {
            manifest,
            corpus,
            top_k,
            exclude_numeric,
            lemma_map,
            annotations,
            policy,
            format,
            out,
        } => {
            let manifest = load_manifest(&manifest)?;
            let policy = read_policy(policy.as_deref())?;
            let opts = ProfileOptions {
                top_k,
                exclude_numeric,
                annotations: annotations.map(load_annotations).transpose()?,
                lemma_map: lemma_map.as_deref().map(read_text).transpose()?,
            };
            let report = profile_command(&manifest, &corpus, &policy, &opts)?;
            match format {
                Format::Json => write_all(out.as_deref(), &(report.to_json() + "\n"))?,
                Format::Csv => {
                    let w = output(out.as_deref())?;
                    report.write_csv(w)?;
                }
            }
            Ok(true)
        }
        Command::Compare {
            manifest,
            spec,
            alpha,
            seed,
            exclude_numeric,
            policy,
            out,
        } => {
            let manifest = load_manifest(&manifest)?;
            let mut spec = ComparisonSpec::load(&spec)?;
            if let Some(a) = alpha {
                spec.alpha = a;
            }
            let policy = read_policy(policy.as_deref())?;
            let report = compare_command(&manifest, &spec, &policy, resolve_seed(seed)?, exclude_numeric)?;
            write_all(out.as_deref(), &(report.to_json() + "\n"))?;
            for c in report.comparisons.iter().filter(|c| !c.is_ok()) {
                eprintln!("comparison {} failed: {}", c.key, c.error.as_deref().unwrap_or(""));
            }
            Ok(report.failed_slots() == 0)
        }
        Command::Plot {
            manifest,
            corpora,
            kind,
            relative,
            policy,
            out,
        } => {
            let manifest = load_manifest(&manifest)?;
            let policy = read_policy(policy.as_deref())?;
            let profiles = load_profiles(&manifest, &corpora, &policy)?;
            let kind = match kind {
                Kind::Cfd => PlotKind::CumulativeLength,
                Kind::Vowels => PlotKind::VowelBars,
            };
            let series = emit_plot_series(&profiles, kind, relative);
            write_plot_csv(&series, output(Some(&out))?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
