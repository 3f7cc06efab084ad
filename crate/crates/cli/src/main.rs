//! `gonal`: escalation runs, criterion sets, single-form checks and
//! reference-table reproduction for sums of generalized m-gonal numbers.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gonal_core::tables::Format;
use gonal_core::DEFAULT_BOUND;

#[derive(Parser, Debug)]
#[command(name = "gonal", version, about)]
struct Cli {
    /// Only print warnings and errors to standard error.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the escalation and list the new universal candidates.
    Escalate(RunArgs),
    /// Compute CS(m, n) and its maximum.
    Criterion {
        #[command(flatten)]
        run: RunArgs,
        /// Build and verify a minimality witness for every element.
        #[arg(long)]
        witnesses: bool,
    },
    /// Check tightness, universality and newness of one form.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Coefficients, e.g. `1,2,5,5`.
        vector: String,
    },
    /// Recompute a reference table and diff it against the bundled data.
    Tables {
        #[command(flatten)]
        run: RunArgs,
        /// Table id (1-8).
        #[arg(long)]
        id: u32,
        /// Restrict tables 1 and 4 to these values of m.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<u64>,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Polygonal order (m >= 3).
    #[arg(long, short = 'm', value_parser = clap::value_parser!(u64).range(3..))]
    m: Option<u64>,
    /// Smallest integer that must be represented (n >= 1).
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Integers above this are not examined.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: u64,
    /// Depth guard; defaults to 2n + 16.
    #[arg(long)]
    max_depth: Option<usize>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, short = 'j', value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    format: OutputFormat,
    /// Write the formatted result here instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Also write the result as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Truant cache directory (overrides $GONAL_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the truant cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutputFormat {
    Markdown,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Markdown => Format::Markdown,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            e.downcast_ref::<commands::Failure>()
                .map_or(ExitCode::FAILURE, commands::Failure::exit_code)
        }
    }
}
