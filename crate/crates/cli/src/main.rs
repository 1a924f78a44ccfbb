mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Turn tick-by-tick prices into bit strings and test how random they are.
#[derive(Debug, Parser)]
#[command(name = "tickbits", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Global {
    /// Significance level for every test decision.
    #[arg(long, global = true, default_value_t = 0.01)]
    alpha: f64,
    /// Largest aggregation level.
    #[arg(long, global = true, default_value_t = 100)]
    max_level: usize,
    /// `all`, a comma-separated list of test ids, or a JSON catalog file.
    #[arg(long, global = true, default_value = "all")]
    tests: String,
    /// Exclusion file written by `sanity`.
    #[arg(long, global = true)]
    exclusions: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Direction::NewOverOld)]
    ratio_direction: Direction,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    NewOverOld,
    OldOverNew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    /// SplitMix64 bits, most significant bit first.
    Prng,
    /// Signs of the Möbius function.
    Mobius,
    /// One day of a persistent price walk.
    Walk,
    /// A month of synthetic walk days, ready for `run`.
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PoolingArg {
    Pooled,
    WorstCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MissingArg {
    Warn,
    Fatal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NullArg {
    Calibrated,
    Uniform,
}

/// Where the day files live and which month to read.
#[derive(Debug, Clone, Args)]
struct MonthSel {
    /// Directory of `TICKER_YYYY-MM-DD.day.csv` files.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    ticker: String,
    /// `YYYY-MM`.
    #[arg(long)]
    month: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract execution prices from message files into day files.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Field order of the message file.
        #[arg(long, default_value = "time,event_type,order_id,size,price,direction")]
        columns: String,
        #[arg(long, value_delimiter = ',', default_value = "4,5")]
        exec_codes: Vec<i32>,
        /// Session start, inclusive.
        #[arg(long, default_value = "09:30")]
        open: String,
        /// Session end, inclusive.
        #[arg(long, default_value = "16:00")]
        close: String,
    },
    /// Generate reference bits or synthetic prices.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Bits for `prng`/`mobius`, price moves for `walk`/`month` (per day).
        #[arg(long)]
        n: usize,
        /// Probability that a price move repeats the previous one.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        zero_prob: f64,
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long, default_value = "SYN")]
        ticker: String,
        /// `YYYY-MM` for `month`, `YYYY-MM-DD` for `walk`.
        #[arg(long)]
        date: Option<String>,
        /// Trading days for `month`.
        #[arg(long, default_value_t = 20)]
        days: usize,
    },
    /// Write the bit strings of one ticker-month as ASCII files with JSON sidecars.
    Symbolize {
        #[command(flatten)]
        sel: MonthSel,
        /// Only this level; every level up to `--max-level` otherwise.
        #[arg(long)]
        level: Option<usize>,
        /// Only this sample of `--level`.
        #[arg(long, requires = "level")]
        sample: Option<usize>,
        /// Median-balanced variant.
        #[arg(long)]
        median: bool,
    },
    /// Calibrate the battery on reference generators and write exclusions.
    Sanity {
        /// `prng`, `mobius`, `walk` or `file:PATH`.
        #[arg(long, value_delimiter = ',', default_value = "prng,mobius")]
        generators: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "50000,100000,500000,1000000")]
        lengths: Vec<usize>,
        #[arg(long, value_enum, default_value_t = PoolingArg::Pooled)]
        pooling: PoolingArg,
    },
    /// Run the battery over every level and sample of the selected months.
    Run {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        tickers: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        months: Vec<String>,
        /// `TICKER=LENGTH,...`; unlisted tickers get the nearest canonical length.
        #[arg(long)]
        length_classes: Option<String>,
        #[arg(long)]
        median: bool,
        #[arg(long, value_enum, default_value_t = MissingArg::Warn)]
        missing: MissingArg,
        #[arg(long, value_enum, default_value_t = NullArg::Calibrated)]
        null_model: NullArg,
        /// Entropy block length; `round(½·log₂ N)` when absent.
        #[arg(long)]
        entropy_k: Option<usize>,
    },
    /// Five-number summaries of a results table, per ticker, month, test and level.
    Summarize { results: PathBuf },
    /// Certify and write the bits of one level when no test rejects them.
    ExportBits {
        #[command(flatten)]
        sel: MonthSel,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1, conflicts_with = "all_samples")]
        sample: usize,
        /// Concatenate samples `1..=level` instead of one.
        #[arg(long)]
        all_samples: bool,
        #[arg(long, default_value_t = 1)]
        min_level: usize,
    },
    /// Base and median-balanced results side by side.
    CompareVariants {
        #[command(flatten)]
        sel: MonthSel,
    },
    /// Print the selected tests as a JSON catalog.
    Catalog,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(&cli.global, cli.command) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
