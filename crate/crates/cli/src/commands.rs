use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::{Datelike, NaiveDate};
use tickbits::bitcore::{write_bit_file, BitFileMeta, RatioDirection, Symbolization};
use tickbits::ingest::{
    day_file_name, parse_clock, parse_message_file, restrict_session, write_day_file, ColumnMap, TradeDay,
};
use tickbits::pipeline::{
    compare_variants, export_bits, load_months, month_strings, outcome_counts, run_months, specs_for, summarize,
    write_boxplot_csv, write_export, write_paired_csv, ExportOptions, ExportSamples, MissingDays, MonthInput,
    ResultSet, RunConfig,
};
use tickbits::rngsrc::{mobius_bits, persistent_walk, prng_bits, GeneratorSpec, SyntheticMonth, WalkParams};
use tickbits::sanity::{run_sanity, ExclusionFile, LengthClass, Pooling, SanityConfig};
use tickbits::stattests::registry::{catalog_json, from_catalog_json, select};
use tickbits::stattests::{Alpha, NullModel, TestSpec};
use tickbits::Error;

use crate::{Command, Direction, GenKind, Global, MissingArg, MonthSel, NullArg, PoolingArg};

pub fn dispatch(g: &Global, command: Command) -> Result<ExitCode> {
    match command {
        Command::Ingest {
            files,
            columns,
            exec_codes,
            open,
            close,
        } => ingest(g, &files, &columns, exec_codes, &open, &close),
        Command::Gen {
            kind,
            n,
            rho,
            zero_prob,
            drift,
            ticker,
            date,
            days,
        } => {
            let walk = WalkParams {
                rho,
                zero_prob,
                drift,
                ..WalkParams::default()
            };
            generate(g, kind, n, walk, &ticker, date.as_deref(), days)
        }
        Command::Symbolize {
            sel,
            level,
            sample,
            median,
        } => symbolize(g, &sel, level, sample, median),
        Command::Sanity {
            generators,
            lengths,
            pooling,
        } => sanity(g, &generators, lengths, pooling),
        Command::Run {
            data,
            tickers,
            months,
            length_classes,
            median,
            missing,
            null_model,
            entropy_k,
        } => {
            let mut config = run_config(g, tickers, months)?;
            if let Some(text) = length_classes {
                config.length_classes = LengthClass::parse(&text)?;
            }
            if median {
                config.symbolization = Symbolization::Median;
            }
            config.missing = match missing {
                MissingArg::Warn => MissingDays::Warn,
                MissingArg::Fatal => MissingDays::Fatal,
            };
            config.null_model = match null_model {
                NullArg::Calibrated => NullModel::Calibrated,
                NullArg::Uniform => NullModel::Uniform,
            };
            config.entropy_k = entropy_k;
            run(g, &data, &config)
        }
        Command::Summarize { results } => summarize_file(g, &results),
        Command::ExportBits {
            sel,
            level,
            sample,
            all_samples,
            min_level,
        } => {
            let export = ExportOptions {
                level,
                samples: if all_samples { ExportSamples::All } else { ExportSamples::One(sample) },
                min_level,
            };
            export_month(g, &sel, &export)
        }
        Command::CompareVariants { sel } => compare(g, &sel),
        Command::Catalog => {
            let mut out = sink(g)?;
            writeln!(out, "{}", catalog_json(&specs(g)?)?)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn direction(g: &Global) -> RatioDirection {
    match g.ratio_direction {
        Direction::NewOverOld => RatioDirection::NewOverOld,
        Direction::OldOverNew => RatioDirection::OldOverNew,
    }
}

fn specs(g: &Global) -> Result<Vec<TestSpec>> {
    if g.tests.ends_with(".json") {
        let text = fs::read_to_string(&g.tests).with_context(|| format!("reading {}", g.tests))?;
        return Ok(from_catalog_json(&text)?);
    }
    Ok(select(&g.tests)?)
}

fn out_dir(g: &Global, default: &str) -> Result<PathBuf> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from(default));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// The `--out` file, or stdout.
fn sink(g: &Global) -> Result<Box<dyn Write>> {
    Ok(match &g.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run_config(g: &Global, tickers: Vec<String>, months: Vec<String>) -> Result<RunConfig> {
    let mut config = RunConfig::new(tickers, months, specs(g)?);
    config.max_level = g.max_level;
    config.alpha = Alpha::new(g.alpha)?;
    config.direction = direction(g);
    config.jobs = g.jobs;
    if let Some(path) = &g.exclusions {
        config.exclusions = Some(ExclusionFile::read(path)?);
    }
    Ok(config)
}

fn load_one(g: &Global, sel: &MonthSel) -> Result<(RunConfig, MonthInput)> {
    let config = run_config(g, vec![sel.ticker.clone()], vec![sel.month.clone()])?;
    let input = load_months(&sel.data, &config)?
        .into_iter()
        .next()
        .with_context(|| format!("no days for {} {}", sel.ticker, sel.month))?;
    Ok((config, input))
}

fn ingest(
    g: &Global,
    files: &[PathBuf],
    columns: &str,
    exec_codes: Vec<i32>,
    open: &str,
    close: &str,
) -> Result<ExitCode> {
    let map = ColumnMap::with_columns(columns, exec_codes)?;
    let (open, close) = (parse_clock(open)?, parse_clock(close)?);
    let dir = out_dir(g, ".")?;
    for path in files {
        let day = restrict_session(&parse_message_file(path, &map)?, open, close)?;
        if day.is_empty() {
            log::warn!("{}: no executions in the session", path.display());
        }
        let target = dir.join(day_file_name(&day.ticker, day.date));
        write_day_file(&target, &day)?;
        println!("{} {} {} executions -> {}", day.ticker, day.date, day.len(), target.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_month(text: &str) -> Result<(i32, u32)> {
    let d = NaiveDate::parse_from_str(&format!("{text}-01"), "%Y-%m-%d")
        .with_context(|| format!("month `{text}` is not YYYY-MM"))?;
    Ok((d.year(), d.month()))
}

fn generate(
    g: &Global,
    kind: GenKind,
    n: usize,
    walk: WalkParams,
    ticker: &str,
    date: Option<&str>,
    days: usize,
) -> Result<ExitCode> {
    match kind {
        GenKind::Prng | GenKind::Mobius => {
            let bits = if kind == GenKind::Prng { prng_bits(g.seed, n) } else { mobius_bits(n) };
            let mut out = sink(g)?;
            out.write_all(bits.to_ascii().as_bytes())?;
            out.flush()?;
        }
        GenKind::Walk => {
            let date = NaiveDate::parse_from_str(date.unwrap_or("2024-01-02"), "%Y-%m-%d")
                .context("--date must be YYYY-MM-DD for a walk")?;
            let prices = persistent_walk(g.seed, n + 1, &walk)?;
            let day = TradeDay {
                ticker: ticker.to_string(),
                date,
                times_ns: (0..prices.len() as u64).collect(),
                prices,
            };
            let path = match &g.out {
                Some(p) => p.clone(),
                None => PathBuf::from(day_file_name(ticker, date)),
            };
            write_day_file(&path, &day)?;
            eprintln!("{} prices -> {}", day.len(), path.display());
        }
        GenKind::Month => {
            let (year, month) = parse_month(date.unwrap_or("2024-01"))?;
            let synthetic = SyntheticMonth {
                ticker: ticker.to_string(),
                year,
                month,
                days,
                ticks_per_day: n,
                walk,
                seed: g.seed,
            };
            let dir = out_dir(g, "data")?;
            for day in synthetic.generate()? {
                write_day_file(&dir.join(day_file_name(&day.ticker, day.date)), &day)?;
            }
            eprintln!("{days} days of {ticker} -> {}", dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn symbolize(g: &Global, sel: &MonthSel, level: Option<usize>, sample: Option<usize>, median: bool) -> Result<ExitCode> {
    let (config, input) = load_one(g, sel)?;
    let mode = if median { Symbolization::Median } else { Symbolization::Base };
    let strings = month_strings(&input.days, level.unwrap_or(config.max_level), config.direction, mode)?;
    let dir = out_dir(g, "bits")?;
    let mut written = 0;
    for m in strings
        .iter()
        .filter(|m| level.is_none_or(|l| m.level == l) && sample.is_none_or(|j| m.sample == j))
    {
        write_bit_file(&dir, &m.bits, &BitFileMeta::for_month(m, config.direction))?;
        written += 1;
    }
    if written == 0 {
        bail!("no (level, sample) cell matches the selection");
    }
    eprintln!("{written} bit files -> {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn generator(g: &Global, name: &str) -> Result<GeneratorSpec> {
    Ok(match name {
        "prng" => GeneratorSpec::DocumentedPrng { seed: g.seed },
        "mobius" => GeneratorSpec::Mobius,
        "walk" => GeneratorSpec::PersistentWalk {
            seed: g.seed,
            params: WalkParams::default(),
        },
        other => match other.strip_prefix("file:") {
            Some(path) => GeneratorSpec::FileBits { path: path.into() },
            None => bail!("unknown generator `{other}` (prng, mobius, walk or file:PATH)"),
        },
    })
}

fn sanity(g: &Global, generators: &[String], lengths: Vec<usize>, pooling: PoolingArg) -> Result<ExitCode> {
    let generators: Vec<GeneratorSpec> = generators.iter().map(|n| generator(g, n)).collect::<Result<_>>()?;
    let config = SanityConfig {
        lengths,
        max_level: g.max_level,
        alpha: Alpha::new(g.alpha)?,
        pooling: match pooling {
            PoolingArg::Pooled => Pooling::Pooled,
            PoolingArg::WorstCase => Pooling::WorstCase,
        },
        direction: direction(g),
    };
    let specs = specs(g)?;
    let pool = RunConfig {
        jobs: g.jobs,
        ..RunConfig::new(vec![], vec![], vec![])
    };
    let report = pool.in_pool(|| run_sanity(&generators, &specs, &config))??;
    let dir = out_dir(g, "sanity")?;
    let csv_path = dir.join("sanity.csv");
    report.write_csv(File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?)?;
    let json_path = dir.join("exclusions.json");
    fs::write(&json_path, report.exclusions().to_json()?)?;
    let excluded: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.reason.is_some())
        .map(|r| format!("{}@{}", r.test_id, r.length))
        .collect();
    println!("{} rows, {} excluded: {}", report.rows.len(), excluded.len(), excluded.join(" "));
    println!("-> {}, {}", csv_path.display(), json_path.display());
    Ok(ExitCode::SUCCESS)
}

fn run(g: &Global, data: &Path, config: &RunConfig) -> Result<ExitCode> {
    let output = run_months(&load_months(data, config)?, config)?;
    let dir = out_dir(g, "results")?;
    let results = dir.join("results.csv");
    output
        .results
        .write_csv(BufWriter::new(File::create(&results).with_context(|| format!("creating {}", results.display()))?))?;
    fs::write(dir.join("manifest.json"), output.manifest.to_json()?)?;
    let counts: Vec<String> = outcome_counts(&output.results)
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    println!("{} rows ({}) -> {}", output.results.rows.len(), counts.join(" "), results.display());
    Ok(ExitCode::SUCCESS)
}

fn summarize_file(g: &Global, path: &Path) -> Result<ExitCode> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let results = ResultSet::read_csv(file)?;
    if results.is_empty() {
        bail!("{} holds no rows", path.display());
    }
    let mut out = sink(g)?;
    write_boxplot_csv(&summarize(&results), &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Exit status when the battery refuses to certify the bits.
const REFUSED: u8 = 2;

fn export_month(g: &Global, sel: &MonthSel, export: &ExportOptions) -> Result<ExitCode> {
    let (config, input) = load_one(g, sel)?;
    let strings = month_strings(&input.days, export.level, config.direction, config.symbolization)?;
    let level_one = strings.first().map_or(0, |m| m.bits.len());
    let (specs, _) = specs_for(&config, &sel.ticker, level_one)?;
    match export_bits(&strings, &specs, &config.battery_options(), export) {
        Ok((bits, cert)) => {
            let path = write_export(&out_dir(g, "export")?, &bits, &cert)?;
            println!(
                "{} bits ({} ties, {} days, {} certifying tests) -> {}",
                cert.n_bits,
                cert.ties,
                cert.days,
                cert.certifying_tests.len(),
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::ExportRefused(why)) => {
            eprintln!("export refused: {why}");
            Ok(ExitCode::from(REFUSED))
        }
        Err(e) => Err(e.into()),
    }
}

fn compare(g: &Global, sel: &MonthSel) -> Result<ExitCode> {
    let (config, input) = load_one(g, sel)?;
    let level_one = input.days.iter().map(|d| d.len().saturating_sub(1)).sum();
    let (specs, _) = specs_for(&config, &sel.ticker, level_one)?;
    let rows = config.in_pool(|| {
        compare_variants(&input.days, config.max_level, config.direction, &specs, &config.battery_options())
    })??;
    let mut out = sink(g)?;
    write_paired_csv(&rows, &mut out)?;
    out.flush()?;
    let agree = rows.iter().filter(|r| r.agree()).count();
    eprintln!("{agree}/{} paired decisions agree", rows.len());
    Ok(ExitCode::SUCCESS)
}
