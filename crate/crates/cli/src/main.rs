use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use csapp::corpus::{
    format_queries, load_byte_text, load_token_text, parse_queries, parse_tokens, Text, TextMode,
};
use csapp::psistore::DEFAULT_BLOCK_SIZE;
use csapp::search::average_factor_length;
use csapp::workload::{default_length, gen_queries, run_queries, DEFAULT_QUERY_COUNT};
use csapp::Index;

#[derive(Parser)]
#[command(name = "csapp", version, about = "Compressed suffix array count index")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Byte,
    Token,
}

impl From<Mode> for TextMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Byte => TextMode::Byte,
            Mode::Token => TextMode::Token,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an index over a text file.
    Build {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "byte")]
        mode: Mode,
        /// Block size.
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        k: usize,
        /// Low-frequency threshold (defaults to k).
        #[arg(long)]
        l: Option<usize>,
        /// Index the reversed text, as `factorize` expects of its dictionary.
        #[arg(long)]
        reverse: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Count occurrences of each query line; counts go to stdout.
    Count {
        index: PathBuf,
        queries: PathBuf,
        /// Expected query mode; must match the index.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Timing passes to average.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Shard queries across threads (output order is preserved).
        #[arg(long)]
        parallel: bool,
    },
    /// Print the space breakdown as CSV.
    Stats { index: PathBuf },
    /// Sample random substrings of a text as a query file.
    GenQueries {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "byte")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_QUERY_COUNT)]
        count: usize,
        /// Symbols per query (default 20 bytes or 4 tokens).
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Greedy RLZ factorization of a stream against a reversed-dictionary index.
    Factorize { index: PathBuf, stream: PathBuf },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_text(path: &Path, mode: TextMode) -> Result<Text> {
    let raw = read(path)?;
    Ok(match mode {
        TextMode::Byte => load_byte_text(&raw),
        TextMode::Token => {
            load_token_text(&raw).with_context(|| format!("parsing {}", path.display()))?
        }
    })
}

fn load_index(path: &Path) -> Result<Index> {
    let raw = read(path)?;
    Index::read_from(&mut raw.as_slice())
        .with_context(|| format!("loading index {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Build {
            input,
            mode,
            k,
            l,
            reverse,
            output,
        } => {
            if k < 2 {
                bail!("block size k={k} must be at least 2");
            }
            let mut text = load_text(&input, mode.into())?;
            if reverse {
                text = text.reversed();
            }
            let start = Instant::now();
            let index = Index::build(&text, k, l.unwrap_or(k))?;
            let elapsed = start.elapsed();
            let bytes = index.to_bytes();
            fs::write(&output, &bytes).with_context(|| format!("writing {}", output.display()))?;
            writeln!(out, "n={}", index.n())?;
            writeln!(out, "sigma={}", index.sigma())?;
            writeln!(out, "build_seconds={:.3}", elapsed.as_secs_f64())?;
            writeln!(out, "index_bytes={}", bytes.len())?;
        }
        Command::Count {
            index,
            queries,
            mode,
            runs,
            parallel,
        } => {
            let index = load_index(&index)?;
            if let Some(m) = mode {
                let m = TextMode::from(m);
                if m != index.mode() {
                    bail!(
                        "query mode {} does not match index mode {}",
                        m.as_str(),
                        index.mode().as_str()
                    );
                }
            }
            let qs = parse_queries(index.mode(), &read(&queries)?)?;
            let report = run_queries(&index, &qs, runs, parallel);
            for c in &report.counts {
                writeln!(out, "{c}")?;
            }
            out.flush()?;
            eprintln!(
                "queries={} symbols={} runs={} seconds={:.6} us_per_symbol={:.4}",
                report.counts.len(),
                report.total_symbols,
                report.runs,
                report.elapsed.as_secs_f64(),
                report.micros_per_symbol()
            );
        }
        Command::Stats { index } => {
            let index = load_index(&index)?;
            let report = index.space_report();
            writeln!(out, "component,psi_percent,bytes")?;
            for row in &report.rows {
                let pct = match report.fraction(row.component) {
                    Some(f) => format!("{:.2}", 100.0 * f),
                    None => String::new(),
                };
                writeln!(out, "{},{},{:.1}", row.component.label(), pct, row.bytes)?;
            }
            writeln!(out, "Total,100.00,{:.1}", report.total_bytes())?;
        }
        Command::GenQueries {
            input,
            mode,
            count,
            length,
            seed,
            output,
        } => {
            let mode = TextMode::from(mode);
            let text = load_text(&input, mode)?;
            let qs = gen_queries(&text, count, length.unwrap_or(default_length(mode)), seed)?;
            let bytes = format_queries(mode, &qs);
            match output {
                Some(p) => {
                    fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?
                }
                None => out.write_all(&bytes)?,
            }
        }
        Command::Factorize { index, stream } => {
            let index = load_index(&index)?;
            let raw = read(&stream)?;
            let symbols = match index.mode() {
                TextMode::Byte => raw.iter().map(|&b| u64::from(b)).collect(),
                TextMode::Token => parse_tokens(&raw, 0)?,
            };
            let factors = index.factorize(&symbols);
            for f in &factors {
                match f.literal {
                    Some(lit) => writeln!(out, "0 {lit}")?,
                    None => writeln!(out, "{}", f.length)?,
                }
            }
            out.flush()?;
            eprintln!(
                "factors={} symbols={} avg_length={:.4}",
                factors.len(),
                symbols.len(),
                average_factor_length(&factors)
            );
        }
    }
    out.flush()?;
    Ok(())
}
