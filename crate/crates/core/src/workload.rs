//! Random query workloads and timed query runs.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Text, TextMode};
use crate::error::{Error, Result};
use crate::index::Index;

pub const DEFAULT_QUERY_COUNT: usize = 50_000;
pub const DEFAULT_BYTE_LENGTH: usize = 20;
pub const DEFAULT_TOKEN_LENGTH: usize = 4;

pub fn default_length(mode: TextMode) -> usize {
    match mode {
        TextMode::Byte => DEFAULT_BYTE_LENGTH,
        TextMode::Token => DEFAULT_TOKEN_LENGTH,
    }
}

/// Extracts `count` substrings of `length` symbols at uniformly random
/// positions, returned as source symbols. In byte mode only windows free of
/// `'\n'` are eligible, since query files are newline-delimited.
pub fn gen_queries(text: &Text, count: usize, length: usize, seed: u64) -> Result<Vec<Vec<u64>>> {
    let body = text.unmap();
    if length == 0 || length > body.len() {
        return Err(Error::InvalidInput(format!(
            "query length {length} must lie in 1..={}",
            body.len()
        )));
    }
    let starts: Vec<usize> = match text.mode() {
        TextMode::Token => (0..=body.len() - length).collect(),
        TextMode::Byte => {
            let mut ok = Vec::new();
            let mut last_nl: Option<usize> = None;
            for (i, &b) in body.iter().enumerate() {
                if b == u64::from(b'\n') {
                    last_nl = Some(i);
                }
                // window [i+1−length, i] is clean when the last newline precedes it
                if i + 1 >= length && last_nl.is_none_or(|p| p + length <= i) {
                    ok.push(i + 1 - length);
                }
            }
            ok
        }
    };
    if starts.is_empty() && count > 0 {
        return Err(Error::InvalidInput(format!(
            "no newline-free window of length {length}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let s = starts[rng.random_range(0..starts.len())];
            body[s..s + length].to_vec()
        })
        .collect())
}

/// Outcome of running a query file against an index.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryReport {
    pub counts: Vec<usize>,
    pub total_symbols: usize,
    /// Mean wall time of one pass over all queries.
    pub elapsed: Duration,
    pub runs: usize,
}

impl QueryReport {
    pub fn micros_per_symbol(&self) -> f64 {
        if self.total_symbols == 0 {
            return 0.0;
        }
        self.elapsed.as_secs_f64() * 1e6 / self.total_symbols as f64
    }
}

/// Counts every query `runs` times and averages the elapsed time.
pub fn run_queries(
    index: &Index,
    queries: &[Vec<u64>],
    runs: usize,
    parallel: bool,
) -> QueryReport {
    let runs = runs.max(1);
    let mut counts = Vec::new();
    let mut total = Duration::ZERO;
    for _ in 0..runs {
        let start = Instant::now();
        counts = if parallel {
            index.count_batch(queries)
        } else {
            index.count_batch_sequential(queries)
        };
        total += start.elapsed();
    }
    QueryReport {
        counts,
        total_symbols: queries.iter().map(Vec::len).sum(),
        elapsed: total / runs as u32,
        runs,
    }
}
