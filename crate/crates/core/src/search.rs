//! Backward search, greedy RLZ factorization and brute-force oracles.

use crate::corpus::{map_pattern, AlphabetMap, Pattern, SymbolId, Text};
use crate::psistore::PsiStore;

/// SA range `[sp, end)` of suffixes prefixed by a pattern. In inclusive
/// form the range is `(sp, end − 1)`; it is empty when `end ≤ sp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchRange {
    pub sp: usize,
    pub end: usize,
}

impl SearchRange {
    pub fn full(n: usize) -> Self {
        SearchRange { sp: 0, end: n }
    }

    /// Inclusive right end, or `None` when the range is empty.
    pub fn ep(&self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(self.end - 1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.sp
    }

    pub fn nocc(&self) -> usize {
        self.end.saturating_sub(self.sp)
    }

    /// Prepends symbol `c` to the pattern this range stands for.
    #[inline]
    pub fn extend(self, store: &PsiStore, c: SymbolId) -> Self {
        let (sp, end) = store.geq_pair_unchecked(c, self.sp, self.end);
        SearchRange { sp, end }
    }
}

/// Range of `pattern` processed right to left, stopping early once empty.
pub fn backward_search(store: &PsiStore, pattern: &Pattern) -> SearchRange {
    let mut range = SearchRange::full(store.n());
    for &c in pattern.symbols().iter().rev() {
        range = range.extend(store, c);
        if range.is_empty() {
            break;
        }
    }
    range
}

/// Occurrences of a source-symbol pattern; 0 if any symbol is outside the
/// alphabet, `n` for the empty pattern.
pub fn count(store: &PsiStore, alphabet: &AlphabetMap, source: &[u64]) -> usize {
    match map_pattern(source, alphabet) {
        Some(p) => backward_search(store, &p).nocc(),
        None => 0,
    }
}

/// Counts a batch of queries, in order.
#[cfg(feature = "parallel")]
pub fn count_batch(store: &PsiStore, alphabet: &AlphabetMap, queries: &[Vec<u64>]) -> Vec<usize> {
    use rayon::prelude::*;
    queries
        .par_iter()
        .map(|q| count(store, alphabet, q))
        .collect()
}

/// Counts a batch of queries, in order.
#[cfg(not(feature = "parallel"))]
pub fn count_batch(store: &PsiStore, alphabet: &AlphabetMap, queries: &[Vec<u64>]) -> Vec<usize> {
    count_batch_sequential(store, alphabet, queries)
}

pub fn count_batch_sequential(
    store: &PsiStore,
    alphabet: &AlphabetMap,
    queries: &[Vec<u64>],
) -> Vec<usize> {
    queries.iter().map(|q| count(store, alphabet, q)).collect()
}

/// Exact count by scanning `T[0, n−1)`; the empty pattern counts `n`.
pub fn naive_count(text: &Text, pattern: &[SymbolId]) -> usize {
    if pattern.is_empty() {
        return text.n();
    }
    let body = text.body();
    if pattern.len() > body.len() {
        return 0;
    }
    body.windows(pattern.len())
        .filter(|w| *w == pattern)
        .count()
}

/// One RLZ factor: a chunk of `length ≥ 1` symbols occurring in the
/// dictionary, or a literal symbol with `length = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RlzFactor {
    pub length: usize,
    pub literal: Option<u64>,
}

impl RlzFactor {
    /// Symbols of the stream this factor covers.
    pub fn span(&self) -> usize {
        self.length.max(1)
    }
}

/// Greedy factorization of `stream` (source symbols) against a dictionary
/// whose reversal is indexed by `store`. Feeding the stream forward as
/// successive backward-search steps over the reversed dictionary searches
/// each chunk in the forward dictionary.
pub fn factorize_rlz(store: &PsiStore, alphabet: &AlphabetMap, stream: &[u64]) -> Vec<RlzFactor> {
    let full = SearchRange::full(store.n());
    let mut factors = Vec::new();
    let mut range = full;
    let mut matched = 0;
    let mut j = 0;
    while j < stream.len() {
        let next = alphabet.id_of(stream[j]).map(|c| range.extend(store, c));
        match next {
            Some(r) if !r.is_empty() => {
                range = r;
                matched += 1;
                j += 1;
            }
            _ if matched == 0 => {
                factors.push(RlzFactor {
                    length: 0,
                    literal: Some(stream[j]),
                });
                j += 1;
            }
            _ => {
                // retry the offending symbol as the start of a new chunk
                factors.push(RlzFactor {
                    length: matched,
                    literal: None,
                });
                matched = 0;
                range = full;
            }
        }
    }
    if matched > 0 {
        factors.push(RlzFactor {
            length: matched,
            literal: None,
        });
    }
    factors
}

/// Mean factor length, literals counting as 0.
pub fn average_factor_length(factors: &[RlzFactor]) -> f64 {
    if factors.is_empty() {
        return 0.0;
    }
    factors.iter().map(|f| f.length).sum::<usize>() as f64 / factors.len() as f64
}
