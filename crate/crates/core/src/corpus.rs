//! Text ingestion: byte and integer-token inputs remapped onto a dense,
//! order-preserving alphabet `1..=σ`, with the sentinel `0` appended.

use crate::error::{Error, Result};

/// Dense symbol id. `0` is reserved for the sentinel.
pub type SymbolId = u32;

pub const SENTINEL: SymbolId = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TextMode {
    Byte,
    Token,
}

impl TextMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TextMode::Byte => "byte",
            TextMode::Token => "token",
        }
    }
}

/// Bidirectional map between source symbols and dense ids.
///
/// Source symbols are bytes (byte mode) or token numbers (token mode), both
/// carried as `u64`. `symbols[id - 1]` is the source symbol of `id`; the
/// table is strictly increasing, which is what makes the remap
/// order-preserving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetMap {
    mode: TextMode,
    symbols: Vec<u64>,
}

impl AlphabetMap {
    pub fn new(mode: TextMode, symbols: Vec<u64>) -> Result<Self> {
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "alphabet map must be strictly increasing".into(),
            ));
        }
        if mode == TextMode::Byte && symbols.last().is_some_and(|&s| s > 255) {
            return Err(Error::InvalidInput(
                "byte alphabet holds a value above 255".into(),
            ));
        }
        Ok(AlphabetMap { mode, symbols })
    }

    pub fn mode(&self) -> TextMode {
        self.mode
    }

    pub fn sigma(&self) -> usize {
        self.symbols.len()
    }

    pub fn source_symbols(&self) -> &[u64] {
        &self.symbols
    }

    #[inline]
    pub fn id_of(&self, source: u64) -> Option<SymbolId> {
        self.symbols
            .binary_search(&source)
            .ok()
            .map(|i| (i + 1) as SymbolId)
    }

    #[inline]
    pub fn source_of(&self, id: SymbolId) -> Option<u64> {
        (id as usize)
            .checked_sub(1)
            .and_then(|i| self.symbols.get(i))
            .copied()
    }
}

/// Dense-alphabet text terminated by a unique sentinel.
#[derive(Clone, Debug)]
pub struct Text {
    symbols: Vec<SymbolId>,
    alphabet: AlphabetMap,
}

impl Text {
    /// Remaps `source` onto dense ids and appends the sentinel.
    pub fn from_source(mode: TextMode, source: &[u64]) -> Self {
        let mut distinct = source.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let alphabet = AlphabetMap::new(mode, distinct).expect("sorted and deduplicated");
        let mut symbols: Vec<SymbolId> = source
            .iter()
            .map(|&s| alphabet.id_of(s).expect("symbol present"))
            .collect();
        symbols.push(SENTINEL);
        Text { symbols, alphabet }
    }

    /// Length including the sentinel.
    #[inline]
    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn sigma(&self) -> usize {
        self.alphabet.sigma()
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    /// The text without its sentinel.
    pub fn body(&self) -> &[SymbolId] {
        &self.symbols[..self.symbols.len() - 1]
    }

    pub fn alphabet(&self) -> &AlphabetMap {
        &self.alphabet
    }

    pub fn mode(&self) -> TextMode {
        self.alphabet.mode
    }

    /// Source sequence the text was built from.
    pub fn unmap(&self) -> Vec<u64> {
        self.body()
            .iter()
            .map(|&id| self.alphabet.source_of(id).expect("dense id"))
            .collect()
    }

    /// Text over the reversed source sequence.
    pub fn reversed(&self) -> Text {
        let mut src = self.unmap();
        src.reverse();
        Text::from_source(self.mode(), &src)
    }
}

/// Pattern over the dense alphabet (never contains the sentinel).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pattern {
    symbols: Vec<SymbolId>,
}

impl Pattern {
    pub fn new(symbols: Vec<SymbolId>) -> Result<Self> {
        if symbols.contains(&SENTINEL) {
            return Err(Error::InvalidInput("pattern contains the sentinel".into()));
        }
        Ok(Pattern { symbols })
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    pub fn m(&self) -> usize {
        self.symbols.len()
    }
}

pub fn load_byte_text(raw: &[u8]) -> Text {
    let src: Vec<u64> = raw.iter().map(|&b| b as u64).collect();
    Text::from_source(TextMode::Byte, &src)
}

pub fn load_token_text(raw: &[u8]) -> Result<Text> {
    let src = parse_tokens(raw, 0)?;
    Ok(Text::from_source(TextMode::Token, &src))
}

/// Parses whitespace-separated decimal token ids; `base` offsets reported
/// byte positions.
pub fn parse_tokens(raw: &[u8], base: usize) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        if raw[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < raw.len() && !raw[i].is_ascii_whitespace() {
            i += 1;
        }
        let tok = &raw[start..i];
        let parsed = std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse::<u64>().ok());
        match parsed {
            Some(v) => out.push(v),
            None => {
                return Err(Error::Parse {
                    position: base + start,
                    message: format!("malformed token {:?}", String::from_utf8_lossy(tok)),
                })
            }
        }
    }
    Ok(out)
}

/// Maps a source pattern onto dense ids; `None` if any symbol is outside
/// the alphabet (such a pattern occurs zero times).
pub fn map_pattern(source: &[u64], alphabet: &AlphabetMap) -> Option<Pattern> {
    let symbols = source
        .iter()
        .map(|&s| alphabet.id_of(s))
        .collect::<Option<Vec<_>>>()?;
    Some(Pattern { symbols })
}

/// Parses a query file: one pattern per line.
///
/// Byte mode takes each line's raw bytes without the terminating `\n`; token
/// mode splits each line on whitespace.
pub fn parse_queries(mode: TextMode, raw: &[u8]) -> Result<Vec<Vec<u64>>> {
    let mut lines: Vec<&[u8]> = raw.split(|&b| b == b'\n').collect();
    if raw.is_empty() || raw.ends_with(b"\n") {
        lines.pop();
    }
    let mut out = Vec::with_capacity(lines.len());
    let mut offset = 0;
    for line in lines {
        out.push(match mode {
            TextMode::Byte => line.iter().map(|&b| b as u64).collect(),
            TextMode::Token => parse_tokens(line, offset)?,
        });
        offset += line.len() + 1;
    }
    Ok(out)
}

/// Inverse of [`parse_queries`].
pub fn format_queries(mode: TextMode, queries: &[Vec<u64>]) -> Vec<u8> {
    let mut out = Vec::new();
    for q in queries {
        match mode {
            TextMode::Byte => out.extend(q.iter().map(|&s| s as u8)),
            TextMode::Token => {
                let line = q.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                out.extend_from_slice(line.as_bytes());
            }
        }
        out.push(b'\n');
    }
    out
}
