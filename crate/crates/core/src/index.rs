//! The complete count index and its on-disk format.
//!
//! Layout, all integers little-endian: magic `CSAPPIDX`, version `u32`, then
//! `n`, `σ`, `k`, `L` as `u64`, the mode byte (0 byte, 1 token), the
//! alphabet map (`u64` count then one `u64` per source symbol), and finally
//! the ψ store sections.

use std::io::{Read, Write};

use crate::construction::{build_psi, build_suffix_array, build_symbol_table};
use crate::corpus::{AlphabetMap, Text, TextMode};
use crate::error::{Error, Result};
use crate::psistore::{build_psi_store, PsiStore, SpaceReport};
use crate::search::{self, RlzFactor};
use crate::serial;

pub const MAGIC: &[u8; 8] = b"CSAPPIDX";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Index {
    alphabet: AlphabetMap,
    store: PsiStore,
}

impl Index {
    /// Builds with block size `k` and low-frequency threshold `l`.
    pub fn build(text: &Text, k: usize, l: usize) -> Result<Self> {
        let sa = build_suffix_array(text);
        let psi = build_psi(&sa);
        drop(sa);
        let symtab = build_symbol_table(text);
        let store = build_psi_store(&psi, &symtab, k, l)?;
        Ok(Index {
            alphabet: text.alphabet().clone(),
            store,
        })
    }

    pub fn n(&self) -> usize {
        self.store.n()
    }

    pub fn sigma(&self) -> usize {
        self.store.sigma()
    }

    pub fn mode(&self) -> TextMode {
        self.alphabet.mode()
    }

    pub fn alphabet(&self) -> &AlphabetMap {
        &self.alphabet
    }

    pub fn store(&self) -> &PsiStore {
        &self.store
    }

    pub fn count(&self, source: &[u64]) -> usize {
        search::count(&self.store, &self.alphabet, source)
    }

    pub fn count_batch(&self, queries: &[Vec<u64>]) -> Vec<usize> {
        search::count_batch(&self.store, &self.alphabet, queries)
    }

    pub fn count_batch_sequential(&self, queries: &[Vec<u64>]) -> Vec<usize> {
        search::count_batch_sequential(&self.store, &self.alphabet, queries)
    }

    /// RLZ factorization of `stream`, treating this index as built over the
    /// reversed dictionary.
    pub fn factorize(&self, stream: &[u64]) -> Vec<RlzFactor> {
        search::factorize_rlz(&self.store, &self.alphabet, stream)
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut r = self.store.space_report();
        // header bytes land in Other
        let extra = (self.to_bytes().len() - self.store.serialized_len()) as f64;
        if let Some(other) = r
            .rows
            .iter_mut()
            .find(|row| row.component == crate::psistore::Component::Other)
        {
            other.bytes += extra;
        }
        r
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(MAGIC)?;
        serial::write_u32(out, VERSION)?;
        serial::write_u64(out, self.n() as u64)?;
        serial::write_u64(out, self.sigma() as u64)?;
        serial::write_u64(out, self.store.block_size() as u64)?;
        serial::write_u64(out, self.store.threshold() as u64)?;
        serial::write_u8(out, mode_byte(self.mode()))?;
        let syms = self.alphabet.source_symbols();
        serial::write_u64(out, syms.len() as u64)?;
        for &s in syms {
            serial::write_u64(out, s)?;
        }
        self.store.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let magic = serial::read_bytes(input, MAGIC.len())?;
        if magic != MAGIC {
            return Err(Error::Format("not an index file (bad magic)".into()));
        }
        let version = serial::read_u32(input)?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported index version {version} (expected {VERSION})"
            )));
        }
        let n = serial::read_len(input)?;
        let sigma = serial::read_len(input)?;
        let k = serial::read_len(input)?;
        let l = serial::read_len(input)?;
        let mode = match serial::read_u8(input)? {
            0 => TextMode::Byte,
            1 => TextMode::Token,
            b => return Err(Error::Format(format!("unknown text mode {b}"))),
        };
        let count = serial::read_len(input)?;
        if count != sigma {
            return Err(Error::Format("alphabet size disagrees with σ".into()));
        }
        let mut syms = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            syms.push(serial::read_u64(input)?);
        }
        let alphabet = AlphabetMap::new(mode, syms).map_err(|e| Error::Format(e.to_string()))?;
        let store = PsiStore::read_from(input, k, l)?;
        if store.n() != n || store.sigma() != sigma {
            return Err(Error::Format("header disagrees with symbol table".into()));
        }
        let mut probe = [0u8; 1];
        if input.read(&mut probe)? != 0 {
            return Err(Error::Format("trailing bytes after index".into()));
        }
        Ok(Index { alphabet, store })
    }
}

fn mode_byte(mode: TextMode) -> u8 {
    match mode {
        TextMode::Byte => 0,
        TextMode::Token => 1,
    }
}
