//! Binary storage for symbols with at most `L` occurrences.
//!
//! `D[c] = 1` marks symbols stored as full segments. The remaining symbols
//! form `Σ'`; their frequencies, in increasing symbol order, are the sequence
//! `F` indexed by the wavelet tree. The ψ values of every symbol with
//! frequency `i` live in `A_i`, grouped per symbol in increasing symbol
//! order, so symbol `c` owns `A_{n_c}[n_c·s .. n_c·s + n_c]` where `s`
//! counts the earlier symbols of `Σ'` with the same frequency.

use std::io::{Read, Write};

use crate::bitio::{ceil_log2, IntVector, PlainBitvector};
use crate::error::{Error, Result};
use crate::psistore::wavelet::WaveletTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowFreqStore {
    threshold: usize,
    marks: PlainBitvector,
    freq_wt: WaveletTree,
    arrays: Vec<IntVector>,
}

impl LowFreqStore {
    /// `freqs[c]` is `n_c` for `c` in `0..=σ`; `segment_of(c)` yields ψ
    /// values of symbol `c`.
    pub(crate) fn build<'a, F>(
        freqs: &[usize],
        threshold: usize,
        n: usize,
        segment_of: F,
    ) -> Result<Self>
    where
        F: Fn(usize) -> &'a [usize],
    {
        let marks = PlainBitvector::from_bools(freqs.iter().map(|&f| f > threshold));
        let low: Vec<u64> = freqs
            .iter()
            .filter(|&&f| f <= threshold)
            .map(|&f| f as u64)
            .collect();
        let freq_wt = WaveletTree::new(&low, threshold as u64)?;
        let width = ceil_log2(n as u64);
        let mut arrays: Vec<IntVector> = (0..threshold).map(|_| IntVector::new(width)).collect();
        for (c, &f) in freqs.iter().enumerate() {
            if f <= threshold {
                for &v in segment_of(c) {
                    arrays[f - 1].push(v as u64);
                }
            }
        }
        Ok(LowFreqStore {
            threshold,
            marks,
            freq_wt,
            arrays,
        })
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// The `D` bitvector.
    pub fn marks(&self) -> &PlainBitvector {
        &self.marks
    }

    #[inline]
    pub fn is_segment(&self, c: usize) -> bool {
        self.marks.get(c)
    }

    /// Index among full segments of a symbol with `D[c] = 1`.
    #[inline]
    pub fn segment_index(&self, c: usize) -> usize {
        self.marks.rank1_unchecked(c)
    }

    /// Start of symbol `c`'s group in `A_{freq}`.
    #[inline]
    pub fn group_start(&self, c: usize, freq: usize) -> usize {
        let pos = c - self.marks.rank1_unchecked(c);
        let s = self.freq_wt.rank(freq as u64, pos);
        freq * s
    }

    #[inline]
    pub fn value(&self, freq: usize, i: usize) -> u64 {
        self.arrays[freq - 1].get(i)
    }

    pub fn group(&self, c: usize, freq: usize) -> Vec<u64> {
        let start = self.group_start(c, freq);
        (start..start + freq).map(|i| self.value(freq, i)).collect()
    }

    /// Local GEQ over symbol `c`'s group: values `< x`.
    #[inline]
    pub fn geq(&self, c: usize, freq: usize, x: u64) -> usize {
        let start = self.group_start(c, freq);
        (0..freq)
            .find(|&i| self.value(freq, start + i) >= x)
            .unwrap_or(freq)
    }

    #[inline]
    pub fn geq_pair(&self, c: usize, freq: usize, lo: u64, hi: u64) -> (usize, usize) {
        let start = self.group_start(c, freq);
        let mut i = 0;
        while i < freq && self.value(freq, start + i) < lo {
            i += 1;
        }
        let first = i;
        while i < freq && self.value(freq, start + i) < hi {
            i += 1;
        }
        (first, i)
    }

    /// Total number of stored ψ values.
    pub fn num_values(&self) -> usize {
        self.arrays.iter().map(IntVector::len).sum()
    }

    pub fn arrays(&self) -> &[IntVector] {
        &self.arrays
    }

    pub fn freq_wt(&self) -> &WaveletTree {
        &self.freq_wt
    }

    pub fn arrays_bytes(&self) -> usize {
        self.arrays.iter().map(IntVector::serialized_len).sum()
    }

    pub(crate) fn write_marks<W: Write>(&self, out: &mut W) -> Result<()> {
        self.marks.write_to(out)
    }

    pub(crate) fn write_wt<W: Write>(&self, out: &mut W) -> Result<()> {
        self.freq_wt.write_to(out)
    }

    pub(crate) fn write_arrays<W: Write>(&self, out: &mut W) -> Result<()> {
        crate::serial::write_u64(out, self.arrays.len() as u64)?;
        for a in &self.arrays {
            a.write_to(out)?;
        }
        Ok(())
    }

    /// Reassembles the store from its three sections and checks it against
    /// the symbol frequencies.
    pub(crate) fn read_parts<R: Read>(
        marks: &mut R,
        wt: &mut R,
        arrays: &mut R,
        freqs: &[usize],
        threshold: usize,
        n: usize,
    ) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("low-frequency store: {m}"));
        let marks = PlainBitvector::read_from(marks)?;
        let freq_wt = WaveletTree::read_from(wt)?;
        let count = crate::serial::read_len(arrays)?;
        if count != threshold {
            return Err(bad("array count differs from threshold"));
        }
        let mut arr = Vec::with_capacity(count);
        for _ in 0..count {
            arr.push(IntVector::read_from(arrays)?);
        }
        if marks.len() != freqs.len() {
            return Err(bad("D length mismatch"));
        }
        let mut expected = vec![0usize; threshold];
        let mut pos = 0;
        for (c, &f) in freqs.iter().enumerate() {
            if marks.get(c) != (f > threshold) {
                return Err(bad("D disagrees with frequencies"));
            }
            if f <= threshold {
                if pos >= freq_wt.len() || freq_wt.access(pos) != f as u64 {
                    return Err(bad("frequency sequence mismatch"));
                }
                pos += 1;
                expected[f - 1] += f;
            }
        }
        if pos != freq_wt.len() {
            return Err(bad("frequency sequence length mismatch"));
        }
        let width = ceil_log2(n as u64);
        for (a, &e) in arr.iter().zip(&expected) {
            if a.len() != e || a.width() != width || a.iter().any(|v| v as usize >= n) {
                return Err(bad("array size mismatch"));
            }
        }
        let store = LowFreqStore {
            threshold,
            marks,
            freq_wt,
            arrays: arr,
        };
        for (c, &f) in freqs.iter().enumerate() {
            if f <= threshold && store.group(c, f).windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad("group not strictly increasing"));
            }
        }
        Ok(store)
    }
}
