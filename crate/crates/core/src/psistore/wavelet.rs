//! Wavelet matrix over small integers in `[1, max]`, used for
//! `rank(value, i)` over the sequence of low-frequency segment lengths.

use std::io::{Read, Write};

use crate::bitio::{bit_width, BitString, PlainBitvector};
use crate::error::{Error, Result};
use crate::serial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveletTree {
    len: usize,
    width: usize,
    levels: Vec<PlainBitvector>,
    zeros: Vec<usize>,
}

impl WaveletTree {
    /// Builds over `values`, each in `[1, max]`.
    pub fn new(values: &[u64], max: u64) -> Result<Self> {
        if values.iter().any(|&v| v == 0 || v > max) {
            return Err(Error::InvalidInput(format!(
                "wavelet values must lie in [1, {max}]"
            )));
        }
        let width = bit_width(max.saturating_sub(1));
        let mut cur: Vec<u64> = values.iter().map(|&v| v - 1).collect();
        let mut levels = Vec::with_capacity(width);
        for level in 0..width {
            let shift = width - 1 - level;
            let mut bits = BitString::with_capacity(cur.len());
            for &v in &cur {
                bits.push((v >> shift) & 1 == 1);
            }
            let (lo, hi): (Vec<u64>, Vec<u64>) = cur.iter().partition(|&&v| (v >> shift) & 1 == 0);
            cur = lo;
            cur.extend(hi);
            levels.push(PlainBitvector::new(bits));
        }
        let zeros = levels.iter().map(|l| l.count_zeros()).collect();
        Ok(WaveletTree {
            len: values.len(),
            width,
            levels,
            zeros,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Occurrences of `value` in the first `i` entries.
    pub fn rank(&self, value: u64, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if value == 0 || bit_width(value - 1) > self.width {
            return 0;
        }
        let v = value - 1;
        let (mut lo, mut hi) = (0usize, i);
        for (level, bv) in self.levels.iter().enumerate() {
            if (v >> (self.width - 1 - level)) & 1 == 0 {
                lo -= bv.rank1_unchecked(lo);
                hi -= bv.rank1_unchecked(hi);
            } else {
                lo = self.zeros[level] + bv.rank1_unchecked(lo);
                hi = self.zeros[level] + bv.rank1_unchecked(hi);
            }
        }
        hi - lo
    }

    /// Value at position `i`.
    pub fn access(&self, mut i: usize) -> u64 {
        debug_assert!(i < self.len);
        let mut v = 0u64;
        for (level, bv) in self.levels.iter().enumerate() {
            if bv.get(i) {
                v = (v << 1) | 1;
                i = self.zeros[level] + bv.rank1_unchecked(i);
            } else {
                v <<= 1;
                i -= bv.rank1_unchecked(i);
            }
        }
        v + 1
    }

    pub fn serialized_len(&self) -> usize {
        16 + self
            .levels
            .iter()
            .map(|l| l.serialized_len())
            .sum::<usize>()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        serial::write_u64(out, self.len as u64)?;
        serial::write_u64(out, self.width as u64)?;
        for l in &self.levels {
            l.write_to(out)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let len = serial::read_len(input)?;
        let width = serial::read_len(input)?;
        if width > 64 {
            return Err(Error::Format("wavelet width out of range".into()));
        }
        let mut levels = Vec::with_capacity(width);
        for _ in 0..width {
            let l = PlainBitvector::read_from(input)?;
            if l.len() != len {
                return Err(Error::Format("wavelet level length mismatch".into()));
            }
            levels.push(l);
        }
        let zeros = levels.iter().map(|l| l.count_zeros()).collect();
        Ok(WaveletTree {
            len,
            width,
            levels,
            zeros,
        })
    }
}
