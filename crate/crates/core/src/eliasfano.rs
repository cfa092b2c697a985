//! Elias-Fano coding of non-decreasing integer sequences.
//!
//! Each value is split into a high part, stored as unary bucket sizes, and an
//! `ℓ`-bit low part. A bucket of size `s` is written as `s` one-bits followed
//! by a zero-bit, so bucket `h` starts right after the `h`-th zero.

use std::io::{Read, Write};

use crate::bitio::{BitString, PlainBitvector};
use crate::error::{Error, Result};
use crate::serial;

/// `max(0, ⌊log₂(universe / k)⌋)` using integer division, which agrees with
/// the real-valued expression.
#[inline]
pub fn low_width(universe: u128, k: u128) -> usize {
    let q = universe / k.max(1);
    if q == 0 {
        0
    } else {
        127 - q.leading_zeros() as usize
    }
}

/// Appends the unary high part of `values` over `buckets` buckets.
pub(crate) fn write_high<I>(values: I, ell: usize, buckets: u64, out: &mut BitString)
where
    I: IntoIterator<Item = u64>,
{
    let mut bucket = 0u64;
    for v in values {
        let h = v >> ell;
        while bucket < h {
            out.push(false);
            bucket += 1;
        }
        out.push(true);
    }
    out.push_run(false, (buckets - bucket) as usize);
}

pub(crate) fn write_low<I>(values: I, ell: usize, out: &mut BitString)
where
    I: IntoIterator<Item = u64>,
{
    if ell == 0 {
        return;
    }
    let mask = (1u64 << ell) - 1;
    for v in values {
        out.push_bits(v & mask, ell);
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EliasFanoSequence {
    len: usize,
    universe_bits: usize,
    ell: usize,
    high: PlainBitvector,
    low: BitString,
}

impl EliasFanoSequence {
    /// Encodes `values` (non-decreasing, each below `2^universe_bits`).
    pub fn encode(values: &[u64], universe_bits: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "Elias-Fano input must be nonempty".into(),
            ));
        }
        if universe_bits > 64 {
            return Err(Error::InvalidInput("universe wider than 64 bits".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "Elias-Fano input must be non-decreasing".into(),
            ));
        }
        let last = *values.last().unwrap();
        if universe_bits < 64 && last >> universe_bits != 0 {
            return Err(Error::InvalidInput(format!(
                "value {last} outside universe 2^{universe_bits}"
            )));
        }
        let k = values.len();
        let ell = low_width(1u128 << universe_bits, k as u128);
        let buckets = ((1u128 << universe_bits) >> ell) as u64;
        let mut high = BitString::with_capacity(k + buckets as usize);
        write_high(values.iter().copied(), ell, buckets, &mut high);
        let mut low = BitString::with_capacity(k * ell);
        write_low(values.iter().copied(), ell, &mut low);
        Ok(EliasFanoSequence {
            len: k,
            universe_bits,
            ell,
            high: PlainBitvector::new(high),
            low,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe_bits(&self) -> usize {
        self.universe_bits
    }

    pub fn low_bits(&self) -> usize {
        self.ell
    }

    pub fn high(&self) -> &PlainBitvector {
        &self.high
    }

    pub fn low(&self) -> &BitString {
        &self.low
    }

    /// Encoded size: `k + 2^(U−ℓ) + k·ℓ`.
    pub fn size_in_bits(&self) -> usize {
        self.high.len() + self.low.len()
    }

    #[inline]
    fn low_at(&self, i: usize) -> u64 {
        self.low.read_bits(i * self.ell, self.ell)
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                what: "Elias-Fano element",
                index: i,
                limit: self.len,
            });
        }
        Ok(self.get(i))
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> u64 {
        let pos = self.high.select_impl(i, true);
        (((pos - i) as u64) << self.ell) | self.low_at(i)
    }

    /// First `(index, value)` with `value ≥ x`.
    pub fn successor(&self, x: u64) -> Option<(usize, u64)> {
        let bucket = x >> self.ell;
        let buckets = self.high.count_zeros() as u64;
        if bucket >= buckets {
            return None;
        }
        let (mut pos, mut idx) = if bucket == 0 {
            (0, 0)
        } else {
            let p = self.high.select_impl(bucket as usize - 1, false) + 1;
            (p, p - bucket as usize)
        };
        let mut cur = bucket;
        let bits = self.high.bits();
        while idx < self.len {
            if bits.get(pos) {
                let v = (cur << self.ell) | self.low_at(idx);
                if v >= x {
                    return Some((idx, v));
                }
                idx += 1;
            } else {
                cur += 1;
            }
            pos += 1;
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let bits = self.high.bits();
        let mut bucket = 0u64;
        let mut pos = 0usize;
        (0..self.len).map(move |i| {
            while !bits.get(pos) {
                bucket += 1;
                pos += 1;
            }
            pos += 1;
            (bucket << self.ell) | self.low_at(i)
        })
    }

    pub fn serialized_len(&self) -> usize {
        16 + self.high.serialized_len() + self.low.serialized_len()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        serial::write_u64(out, self.len as u64)?;
        serial::write_u64(out, self.universe_bits as u64)?;
        self.high.write_to(out)?;
        self.low.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let len = serial::read_len(input)?;
        let universe_bits = serial::read_len(input)?;
        let high = PlainBitvector::read_from(input)?;
        let low = BitString::read_from(input)?;
        if len == 0 || universe_bits > 64 {
            return Err(Error::Format("bad Elias-Fano header".into()));
        }
        let ell = low_width(1u128 << universe_bits, len as u128);
        let buckets = (1u128 << universe_bits) >> ell;
        if high.count_ones() != len
            || high.count_zeros() as u128 != buckets
            || low.len() != len * ell
        {
            return Err(Error::Format("Elias-Fano payload size mismatch".into()));
        }
        Ok(EliasFanoSequence {
            len,
            universe_bits,
            ell,
            high,
            low,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let ef = EliasFanoSequence::encode(&[6, 7, 10], 4).unwrap();
        assert_eq!(ef.low_bits(), 2);
        assert_eq!(ef.high().bits().to_string(), "0110100");
        assert_eq!(ef.low().to_string(), "101110");
        assert_eq!(ef.size_in_bits(), 13);
        assert_eq!(ef.access(2).unwrap(), 10);
        assert!(ef.access(3).is_err());
        assert_eq!(ef.successor(8), Some((2, 10)));
        assert_eq!(ef.successor(0), Some((0, 6)));
        assert_eq!(ef.successor(11), None);
        assert_eq!(ef.successor(1 << 20), None);
        // two low parts sit in the first two buckets
        assert_eq!(ef.high().select0(2).unwrap() - 2, 2);
    }

    #[test]
    fn singleton_zero() {
        // ℓ = ⌊log₂(2¹/1)⌋ = 1 leaves a single bucket
        let ef = EliasFanoSequence::encode(&[0], 1).unwrap();
        assert_eq!(ef.low_bits(), 1);
        assert_eq!(ef.high().bits().to_string(), "10");
        assert_eq!(ef.low().to_string(), "0");
        assert_eq!(ef.size_in_bits(), 3);
        assert_eq!(ef.access(0).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EliasFanoSequence::encode(&[16], 4).is_err());
        assert!(EliasFanoSequence::encode(&[3, 2], 4).is_err());
        assert!(EliasFanoSequence::encode(&[], 4).is_err());
    }

    #[test]
    fn dense_input_clamps_low_width() {
        let vals = [0, 1, 1, 2, 3, 3, 3];
        let ef = EliasFanoSequence::encode(&vals, 2).unwrap();
        assert_eq!(ef.low_bits(), 0);
        assert_eq!(ef.size_in_bits(), 7 + 4);
        assert_eq!(ef.iter().collect::<Vec<_>>(), vals);
    }

    #[test]
    fn serialization_roundtrip() {
        let ef = EliasFanoSequence::encode(&[1, 5, 5, 900, 1023], 10).unwrap();
        let mut buf = Vec::new();
        ef.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), ef.serialized_len());
        assert_eq!(
            EliasFanoSequence::read_from(&mut buf.as_slice()).unwrap(),
            ef
        );
    }

    fn sorted_values() -> impl Strategy<Value = (Vec<u64>, usize)> {
        (1usize..20).prop_flat_map(|u| {
            (
                proptest::collection::vec(0u64..(1u64 << u), 1..200),
                Just(u),
            )
                .prop_map(|(mut v, u)| {
                    v.sort_unstable();
                    (v, u)
                })
        })
    }

    proptest! {
        #[test]
        fn access_successor_and_size((vals, u) in sorted_values(), x in 0u64..(1 << 21)) {
            let ef = EliasFanoSequence::encode(&vals, u).unwrap();
            let k = vals.len();
            let ell = ef.low_bits();
            prop_assert_eq!(ef.size_in_bits(), k + (1usize << (u - ell)) + k * ell);
            for (i, &v) in vals.iter().enumerate() {
                prop_assert_eq!(ef.access(i).unwrap(), v);
            }
            prop_assert_eq!(ef.iter().collect::<Vec<_>>(), vals.clone());
            let expect = vals.iter().position(|&v| v >= x).map(|i| (i, vals[i]));
            prop_assert_eq!(ef.successor(x), expect);
            let x2 = x % (1u64 << u);
            let expect2 = vals.iter().position(|&v| v >= x2).map(|i| (i, vals[i]));
            prop_assert_eq!(ef.successor(x2), expect2);
            for h in 1..=(1usize << (u - ell)) {
                let below = vals.iter().filter(|&&v| ((v >> ell) as usize) < h).count();
                prop_assert_eq!(ef.high().select0(h).unwrap() - h, below);
            }
        }
    }
}
