//! Bit-granular streams, Elias delta codes, packed integer arrays and a
//! plain bitvector with rank/select support.
//!
//! Stream convention: bits are read back in the order they were appended.
//! Multi-bit fields are appended most-significant bit first, so a field
//! written as `push_bits(0b10, 2)` reads back as the stream "10". On disk a
//! stream is its bit length (u64, little-endian) followed by the bits packed
//! least-significant-bit first into bytes, zero padded to a byte boundary.

use std::fmt;
use std::io::{Read, Write};

use crate::error::{decode_err, Error, Result};
use crate::serial;

#[inline]
fn low_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[inline]
fn reverse_field(value: u64, width: usize) -> u64 {
    if width == 0 {
        0
    } else {
        value.reverse_bits() >> (64 - width)
    }
}

/// Number of bits needed to write `v` in binary (0 for 0).
#[inline]
pub fn bit_width(v: u64) -> usize {
    (64 - v.leading_zeros()) as usize
}

/// `⌈log₂ n⌉`, with 0 for `n ≤ 1`.
#[inline]
pub fn ceil_log2(n: u64) -> usize {
    if n <= 1 {
        0
    } else {
        bit_width(n - 1)
    }
}

/// Append-only sequence of bits.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// Parses a string of `'0'`/`'1'` characters; any other character is
    /// ignored so `"0:110:10:0"` style annotations are accepted.
    pub fn from_str_bits(s: &str) -> Self {
        let mut out = BitString::new();
        for ch in s.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => {}
            }
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        self.push_lsb(bit as u64, 1);
    }

    /// Appends the low `width` bits of `value`, bit 0 first.
    pub fn push_lsb(&mut self, value: u64, width: usize) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        let value = value & low_mask(width);
        let off = self.len % 64;
        if off == 0 {
            self.words.push(value);
        } else {
            *self.words.last_mut().unwrap() |= value << off;
            if off + width > 64 {
                self.words.push(value >> (64 - off));
            }
        }
        self.len += width;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    #[inline]
    pub fn push_bits(&mut self, value: u64, width: usize) {
        self.push_lsb(reverse_field(value, width), width);
    }

    /// Appends `count` copies of `bit`.
    pub fn push_run(&mut self, bit: bool, mut count: usize) {
        let fill = if bit { u64::MAX } else { 0 };
        while count > 0 {
            let step = count.min(64);
            self.push_lsb(fill, step);
            count -= step;
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        let mut pos = 0;
        while pos < other.len {
            let step = (other.len - pos).min(64);
            self.push_lsb(other.chunk(pos, step), step);
            pos += step;
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Raw window of `width ≤ 64` bits starting at `pos`; stream bit
    /// `pos + j` lands in bit `j` of the result.
    #[inline]
    pub fn chunk(&self, pos: usize, width: usize) -> u64 {
        debug_assert!(pos + width <= self.len);
        if width == 0 {
            return 0;
        }
        let w = pos / 64;
        let off = pos % 64;
        let mut v = self.words[w] >> off;
        if off != 0 && off + width > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        v & low_mask(width)
    }

    /// Reads a `width`-bit field written with [`BitString::push_bits`].
    #[inline]
    pub fn read_bits(&self, pos: usize, width: usize) -> u64 {
        reverse_field(self.chunk(pos, width), width)
    }

    /// True if every bit in `[start, end)` is 0.
    pub fn is_zero_range(&self, mut start: usize, end: usize) -> bool {
        while start < end {
            let step = (end - start).min(64);
            if self.chunk(start, step) != 0 {
                return false;
            }
            start += step;
        }
        true
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Serialized size in bytes (length prefix included).
    pub fn serialized_len(&self) -> usize {
        8 + self.len.div_ceil(8)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        serial::write_u64(out, self.len as u64)?;
        let nbytes = self.len.div_ceil(8);
        let mut buf = Vec::with_capacity(nbytes);
        for w in &self.words {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        buf.truncate(nbytes);
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let len = serial::read_len(input)?;
        let nbytes = len.div_ceil(8);
        let bytes = serial::read_bytes(input, nbytes)?;
        let mut words = Vec::with_capacity(len.div_ceil(64));
        for chunk in bytes.chunks(8) {
            let mut raw = [0u8; 8];
            raw[..chunk.len()].copy_from_slice(chunk);
            words.push(u64::from_le_bytes(raw));
        }
        if len % 64 != 0 {
            let last = words.last_mut().unwrap();
            if *last & !low_mask(len % 64) != 0 {
                return Err(Error::Format("nonzero padding bits in bit stream".into()));
            }
        }
        Ok(BitString { words, len })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Sequential reader over a [`BitString`].
#[derive(Clone)]
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
    end: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString, pos: usize) -> Self {
        Self::bounded(bits, pos, bits.len())
    }

    /// Reader that treats `end` as the end of the stream.
    pub fn bounded(bits: &'a BitString, pos: usize, end: usize) -> Self {
        debug_assert!(end <= bits.len());
        BitReader { bits, pos, end }
    }

    #[inline]
    pub fn position(&self) -> usize {
        self.pos
    }

    #[inline]
    pub fn remaining(&self) -> usize {
        self.end.saturating_sub(self.pos)
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.end {
            return Err(decode_err("unexpected end of bit stream"));
        }
        let b = self.bits.get(self.pos);
        self.pos += 1;
        Ok(b)
    }

    #[inline]
    pub fn read_bits(&mut self, width: usize) -> Result<u64> {
        if self.remaining() < width {
            return Err(decode_err("unexpected end of bit stream"));
        }
        let v = self.bits.read_bits(self.pos, width);
        self.pos += width;
        Ok(v)
    }

    /// Counts and consumes 0 bits up to and including the next 1 bit.
    #[inline]
    pub fn read_zero_run(&mut self) -> Result<usize> {
        let start = self.pos;
        loop {
            let step = self.remaining().min(64);
            if step == 0 {
                return Err(decode_err("unterminated zero run"));
            }
            let w = self.bits.chunk(self.pos, step);
            if w != 0 {
                let tz = w.trailing_zeros() as usize;
                self.pos += tz + 1;
                return Ok(self.pos - 1 - start);
            }
            self.pos += step;
        }
    }

    /// Reads one Elias delta codeword.
    #[inline]
    pub fn read_delta(&mut self) -> Result<u64> {
        let zeros = self.read_zero_run()?;
        if zeros > 6 {
            return Err(decode_err("delta codeword length field overflows 64 bits"));
        }
        let len = (1u64 << zeros) | self.read_bits(zeros)?;
        if len > 64 {
            return Err(decode_err("delta codeword length field overflows 64 bits"));
        }
        let len = len as usize;
        let low = self.read_bits(len - 1)?;
        Ok(if len == 64 {
            (1u64 << 63) | low
        } else {
            (1u64 << (len - 1)) | low
        })
    }
}

/// Length in bits of the Elias delta codeword for `v ≥ 1`.
#[inline]
pub fn delta_len(v: u64) -> usize {
    debug_assert!(v >= 1);
    let len = bit_width(v);
    2 * (bit_width(len as u64) - 1) + 1 + (len - 1)
}

/// Appends the Elias delta codeword of `v ≥ 1`.
#[inline]
pub fn write_delta(out: &mut BitString, v: u64) {
    debug_assert!(v >= 1);
    let len = bit_width(v);
    let len_bits = bit_width(len as u64);
    out.push_run(false, len_bits - 1);
    out.push_bits(len as u64, len_bits);
    out.push_bits(v, len - 1);
}

/// Elias delta codeword of `v` as a standalone stream.
pub fn delta_encode(v: u64) -> Result<BitString> {
    if v == 0 {
        return Err(Error::InvalidInput("delta code is undefined for 0".into()));
    }
    let mut out = BitString::new();
    write_delta(&mut out, v);
    Ok(out)
}

/// Decodes the delta codeword at `cursor`, returning the value and the
/// position just past it.
pub fn delta_decode(stream: &BitString, cursor: usize) -> Result<(u64, usize)> {
    let mut r = BitReader::new(stream, cursor);
    let v = r.read_delta()?;
    Ok((v, r.position()))
}

const BLOCK_BITS: usize = 512;
const BLOCK_WORDS: usize = BLOCK_BITS / 64;

/// Position (0-based) of the `rank`-th (0-based) set bit of `w`.
#[inline]
fn select_in_word(mut w: u64, rank: usize) -> usize {
    for _ in 0..rank {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

/// Uncompressed bitvector with rank and select.
///
/// Rank is prefix-exclusive; select is 1-based in both its argument and its
/// result, so `select0(j)` is the 1-based position of the `j`-th 0 bit.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PlainBitvector {
    bits: BitString,
    // ones before each 512-bit block, plus a final total
    block_ranks: Vec<u64>,
}

impl PlainBitvector {
    pub fn new(bits: BitString) -> Self {
        let nblocks = bits.len().div_ceil(BLOCK_BITS);
        let mut block_ranks = Vec::with_capacity(nblocks + 1);
        let mut acc = 0u64;
        for b in 0..nblocks {
            block_ranks.push(acc);
            let ws =
                &bits.words()[b * BLOCK_WORDS..((b + 1) * BLOCK_WORDS).min(bits.words().len())];
            acc += ws.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        block_ranks.push(acc);
        PlainBitvector { bits, block_ranks }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(it: I) -> Self {
        let mut bs = BitString::new();
        for b in it {
            bs.push(b);
        }
        Self::new(bs)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        *self.block_ranks.last().unwrap() as usize
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    /// Number of 1 bits in `[0, i)`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len() {
            return Err(Error::OutOfRange {
                what: "rank position",
                index: i,
                limit: self.len(),
            });
        }
        Ok(self.rank1_unchecked(i))
    }

    /// Number of 0 bits in `[0, i)`.
    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.rank1(i)?)
    }

    #[inline]
    pub(crate) fn rank1_unchecked(&self, i: usize) -> usize {
        debug_assert!(i <= self.len());
        let block = i / BLOCK_BITS;
        let mut r = self.block_ranks[block] as usize;
        let words = self.bits.words();
        let first = block * BLOCK_WORDS;
        let last = i / 64;
        for w in &words[first..last] {
            r += w.count_ones() as usize;
        }
        if !i.is_multiple_of(64) {
            r += (words[last] & low_mask(i % 64)).count_ones() as usize;
        }
        r
    }

    /// 1-based position of the `j`-th 1 bit.
    pub fn select1(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.count_ones() {
            return Err(Error::OutOfRange {
                what: "select1 rank",
                index: j,
                limit: self.count_ones(),
            });
        }
        Ok(self.select_impl(j - 1, true) + 1)
    }

    /// 1-based position of the `j`-th 0 bit.
    pub fn select0(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.count_zeros() {
            return Err(Error::OutOfRange {
                what: "select0 rank",
                index: j,
                limit: self.count_zeros(),
            });
        }
        Ok(self.select_impl(j - 1, false) + 1)
    }

    /// 0-based position of the bit with 0-based rank `r` among bits equal to `one`.
    #[inline]
    pub(crate) fn select_impl(&self, r: usize, one: bool) -> usize {
        let count_before = |b: usize| -> usize {
            let ones = self.block_ranks[b] as usize;
            if one {
                ones
            } else {
                (b * BLOCK_BITS).min(self.len()) - ones
            }
        };
        // last block whose prefix count is <= r
        let (mut lo, mut hi) = (0usize, self.block_ranks.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if count_before(mid) <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = r - count_before(lo);
        let words = self.bits.words();
        let mut wi = lo * BLOCK_WORDS;
        loop {
            let mut w = words[wi];
            if !one {
                w = !w;
                let valid = self.len() - wi * 64;
                if valid < 64 {
                    w &= low_mask(valid);
                }
            }
            let c = w.count_ones() as usize;
            if remaining < c {
                return wi * 64 + select_in_word(w, remaining);
            }
            remaining -= c;
            wi += 1;
        }
    }

    pub fn serialized_len(&self) -> usize {
        self.bits.serialized_len()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        self.bits.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        Ok(Self::new(BitString::read_from(input)?))
    }
}

impl fmt::Debug for PlainBitvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlainBitvector({})", self.bits)
    }
}

/// Fixed-width packed unsigned integers.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct IntVector {
    width: usize,
    len: usize,
    bits: BitString,
}

impl IntVector {
    pub fn new(width: usize) -> Self {
        assert!(width <= 64);
        IntVector {
            width,
            len: 0,
            bits: BitString::new(),
        }
    }

    pub fn from_slice(width: usize, values: &[u64]) -> Self {
        let mut v = Self::new(width);
        for &x in values {
            v.push(x);
        }
        v
    }

    #[inline]
    pub fn push(&mut self, value: u64) {
        debug_assert!(self.width == 64 || value >> self.width == 0);
        self.bits.push_bits(value, self.width);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        self.bits.read_bits(i * self.width, self.width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn serialized_len(&self) -> usize {
        16 + self.bits.serialized_len()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        serial::write_u64(out, self.width as u64)?;
        serial::write_u64(out, self.len as u64)?;
        self.bits.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let width = serial::read_len(input)?;
        let len = serial::read_len(input)?;
        let bits = BitString::read_from(input)?;
        if width > 64 || width.checked_mul(len) != Some(bits.len()) {
            return Err(Error::Format("packed integer array size mismatch".into()));
        }
        Ok(IntVector { width, len, bits })
    }
}
