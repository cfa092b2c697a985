//! One frequent symbol's ψ segment: fixed-size blocks of `k` values, an
//! Elias-Fano sample index over block heads, a 2-bit mode tag per block and
//! the concatenated block payloads.

use std::io::{Read, Write};

use crate::bitio::{bit_width, ceil_log2, BitString, IntVector};
use crate::eliasfano::EliasFanoSequence;
use crate::error::{Error, Result};
use crate::uefblock::{decode_block_range, encode_block_into, plan_block, BlockCursor, BlockMode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentStructure {
    len: usize,
    samples: EliasFanoSequence,
    tags: IntVector,
    payload: BitString,
    // bit offset of each block's payload
    offsets: EliasFanoSequence,
}

/// Per-block facts used by the space report.
#[derive(Clone, Copy, Debug)]
pub struct BlockInfo {
    pub mode: BlockMode,
    /// Values in the block, sample included.
    pub values: usize,
    pub payload_bits: usize,
}

impl SegmentStructure {
    /// Builds from a strictly increasing segment of ψ values below `n`.
    pub fn build(values: &[u64], n: usize, k: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty segment".into()));
        }
        let nblocks = values.len().div_ceil(k);
        let mut heads = Vec::with_capacity(nblocks);
        let mut tags = IntVector::new(2);
        let mut payload = BitString::new();
        let mut starts = Vec::with_capacity(nblocks);
        for block in values.chunks(k) {
            let (head, rest) = (block[0], &block[1..]);
            heads.push(head);
            starts.push(payload.len() as u64);
            if rest.is_empty() {
                // a lone sample: nothing to code
                tags.push(BlockMode::Nil.tag());
                continue;
            }
            let plan = plan_block(head, rest)?;
            tags.push(plan.mode.tag());
            encode_block_into(&plan, head, rest, &mut payload)?;
        }
        let samples = EliasFanoSequence::encode(&heads, ceil_log2(n as u64))?;
        let offsets = EliasFanoSequence::encode(&starts, bit_width(payload.len() as u64))?;
        Ok(SegmentStructure {
            len: values.len(),
            samples,
            tags,
            payload,
            offsets,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_blocks(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &EliasFanoSequence {
        &self.samples
    }

    #[inline]
    fn block_len(&self, block: usize, k: usize) -> usize {
        (self.len - block * k).min(k)
    }

    #[inline]
    fn block_range(&self, block: usize) -> (usize, usize) {
        let start = self.offsets.get(block) as usize;
        let end = if block + 1 < self.num_blocks() {
            self.offsets.get(block + 1) as usize
        } else {
            self.payload.len()
        };
        (start, end)
    }

    #[inline]
    fn mode(&self, block: usize) -> BlockMode {
        BlockMode::from_tag(self.tags.get(block)).expect("2-bit tags are always valid")
    }

    fn cursor(&self, block: usize, head: u64, k: usize) -> BlockCursor<'_> {
        let (start, end) = self.block_range(block);
        BlockCursor::new(
            &self.payload,
            start,
            end,
            self.mode(block),
            head,
            self.block_len(block, k) - 1,
        )
        .expect("block payload validated at construction")
    }

    /// Locates `x`: returns the segment-local answer when it is decided by
    /// the sample index alone, otherwise the candidate block and the index
    /// of the first head `≥ x` (with that head, if any).
    #[inline]
    fn locate(&self, x: u64) -> Locate {
        match self.samples.successor(x) {
            Some((0, _)) => Locate::Done(0),
            Some((j, head)) if head == x => Locate::Done(j),
            Some((j, head)) => Locate::Block {
                block: j - 1,
                next_head: Some(head),
            },
            None => Locate::Block {
                block: self.num_blocks() - 1,
                next_head: None,
            },
        }
    }

    /// Segment-local GEQ: number of values `< x`.
    pub fn geq(&self, x: u64, k: usize) -> usize {
        match self.locate(x) {
            Locate::Done(j) => j * k,
            Locate::Block { block, .. } => {
                let head = self.samples.get(block);
                self.finish_in_block(&mut self.cursor(block, head, k), block, x, k)
            }
        }
    }

    #[inline]
    fn finish_in_block(&self, cur: &mut BlockCursor<'_>, block: usize, x: u64, k: usize) -> usize {
        match cur.seek(x) {
            Some((idx, _)) => block * k + 1 + idx,
            None => ((block + 1) * k).min(self.len),
        }
    }

    /// `(geq(lo), geq(hi))` for `lo ≤ hi`, reusing the block cursor of the
    /// first search for the second when both land in the same block.
    pub fn geq_pair(&self, lo: u64, hi: u64, k: usize) -> (usize, usize) {
        debug_assert!(lo <= hi);
        match self.locate(lo) {
            Locate::Done(j) => {
                let first = j * k;
                if hi == lo {
                    (first, first)
                } else {
                    (first, self.geq(hi, k))
                }
            }
            Locate::Block { block, next_head } => {
                let head = self.samples.get(block);
                let mut cur = self.cursor(block, head, k);
                let first = self.finish_in_block(&mut cur, block, lo, k);
                let same_block = next_head.is_none_or(|h| h >= hi);
                let second = if hi == lo {
                    first
                } else if same_block {
                    if next_head == Some(hi) {
                        (block + 1) * k
                    } else {
                        self.finish_in_block(&mut cur, block, hi, k)
                    }
                } else {
                    self.geq(hi, k)
                };
                (first, second)
            }
        }
    }

    pub fn decode(&self, k: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len);
        for (block, head) in self.samples.iter().enumerate() {
            out.push(head);
            out.extend(self.cursor(block, head, k));
        }
        out
    }

    pub fn blocks(&self, k: usize) -> impl Iterator<Item = BlockInfo> + '_ {
        (0..self.num_blocks()).map(move |j| {
            let (s, e) = self.block_range(j);
            BlockInfo {
                mode: self.mode(j),
                values: self.block_len(j, k),
                payload_bits: e - s,
            }
        })
    }

    pub fn samples_bytes(&self) -> usize {
        self.samples.serialized_len()
    }

    pub fn serialized_len(&self) -> usize {
        8 + self.samples.serialized_len()
            + self.tags.serialized_len()
            + self.payload.serialized_len()
            + self.offsets.serialized_len()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        crate::serial::write_u64(out, self.len as u64)?;
        self.samples.write_to(out)?;
        self.tags.write_to(out)?;
        self.payload.write_to(out)?;
        self.offsets.write_to(out)
    }

    /// Reads and fully validates one segment against the expected length.
    pub fn read_from<R: Read>(
        input: &mut R,
        expect_len: usize,
        n: usize,
        k: usize,
    ) -> Result<Self> {
        let len = crate::serial::read_len(input)?;
        let samples = EliasFanoSequence::read_from(input)?;
        let tags = IntVector::read_from(input)?;
        let payload = BitString::read_from(input)?;
        let offsets = EliasFanoSequence::read_from(input)?;
        let bad = |m: &str| Error::Format(format!("segment: {m}"));
        let nblocks = len.div_ceil(k);
        if len != expect_len {
            return Err(bad("length disagrees with symbol table"));
        }
        if samples.len() != nblocks || tags.len() != nblocks || offsets.len() != nblocks {
            return Err(bad("block count mismatch"));
        }
        if tags.width() != 2 || samples.universe_bits() != ceil_log2(n as u64) {
            return Err(bad("bad field widths"));
        }
        if offsets
            .iter()
            .last()
            .is_some_and(|o| o as usize > payload.len())
        {
            return Err(bad("block offset beyond payload"));
        }
        let seg = SegmentStructure {
            len,
            samples,
            tags,
            payload,
            offsets,
        };
        // every block must decode exactly and stay below the next head
        let heads: Vec<u64> = seg.samples.iter().collect();
        for (j, &head) in heads.iter().enumerate() {
            let (s, e) = seg.block_range(j);
            let b = seg.block_len(j, k) - 1;
            let vals = decode_block_range(&seg.payload, s, e, seg.mode(j), head, b)
                .map_err(|err| bad(&err.to_string()))?;
            let limit = heads.get(j + 1).copied().unwrap_or(n as u64);
            if vals.last().copied().unwrap_or(head) >= limit
                || (j + 1 < heads.len() && head >= limit)
            {
                return Err(bad("values out of order"));
            }
        }
        Ok(seg)
    }
}

enum Locate {
    Done(usize),
    Block {
        block: usize,
        next_head: Option<u64>,
    },
}
