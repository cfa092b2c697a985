//! Per-block codec for ψ blocks.
//!
//! A block is a sample (its first ψ value, stored elsewhere) plus `b`
//! strictly larger values coded as offsets `o = v − sample ∈ [1, u]`, where
//! `u` is the offset of the last value. Four modes:
//!
//! * NIL: `u = b`, the values are `sample+1 ..= sample+b`; no payload.
//! * BV: `u` bits, bit `o − 1` set for each offset.
//! * EF: Elias-Fano over the offsets with `ℓ = ⌊log₂(u/b)⌋` and
//!   `(u ≫ ℓ) + 1` buckets, high part first.
//! * RL: delta-coded gaps; a maximal run of `r` unit gaps is `δ(1) δ(r)`.
//!
//! None of the modes store `u` or `ℓ`: BV's `u` is the payload length and an
//! EF payload of `P` bits admits exactly one `ℓ` (see [`ef_shape`]).

use crate::bitio::{delta_len, write_delta, BitReader, BitString};
use crate::eliasfano::{low_width, write_high, write_low};
use crate::error::{decode_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockMode {
    Nil = 0,
    Bv = 1,
    Ef = 2,
    Rl = 3,
}

impl BlockMode {
    pub const ALL: [BlockMode; 4] = [BlockMode::Nil, BlockMode::Bv, BlockMode::Ef, BlockMode::Rl];

    pub fn tag(self) -> u64 {
        self as u64
    }

    pub fn from_tag(tag: u64) -> Result<Self> {
        match tag {
            0 => Ok(BlockMode::Nil),
            1 => Ok(BlockMode::Bv),
            2 => Ok(BlockMode::Ef),
            3 => Ok(BlockMode::Rl),
            _ => Err(decode_err(format!("unknown block mode tag {tag}"))),
        }
    }
}

/// Candidate sizes in bits for a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockCosts {
    pub bv: u64,
    pub ef: u64,
    pub rl: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub mode: BlockMode,
    /// Number of coded values (the sample excluded).
    pub b: usize,
    /// Offset of the last value from the sample.
    pub u: u64,
    pub costs: BlockCosts,
}

impl BlockPlan {
    /// Payload size of the selected mode.
    pub fn cost(&self) -> u64 {
        match self.mode {
            BlockMode::Nil => 0,
            BlockMode::Bv => self.costs.bv,
            BlockMode::Ef => self.costs.ef,
            BlockMode::Rl => self.costs.rl,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedBlock {
    pub payload: BitString,
}

/// One item of an RL gap stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlToken {
    /// `r` consecutive unit gaps.
    Run(u64),
    /// A single gap `g ≥ 2`.
    Gap(u64),
}

/// Gap tokens of `[sample] + values`.
pub fn rl_tokens(sample: u64, values: &[u64]) -> Vec<RlToken> {
    let mut out = Vec::new();
    let mut prev = sample;
    for &v in values {
        let g = v - prev;
        prev = v;
        match (g, out.last_mut()) {
            (1, Some(RlToken::Run(r))) => *r += 1,
            (1, _) => out.push(RlToken::Run(1)),
            _ => out.push(RlToken::Gap(g)),
        }
    }
    out
}

fn rl_cost(sample: u64, values: &[u64]) -> u64 {
    rl_tokens(sample, values)
        .into_iter()
        .map(|t| match t {
            RlToken::Run(r) => 1 + delta_len(r) as u64,
            RlToken::Gap(g) => delta_len(g) as u64,
        })
        .sum()
}

/// EF parameters for `b` offsets spanning `u`: `(ℓ, buckets)`.
#[inline]
fn ef_params(b: usize, u: u64) -> (usize, u64) {
    let ell = low_width(u as u128, b as u128);
    (ell, (u >> ell) + 1)
}

/// Recovers `(ℓ, buckets)` from the payload length of an EF block.
///
/// With `ℓ = ⌊log₂(u/b)⌋` the bucket count `(u ≫ ℓ) + 1` lies in
/// `[b + 1, 2b]`, so `P − b = buckets + b·ℓ` identifies `ℓ` uniquely.
pub fn ef_shape(payload_len: usize, b: usize) -> Result<(usize, u64)> {
    let rest = payload_len
        .checked_sub(b)
        .filter(|&r| b > 0 && r > b)
        .ok_or_else(|| decode_err("EF block payload too short"))?;
    let ell = (rest - b - 1) / b;
    if ell >= 64 {
        return Err(decode_err("EF block low width out of range"));
    }
    Ok((ell, (rest - b * ell) as u64))
}

fn check_values(sample: u64, values: &[u64]) -> Result<()> {
    let mut prev = sample;
    for &v in values {
        if v <= prev {
            return Err(Error::InvalidInput(
                "block values must be strictly increasing above the sample".into(),
            ));
        }
        prev = v;
    }
    Ok(())
}

/// Chooses the block mode: NIL when the offsets are `1..=b`; RL when it is
/// less than half of the cheaper of BV and EF; otherwise the cheaper of BV
/// and EF, BV on ties.
pub fn plan_block(sample: u64, values: &[u64]) -> Result<BlockPlan> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot plan an empty block".into()));
    }
    check_values(sample, values)?;
    let b = values.len();
    let u = values[b - 1] - sample;
    let (ell, buckets) = ef_params(b, u);
    let costs = BlockCosts {
        bv: u,
        ef: b as u64 + buckets + (b * ell) as u64,
        rl: rl_cost(sample, values),
    };
    let mode = if u == b as u64 {
        BlockMode::Nil
    } else if 2 * costs.rl < costs.bv.min(costs.ef) {
        BlockMode::Rl
    } else if costs.bv <= costs.ef {
        BlockMode::Bv
    } else {
        BlockMode::Ef
    };
    Ok(BlockPlan { mode, b, u, costs })
}

pub fn encode_block(plan: &BlockPlan, sample: u64, values: &[u64]) -> Result<EncodedBlock> {
    let mut payload = BitString::new();
    encode_block_into(plan, sample, values, &mut payload)?;
    Ok(EncodedBlock { payload })
}

/// Appends the payload for `plan` to `out`.
pub fn encode_block_into(
    plan: &BlockPlan,
    sample: u64,
    values: &[u64],
    out: &mut BitString,
) -> Result<()> {
    if values.len() != plan.b || values.last().map(|&v| v.wrapping_sub(sample)) != Some(plan.u) {
        return Err(Error::InvalidInput(
            "block plan does not match values".into(),
        ));
    }
    check_values(sample, values)?;
    let offsets = values.iter().map(|&v| v - sample);
    match plan.mode {
        BlockMode::Nil => {
            if plan.u != plan.b as u64 {
                return Err(Error::InvalidInput(
                    "NIL block must be a consecutive run".into(),
                ));
            }
        }
        BlockMode::Bv => {
            let mut next = 1u64;
            for o in offsets {
                out.push_run(false, (o - next) as usize);
                out.push(true);
                next = o + 1;
            }
        }
        BlockMode::Ef => {
            let (ell, buckets) = ef_params(plan.b, plan.u);
            write_high(offsets.clone(), ell, buckets, out);
            write_low(offsets, ell, out);
        }
        BlockMode::Rl => {
            for t in rl_tokens(sample, values) {
                match t {
                    RlToken::Run(r) => {
                        write_delta(out, 1);
                        write_delta(out, r);
                    }
                    RlToken::Gap(g) => write_delta(out, g),
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum CursorState {
    Nil,
    Bv,
    Ef {
        ell: usize,
        // end of the high part; low parts start here
        low_start: usize,
        bucket: u64,
    },
    Rl {
        pending_run: u64,
    },
}

/// Resumable sequential decoder over one block's values.
///
/// The cursor remembers the last value it produced, so a second, larger
/// successor query continues where the first one stopped.
#[derive(Clone, Debug)]
pub struct BlockCursor<'a> {
    bits: &'a BitString,
    pos: usize,
    end: usize,
    sample: u64,
    b: usize,
    produced: usize,
    // last decoded value (the sample before the first)
    value: u64,
    current: Option<(usize, u64)>,
    state: CursorState,
}

impl<'a> BlockCursor<'a> {
    /// Cursor over the payload `bits[start..end]`.
    pub fn new(
        bits: &'a BitString,
        start: usize,
        end: usize,
        mode: BlockMode,
        sample: u64,
        b: usize,
    ) -> Result<Self> {
        if end > bits.len() || start > end {
            return Err(decode_err("block payload range outside stream"));
        }
        let len = end - start;
        let state = match mode {
            BlockMode::Nil => {
                if len != 0 {
                    return Err(decode_err("NIL block with nonempty payload"));
                }
                CursorState::Nil
            }
            BlockMode::Bv => CursorState::Bv,
            BlockMode::Ef => {
                let (ell, buckets) = ef_shape(len, b)?;
                CursorState::Ef {
                    ell,
                    low_start: start + b + buckets as usize,
                    bucket: 0,
                }
            }
            BlockMode::Rl => CursorState::Rl { pending_run: 0 },
        };
        Ok(BlockCursor {
            bits,
            pos: start,
            end,
            sample,
            b,
            produced: 0,
            value: sample,
            current: None,
            state,
        })
    }

    /// Advances `pos` past the next 1 bit before `limit`; returns the
    /// number of 0 bits skipped.
    #[inline]
    fn skip_to_one(&mut self, limit: usize) -> Option<u64> {
        let mut zeros = 0u64;
        loop {
            let step = limit.saturating_sub(self.pos).min(64);
            if step == 0 {
                return None;
            }
            let w = self.bits.chunk(self.pos, step);
            if w != 0 {
                let tz = w.trailing_zeros() as usize;
                self.pos += tz + 1;
                return Some(zeros + tz as u64);
            }
            zeros += step as u64;
            self.pos += step;
        }
    }

    #[inline]
    fn try_advance(&mut self) -> Result<Option<u64>> {
        if self.produced == self.b {
            return Ok(None);
        }
        let v = match &mut self.state {
            CursorState::Nil => self.value + 1,
            CursorState::Bv => {
                let start = self.pos;
                let end = self.end;
                let zeros = self
                    .skip_to_one(end)
                    .ok_or_else(|| decode_err("BV block has fewer set bits than values"))?;
                debug_assert_eq!(zeros as usize + 1, self.pos - start);
                self.value + zeros + 1
            }
            CursorState::Ef {
                ell,
                low_start,
                bucket,
            } => {
                let (ell, low_start, mut b) = (*ell, *low_start, *bucket);
                let zeros = self
                    .skip_to_one(low_start)
                    .ok_or_else(|| decode_err("EF block high part exhausted"))?;
                b += zeros;
                if let CursorState::Ef { bucket, .. } = &mut self.state {
                    *bucket = b;
                }
                let low = self.bits.read_bits(low_start + self.produced * ell, ell);
                let v = self.sample + ((b << ell) | low);
                if v <= self.value {
                    return Err(decode_err("EF block values not strictly increasing"));
                }
                v
            }
            CursorState::Rl { pending_run } => {
                if *pending_run > 0 {
                    *pending_run -= 1;
                    self.value + 1
                } else {
                    let mut r = BitReader::bounded(self.bits, self.pos, self.end);
                    let g = r.read_delta()?;
                    let v = if g == 1 {
                        let run = r.read_delta()?;
                        if run as u128 > (self.b - self.produced) as u128 {
                            return Err(decode_err("RL run longer than the block"));
                        }
                        *pending_run = run - 1;
                        self.value + 1
                    } else {
                        self.value
                            .checked_add(g)
                            .ok_or_else(|| decode_err("RL gap overflow"))?
                    };
                    self.pos = r.position();
                    v
                }
            }
        };
        self.value = v;
        self.current = Some((self.produced, v));
        self.produced += 1;
        Ok(Some(v))
    }

    /// Consumes values below `x` without decoding them one at a time: NIL
    /// and RL runs by arithmetic, BV by popcount, EF by whole buckets.
    fn skip_below(&mut self, x: u64) -> Result<()> {
        let ahead = match x.checked_sub(self.value + 1) {
            Some(d) if d > 0 => d,
            _ => return Ok(()),
        };
        let left = self.b - self.produced;
        let skipped = match &mut self.state {
            CursorState::Nil => {
                let s = ahead.min(left as u64) as usize;
                self.value += s as u64;
                s
            }
            CursorState::Rl { pending_run } => {
                let s = ahead.min(*pending_run);
                *pending_run -= s;
                self.value += s;
                s as usize
            }
            CursorState::Bv => {
                // bit `pos` stands for value + 1
                let target = self.pos + ahead.min((self.end - self.pos) as u64) as usize;
                let mut ones = 0usize;
                let mut p = self.pos;
                while p < target {
                    let step = (target - p).min(64);
                    ones += self.bits.chunk(p, step).count_ones() as usize;
                    p += step;
                }
                if ones > left {
                    return Err(decode_err("BV block has more set bits than values"));
                }
                self.value += (target - self.pos) as u64;
                self.pos = target;
                ones
            }
            CursorState::Ef { .. } => {
                self.ef_skip(x);
                return Ok(());
            }
        };
        if skipped > 0 {
            self.current = None;
            self.produced += skipped;
        }
        Ok(())
    }

    /// EF only: jumps over whole buckets lying entirely below `x`.
    fn ef_skip(&mut self, x: u64) {
        let CursorState::Ef {
            ell,
            low_start,
            bucket,
        } = self.state
        else {
            return;
        };
        if x <= self.sample {
            return;
        }
        let target = (x - self.sample) >> ell;
        if target <= bucket {
            return;
        }
        let mut need = target - bucket;
        let mut pos = self.pos;
        let mut ones = 0usize;
        loop {
            let step = low_start.saturating_sub(pos).min(64);
            if step == 0 {
                // x lies beyond the last bucket
                return;
            }
            let w = self.bits.chunk(pos, step);
            let zw = !w
                & if step == 64 {
                    u64::MAX
                } else {
                    (1u64 << step) - 1
                };
            let z = zw.count_ones() as u64;
            if z < need {
                need -= z;
                ones += w.count_ones() as usize;
                pos += step;
                continue;
            }
            let mut m = zw;
            for _ in 0..need - 1 {
                m &= m - 1;
            }
            let p = m.trailing_zeros() as usize;
            ones += (w & ((1u64 << p) - 1)).count_ones() as usize;
            pos += p + 1;
            break;
        }
        if ones > 0 {
            // every skipped value lies below x
            self.current = None;
            self.value = self.sample + (target << ell) - 1;
        }
        self.produced += ones;
        self.pos = pos;
        self.state = CursorState::Ef {
            ell,
            low_start,
            bucket: target,
        };
    }

    /// Smallest value `≥ x` at or after the cursor, with its index among
    /// the block's coded values.
    #[inline]
    pub fn seek(&mut self, x: u64) -> Option<(usize, u64)> {
        self.try_seek(x)
            .expect("block payload validated at construction")
    }

    pub fn try_seek(&mut self, x: u64) -> Result<Option<(usize, u64)>> {
        if let Some((i, v)) = self.current {
            if v >= x {
                return Ok(Some((i, v)));
            }
        }
        loop {
            self.skip_below(x)?;
            match self.try_advance()? {
                Some(v) if v >= x => return Ok(self.current),
                Some(_) => {}
                None => return Ok(None),
            }
        }
    }

    /// Checks that the payload was consumed exactly.
    fn finish(&mut self) -> Result<()> {
        while self.try_advance()?.is_some() {}
        let exact = match self.state {
            CursorState::Nil => true,
            CursorState::Bv => self.bits.is_zero_range(self.pos, self.end),
            CursorState::Ef { low_start, ell, .. } => {
                self.bits.is_zero_range(self.pos, low_start) && low_start + self.b * ell == self.end
            }
            CursorState::Rl { pending_run } => pending_run == 0 && self.pos == self.end,
        };
        if exact {
            Ok(())
        } else {
            Err(decode_err("block payload has trailing data"))
        }
    }
}

impl Iterator for BlockCursor<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        self.try_advance()
            .expect("block payload validated at construction")
    }
}

/// Decodes all `b` values of a block, validating the payload.
pub fn decode_block(
    payload: &BitString,
    mode: BlockMode,
    sample: u64,
    b: usize,
) -> Result<Vec<u64>> {
    decode_block_range(payload, 0, payload.len(), mode, sample, b)
}

pub fn decode_block_range(
    bits: &BitString,
    start: usize,
    end: usize,
    mode: BlockMode,
    sample: u64,
    b: usize,
) -> Result<Vec<u64>> {
    let mut cur = BlockCursor::new(bits, start, end, mode, sample, b)?;
    let mut out = Vec::with_capacity(b);
    while let Some(v) = cur.try_advance()? {
        out.push(v);
    }
    cur.finish()?;
    Ok(out)
}

/// Smallest in-block value `≥ x` with its index among the coded values.
pub fn block_successor(
    payload: &BitString,
    mode: BlockMode,
    sample: u64,
    b: usize,
    x: u64,
) -> Result<Option<(usize, u64)>> {
    BlockCursor::new(payload, 0, payload.len(), mode, sample, b)?.try_seek(x)
}
