//! Compressed ψ: one [`SegmentStructure`] per frequent symbol and a shared
//! [`LowFreqStore`] for symbols occurring at most `L` times.

mod lowfreq;
mod segment;
mod wavelet;

use std::io::{Read, Write};

pub use lowfreq::LowFreqStore;
pub use segment::{BlockInfo, SegmentStructure};
pub use wavelet::WaveletTree;

use crate::construction::{PsiFunction, SymbolTable};
use crate::corpus::SymbolId;
use crate::error::{Error, Result};
use crate::serial;
use crate::uefblock::BlockMode;

pub const DEFAULT_BLOCK_SIZE: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiStore {
    k: usize,
    symtab: SymbolTable,
    lowfreq: LowFreqStore,
    segments: Vec<SegmentStructure>,
}

/// Builds the compressed ψ with block size `k ≥ 2` and low-frequency
/// threshold `threshold ≥ 1`.
pub fn build_psi_store(
    psi: &PsiFunction,
    symtab: &SymbolTable,
    k: usize,
    threshold: usize,
) -> Result<PsiStore> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "block size k={k} must be at least 2"
        )));
    }
    if threshold < 1 {
        return Err(Error::InvalidInput(
            "low-frequency threshold must be at least 1".into(),
        ));
    }
    let n = symtab.n();
    if psi.0.len() != n {
        return Err(Error::InvalidInput(
            "ψ length differs from symbol table".into(),
        ));
    }
    let sigma = symtab.sigma();
    let freqs: Vec<usize> = (0..=sigma).map(|c| symtab.freq(c as SymbolId)).collect();
    if freqs.contains(&0) {
        return Err(Error::InvalidInput(
            "every symbol needs at least one occurrence".into(),
        ));
    }
    let segment_of = |c: usize| &psi.0[symtab.c(c)..symtab.c(c + 1)];
    for c in 0..=sigma {
        if segment_of(c).windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "ψ segment {c} is not increasing"
            )));
        }
    }
    let lowfreq = LowFreqStore::build(&freqs, threshold, n, segment_of)?;
    let mut segments = Vec::new();
    for (c, &f) in freqs.iter().enumerate() {
        if f > threshold {
            let vals: Vec<u64> = segment_of(c).iter().map(|&v| v as u64).collect();
            segments.push(SegmentStructure::build(&vals, n, k)?);
        }
    }
    Ok(PsiStore {
        k,
        symtab: symtab.clone(),
        lowfreq,
        segments,
    })
}

/// Segment-local search target, resolved through `D`.
enum Route<'a> {
    Segment(&'a SegmentStructure),
    Low { c: usize, freq: usize },
}

impl PsiStore {
    pub fn n(&self) -> usize {
        self.symtab.n()
    }

    pub fn sigma(&self) -> usize {
        self.symtab.sigma()
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    pub fn threshold(&self) -> usize {
        self.lowfreq.threshold()
    }

    pub fn symtab(&self) -> &SymbolTable {
        &self.symtab
    }

    pub fn lowfreq(&self) -> &LowFreqStore {
        &self.lowfreq
    }

    pub fn segments(&self) -> &[SegmentStructure] {
        &self.segments
    }

    fn check_symbol(&self, c: SymbolId) -> Result<()> {
        if c as usize > self.sigma() {
            return Err(Error::OutOfRange {
                what: "symbol",
                index: c as usize,
                limit: self.sigma(),
            });
        }
        Ok(())
    }

    #[inline]
    fn route(&self, c: usize) -> Route<'_> {
        if self.lowfreq.is_segment(c) {
            Route::Segment(&self.segments[self.lowfreq.segment_index(c)])
        } else {
            Route::Low {
                c,
                freq: self.symtab.c(c + 1) - self.symtab.c(c),
            }
        }
    }

    /// Smallest global `i` in `[C[c], C[c+1])` with `ψ[i] ≥ pos`, or
    /// `C[c+1]` if there is none.
    pub fn geq(&self, c: SymbolId, pos: usize) -> Result<usize> {
        self.check_symbol(c)?;
        Ok(self.geq_unchecked(c, pos))
    }

    #[inline]
    pub(crate) fn geq_unchecked(&self, c: SymbolId, pos: usize) -> usize {
        let c = c as usize;
        let base = self.symtab.c(c);
        base + match self.route(c) {
            Route::Segment(seg) => seg.geq(pos as u64, self.k),
            Route::Low { c, freq } => self.lowfreq.geq(c, freq, pos as u64),
        }
    }

    /// One backward-search step on the half-open range `[sp, end)`:
    /// returns `(geq(c, sp), geq(c, end))`, sharing the search between the
    /// two bounds.
    pub fn geq_pair(&self, c: SymbolId, sp: usize, end: usize) -> Result<(usize, usize)> {
        self.check_symbol(c)?;
        if sp > end {
            return Err(Error::InvalidInput(format!(
                "range start {sp} after end {end}"
            )));
        }
        Ok(self.geq_pair_unchecked(c, sp, end))
    }

    #[inline]
    pub(crate) fn geq_pair_unchecked(&self, c: SymbolId, sp: usize, end: usize) -> (usize, usize) {
        let c = c as usize;
        let base = self.symtab.c(c);
        let (a, b) = match self.route(c) {
            Route::Segment(seg) => seg.geq_pair(sp as u64, end as u64, self.k),
            Route::Low { c, freq } => self.lowfreq.geq_pair(c, freq, sp as u64, end as u64),
        };
        (base + a, base + b)
    }

    /// ψ values of symbol `c`'s segment, in order.
    pub fn reconstruct_segment(&self, c: SymbolId) -> Result<Vec<usize>> {
        self.check_symbol(c)?;
        let vals = match self.route(c as usize) {
            Route::Segment(seg) => seg.decode(self.k),
            Route::Low { c, freq } => self.lowfreq.group(c, freq),
        };
        Ok(vals.into_iter().map(|v| v as usize).collect())
    }

    /// The full ψ array.
    pub fn reconstruct(&self) -> Vec<usize> {
        (0..=self.sigma() as SymbolId)
            .flat_map(|c| self.reconstruct_segment(c).expect("valid symbol"))
            .collect()
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut rows = Vec::new();
        let samples: usize = self
            .segments
            .iter()
            .map(SegmentStructure::samples_bytes)
            .sum();
        rows.push(SpaceRow::new(Component::Samples, None, samples as f64));
        let mut by_mode = [(0usize, 0usize); 4];
        for seg in &self.segments {
            for info in seg.blocks(self.k) {
                let slot = &mut by_mode[info.mode as usize];
                slot.0 += info.values;
                slot.1 += info.payload_bits;
            }
        }
        for (mode, comp) in [
            (BlockMode::Nil, Component::Nil),
            (BlockMode::Bv, Component::Bv),
            (BlockMode::Rl, Component::Rl),
            (BlockMode::Ef, Component::Ef),
        ] {
            let (values, bits) = by_mode[mode as usize];
            rows.push(SpaceRow::new(comp, Some(values), bits as f64 / 8.0));
        }
        rows.push(SpaceRow::new(
            Component::Binary,
            Some(self.lowfreq.num_values()),
            self.lowfreq.arrays_bytes() as f64,
        ));
        let accounted: f64 = rows.iter().map(|r| r.bytes).sum();
        rows.push(SpaceRow::new(
            Component::Other,
            None,
            self.serialized_len() as f64 - accounted,
        ));
        SpaceReport { n: self.n(), rows }
    }

    pub fn serialized_len(&self) -> usize {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        buf.len()
    }

    /// Writes the sections SYMTAB, DBV, FREQWT, LOWFREQ and SEGMENTS, each
    /// prefixed by its byte length.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut buf = Vec::new();
        self.symtab.write_to(&mut buf)?;
        serial::write_section(out, &buf)?;
        buf.clear();
        self.lowfreq.write_marks(&mut buf)?;
        serial::write_section(out, &buf)?;
        buf.clear();
        self.lowfreq.write_wt(&mut buf)?;
        serial::write_section(out, &buf)?;
        buf.clear();
        self.lowfreq.write_arrays(&mut buf)?;
        serial::write_section(out, &buf)?;
        buf.clear();
        serial::write_u64(&mut buf, self.segments.len() as u64)?;
        for s in &self.segments {
            s.write_to(&mut buf)?;
        }
        serial::write_section(out, &buf)
    }

    pub fn read_from<R: Read>(input: &mut R, k: usize, threshold: usize) -> Result<Self> {
        if k < 2 || threshold < 1 {
            return Err(Error::Format("bad block size or threshold".into()));
        }
        let symtab_raw = serial::read_section(input)?;
        let marks_raw = serial::read_section(input)?;
        let wt_raw = serial::read_section(input)?;
        let arrays_raw = serial::read_section(input)?;
        let seg_raw = serial::read_section(input)?;

        let mut r = symtab_raw.as_slice();
        let symtab = SymbolTable::read_from(&mut r)?;
        expect_consumed(r, "SYMTAB")?;
        let n = symtab.n();
        let freqs: Vec<usize> = (0..=symtab.sigma())
            .map(|c| symtab.freq(c as SymbolId))
            .collect();
        if freqs.contains(&0) {
            return Err(Error::Format("symbol table has an empty symbol".into()));
        }
        let (mut m, mut w, mut a) = (
            marks_raw.as_slice(),
            wt_raw.as_slice(),
            arrays_raw.as_slice(),
        );
        let lowfreq = LowFreqStore::read_parts(&mut m, &mut w, &mut a, &freqs, threshold, n)?;
        expect_consumed(m, "DBV")?;
        expect_consumed(w, "FREQWT")?;
        expect_consumed(a, "LOWFREQ")?;

        let mut s = seg_raw.as_slice();
        let count = serial::read_len(&mut s)?;
        let expected: Vec<usize> = freqs.iter().copied().filter(|&f| f > threshold).collect();
        if count != expected.len() {
            return Err(Error::Format("segment count mismatch".into()));
        }
        let mut segments = Vec::with_capacity(count);
        for &len in &expected {
            segments.push(SegmentStructure::read_from(&mut s, len, n, k)?);
        }
        expect_consumed(s, "SEGMENTS")?;
        Ok(PsiStore {
            k,
            symtab,
            lowfreq,
            segments,
        })
    }
}

fn expect_consumed(rest: &[u8], name: &str) -> Result<()> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(Error::Format(format!("trailing bytes in section {name}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    Samples,
    Nil,
    Bv,
    Rl,
    Ef,
    Binary,
    Other,
}

impl Component {
    pub fn label(self) -> &'static str {
        match self {
            Component::Samples => "Samples",
            Component::Nil => "NIL-blocks",
            Component::Bv => "BV-coded",
            Component::Rl => "RL-coded",
            Component::Ef => "EF-coded",
            Component::Binary => "Binary values",
            Component::Other => "Other",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceRow {
    pub component: Component,
    /// ψ values covered; `None` for rows that hold no ψ values.
    pub values: Option<usize>,
    pub bytes: f64,
}

impl SpaceRow {
    fn new(component: Component, values: Option<usize>, bytes: f64) -> Self {
        SpaceRow {
            component,
            values,
            bytes,
        }
    }
}

/// Space breakdown by component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceReport {
    pub n: usize,
    pub rows: Vec<SpaceRow>,
}

impl SpaceReport {
    pub fn row(&self, c: Component) -> &SpaceRow {
        self.rows
            .iter()
            .find(|r| r.component == c)
            .expect("every component reported")
    }

    /// Fraction of ψ values covered by a component.
    pub fn fraction(&self, c: Component) -> Option<f64> {
        self.row(c).values.map(|v| v as f64 / self.n as f64)
    }

    pub fn total_bytes(&self) -> f64 {
        self.rows.iter().map(|r| r.bytes).sum()
    }
}
