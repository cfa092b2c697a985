//! Suffix array, BWT, ψ and cumulative symbol counts.
//!
//! The suffix array is built by induced sorting (SA-IS), which runs in
//! linear time for integer alphabets of any size.

use std::io::{Read, Write};

use crate::bitio::{bit_width, IntVector};
use crate::corpus::{SymbolId, Text};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixArray(pub Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BwtString(pub Vec<SymbolId>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiFunction(pub Vec<usize>);

pub fn build_suffix_array(text: &Text) -> SuffixArray {
    let s: Vec<usize> = text.symbols().iter().map(|&c| c as usize).collect();
    SuffixArray(sa_is(&s, text.sigma()))
}

pub fn build_bwt(text: &Text, sa: &SuffixArray) -> BwtString {
    let t = text.symbols();
    let n = t.len();
    BwtString(sa.0.iter().map(|&p| t[(p + n - 1) % n]).collect())
}

pub fn build_psi(sa: &SuffixArray) -> PsiFunction {
    let n = sa.0.len();
    let mut isa = vec![0usize; n];
    for (i, &p) in sa.0.iter().enumerate() {
        isa[p] = i;
    }
    PsiFunction(sa.0.iter().map(|&p| isa[(p + 1) % n]).collect())
}

/// Cumulative counts: `C[c]` is the number of text symbols smaller than
/// `c`, for `c` in `0..=σ+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    counts: IntVector,
}

impl SymbolTable {
    pub fn from_counts(cumulative: &[u64]) -> Result<Self> {
        if cumulative.len() < 2 || cumulative[0] != 0 || cumulative.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidInput(
                "malformed cumulative count array".into(),
            ));
        }
        let width = bit_width(*cumulative.last().unwrap());
        Ok(SymbolTable {
            counts: IntVector::from_slice(width, cumulative),
        })
    }

    /// `σ`, the number of non-sentinel symbols.
    #[inline]
    pub fn sigma(&self) -> usize {
        self.counts.len() - 2
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.counts.get(self.counts.len() - 1) as usize
    }

    /// `C[c]` for `c ≤ σ + 1`.
    #[inline]
    pub fn c(&self, c: usize) -> usize {
        self.counts.get(c) as usize
    }

    /// `n_c = C[c+1] − C[c]`.
    #[inline]
    pub fn freq(&self, c: SymbolId) -> usize {
        self.c(c as usize + 1) - self.c(c as usize)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.counts.iter().collect()
    }

    pub fn serialized_len(&self) -> usize {
        self.counts.serialized_len()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        self.counts.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let counts = IntVector::read_from(input)?;
        Self::from_counts(&counts.iter().collect::<Vec<_>>())
            .map_err(|_| Error::Format("malformed symbol table".into()))
    }
}

pub fn build_symbol_table(text: &Text) -> SymbolTable {
    let sigma = text.sigma();
    let mut c = vec![0u64; sigma + 2];
    for &s in text.symbols() {
        c[s as usize + 1] += 1;
    }
    for i in 1..c.len() {
        c[i] += c[i - 1];
    }
    SymbolTable::from_counts(&c).expect("prefix sums are monotone")
}

const NONE: usize = usize::MAX;

/// Suffix array of `s` with symbols in `0..=upper`.
fn sa_is(s: &[usize], upper: usize) -> Vec<usize> {
    let n = s.len();
    match n {
        0 => return vec![],
        1 => return vec![0],
        2 => return if s[0] < s[1] { vec![0, 1] } else { vec![1, 0] },
        _ => {}
    }
    if n < 10 {
        let mut sa: Vec<usize> = (0..n).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        return sa;
    }

    let mut sa = vec![NONE; n];
    // ls[i]: suffix i is S-type
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] {
            ls[i + 1]
        } else {
            s[i] < s[i + 1]
        };
    }
    let mut sum_l = vec![0usize; upper + 1];
    let mut sum_s = vec![0usize; upper + 1];
    for i in 0..n {
        if !ls[i] {
            sum_s[s[i]] += 1;
        } else {
            sum_l[s[i] + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let induce = |lms: &[usize], sa: &mut [usize]| {
        sa.fill(NONE);
        let mut buf = sum_s.clone();
        for &d in lms {
            if d == n {
                continue;
            }
            sa[buf[s[d]]] = d;
            buf[s[d]] += 1;
        }
        buf.copy_from_slice(&sum_l);
        sa[buf[s[n - 1]]] = n - 1;
        buf[s[n - 1]] += 1;
        for i in 0..n {
            let v = sa[i];
            if v != NONE && v >= 1 && !ls[v - 1] {
                sa[buf[s[v - 1]]] = v - 1;
                buf[s[v - 1]] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v != NONE && v >= 1 && ls[v - 1] {
                buf[s[v - 1] + 1] -= 1;
                sa[buf[s[v - 1] + 1]] = v - 1;
            }
        }
    };

    let mut lms_map = vec![NONE; n + 1];
    let mut lms = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len();
            lms.push(i);
        }
    }
    let m = lms.len();

    induce(&lms, &mut sa);

    if m > 0 {
        let mut sorted_lms: Vec<usize> =
            sa.iter().copied().filter(|&v| lms_map[v] != NONE).collect();
        let mut rec_s = vec![0usize; m];
        let mut rec_upper = 0;
        rec_s[lms_map[sorted_lms[0]]] = 0;
        for i in 1..m {
            let (mut l, mut r) = (sorted_lms[i - 1], sorted_lms[i]);
            let end_l = if lms_map[l] + 1 < m {
                lms[lms_map[l] + 1]
            } else {
                n
            };
            let end_r = if lms_map[r] + 1 < m {
                lms[lms_map[r] + 1]
            } else {
                n
            };
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l {
                    if s[l] != s[r] {
                        break;
                    }
                    l += 1;
                    r += 1;
                }
                if l == n || s[l] != s[r] {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i]]] = rec_upper;
        }
        let rec_sa = sa_is(&rec_s, rec_upper);
        for i in 0..m {
            sorted_lms[i] = lms[rec_sa[i]];
        }
        induce(&sorted_lms, &mut sa);
    }
    sa
}
