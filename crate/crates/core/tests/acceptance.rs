//! Acceptance suite: one PASS/FAIL line per criterion. Every oracle here is
//! written independently of the library (sorted-suffix arrays, direct scans).
//! Runs without the libtest harness so the report is always printed.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csapp::bitio::{BitString, PlainBitvector};
use csapp::construction::{build_psi, build_suffix_array, build_symbol_table};
use csapp::corpus::{load_byte_text, load_token_text, SymbolId, Text, TextMode};
use csapp::eliasfano::EliasFanoSequence;
use csapp::psistore::{build_psi_store, Component};
use csapp::uefblock::{
    block_successor, decode_block, encode_block, plan_block, rl_tokens, BlockMode, BlockPlan,
    RlToken,
};
use csapp::Index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

// pinned limits and tolerances
const ORACLE_LIMIT: Duration = Duration::from_secs(180);
const CODEC_LIMIT: Duration = Duration::from_secs(60);
const SPACE_LIMIT: Duration = Duration::from_secs(300);
const RLZ_LIMIT: Duration = Duration::from_secs(300);
const PERCENT_SUM_TOLERANCE: f64 = 0.1;
const RUN_MAJORITY: f64 = 0.5;
const BINARY_MAX: f64 = 0.15;
const HAPAX_MIN: f64 = 0.20;
const MIB: usize = 1 << 20;

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!(
            "took {:.1}s, limit {}s",
            t.as_secs_f64(),
            limit.as_secs()
        ))
    } else {
        Ok(())
    }
}

// ---- independent oracles -------------------------------------------------

/// Suffix array by comparison sort; the unique smallest sentinel at the end
/// decides every comparison.
fn sorted_suffixes(t: &[SymbolId]) -> Vec<usize> {
    let mut sa: Vec<usize> = (0..t.len()).collect();
    sa.sort_by(|&a, &b| t[a..].cmp(&t[b..]));
    sa
}

fn scan_count(body: &[SymbolId], p: &[SymbolId]) -> usize {
    if p.is_empty() {
        return body.len() + 1;
    }
    if p.len() > body.len() {
        return 0;
    }
    (0..=body.len() - p.len())
        .filter(|&i| &body[i..i + p.len()] == p)
        .count()
}

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u64) -> Text {
    let src: Vec<u64> = (0..n).map(|_| rng.random_range(0..sigma)).collect();
    Text::from_source(TextMode::Token, &src)
}

fn source_of(text: &Text) -> Vec<u64> {
    text.unmap()
}

// ---- criteria ---------------------------------------------------------------

fn c1_oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let sigmas = [2u64, 4, 26, 256, 1000];
    let configs = [(2, 2), (16, 16), (64, 64), (128, 128)];
    let (texts, per_text) = (100, 100);
    let mut checked = 0usize;
    for t in 0..texts {
        let sigma = sigmas[t % sigmas.len()];
        let n = rng.random_range(1..=5000);
        let text = random_text(&mut rng, n, sigma);
        let src = source_of(&text);
        let mut patterns: Vec<Vec<u64>> = Vec::with_capacity(per_text);
        for q in 0..per_text {
            let m = rng.random_range(1..=20);
            if q % 2 == 0 && m <= n {
                let at = rng.random_range(0..=n - m);
                patterns.push(src[at..at + m].to_vec());
            } else {
                // may include symbols absent from the text
                patterns.push((0..m).map(|_| rng.random_range(0..sigma + 2)).collect());
            }
        }
        let expected: Vec<usize> = patterns
            .iter()
            .map(|p| {
                let mut dense = Vec::with_capacity(p.len());
                for &s in p {
                    match text.alphabet().id_of(s) {
                        Some(id) => dense.push(id),
                        None => return 0,
                    }
                }
                scan_count(text.body(), &dense)
            })
            .collect();
        for &(k, l) in &configs {
            let idx = Index::build(&text, k, l).map_err(|e| e.to_string())?;
            for (p, &want) in patterns.iter().zip(&expected) {
                let got = idx.count(p);
                ensure!(got == want, "text {t} (n={n}, σ={sigma}) k={k} L={l}: count {got} != oracle {want} for {p:?}");
                checked += 1;
            }
        }
    }
    within(ORACLE_LIMIT, start)?;
    Ok(format!(
        "{checked} counts over {texts} texts × {} configs",
        configs.len()
    ))
}

fn c2_geq_rank_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let configs = [(2, 2), (2, 1), (3, 2), (4, 4), (8, 3)];
    let mut pairs = 0usize;
    for t in 0..20 {
        let n = rng.random_range(1..=500);
        let sigma = [2u64, 4, 26, 256][t % 4];
        let text = random_text(&mut rng, n, sigma);
        let sym = text.symbols();
        let sa = sorted_suffixes(sym);
        let total = sym.len();
        let bwt: Vec<SymbolId> = sa.iter().map(|&i| sym[(i + total - 1) % total]).collect();
        let mut cum = vec![0usize; text.sigma() + 2];
        for &c in sym {
            cum[c as usize + 1] += 1;
        }
        for c in 1..cum.len() {
            cum[c] += cum[c - 1];
        }
        let (k, l) = configs[t % configs.len()];
        let store = build_psi_store(
            &build_psi(&build_suffix_array(&text)),
            &build_symbol_table(&text),
            k,
            l,
        )
        .map_err(|e| e.to_string())?;
        for (c, &base) in cum.iter().take(text.sigma() + 1).enumerate() {
            let mut rank = 0;
            for pos in 0..=total {
                let got = store.geq(c as SymbolId, pos).map_err(|e| e.to_string())?;
                ensure!(
                    got == base + rank,
                    "text {t}: geq({c}, {pos}) = {got}, want {}",
                    base + rank
                );
                pairs += 1;
                if bwt.get(pos).is_some_and(|&b| b as usize == c) {
                    rank += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} (c, pos) pairs over 20 texts"))
}

fn c3_psi_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut texts: Vec<Text> = Vec::new();
    for t in 0..60 {
        let n = rng.random_range(0..=3000);
        texts.push(random_text(&mut rng, n, [1u64, 2, 4, 26, 256, 1000][t % 6]));
    }
    texts.push(load_byte_text(b"abracadabra"));
    texts.push(load_byte_text(&b"abcab".repeat(300)));
    for (t, text) in texts.iter().enumerate() {
        let sa = build_suffix_array(text);
        ensure!(
            sa.0 == sorted_suffixes(text.symbols()),
            "text {t}: suffix array differs from sorted suffixes"
        );
        let psi = build_psi(&sa);
        let n = text.n();
        for i in 0..n {
            ensure!(
                sa.0[psi.0[i]] == (sa.0[i] + 1) % n,
                "text {t}: sa[ψ[{i}]] != sa[{i}]+1 mod n"
            );
        }
        let st = build_symbol_table(text);
        for c in 0..=st.sigma() {
            let seg = &psi.0[st.c(c)..st.c(c + 1)];
            ensure!(
                seg.windows(2).all(|w| w[0] < w[1]),
                "text {t}: segment {c} not strictly increasing"
            );
        }
        let store = build_psi_store(&psi, &st, 4, 2).map_err(|e| e.to_string())?;
        ensure!(
            store.reconstruct() == psi.0,
            "text {t}: reconstruction differs from ψ"
        );
    }
    Ok(format!("{} texts", texts.len()))
}

fn c4_golden_examples() -> Check {
    let ef = EliasFanoSequence::encode(&[6, 7, 10], 4).map_err(|e| e.to_string())?;
    ensure!(
        ef.high().bits().to_string() == "0110100",
        "EF high part {}",
        ef.high().bits()
    );
    ensure!(ef.low().to_string() == "101110", "EF low part {}", ef.low());
    ensure!(ef.size_in_bits() == 13, "EF size {}", ef.size_in_bits());
    ensure!(
        ef.successor(8) == Some((2, 10)),
        "EF successor(8) = {:?}",
        ef.successor(8)
    );

    let block = [27u64, 28, 29, 45, 46, 47, 48, 70, 71, 73];
    let toks = rl_tokens(block[0], &block[1..]);
    use RlToken::*;
    let want = vec![Run(2), Gap(16), Run(3), Gap(22), Run(1), Gap(2)];
    ensure!(toks == want, "RL tokens {toks:?}");

    let bv = PlainBitvector::new(BitString::from_str_bits("0110100"));
    let s = bv.select0(2).map_err(|e| e.to_string())?;
    ensure!(s == 4, "select0(2) = {s}");
    Ok("EF [6,7,10], RL [27..73], select0".into())
}

fn c5_codec_roundtrips() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut chosen: HashMap<BlockMode, usize> = HashMap::new();
    let mut encodings = 0usize;
    for i in 0..10_000 {
        let sample = rng.random_range(0..1u64 << 40);
        let b = rng.random_range(1..=127);
        let mut values = Vec::with_capacity(b);
        let mut cur = sample;
        let shape = i % 4;
        for _ in 0..b {
            let gap = match shape {
                0 => 1,
                1 => rng.random_range(1..=3),
                2 => {
                    if rng.random_bool(0.9) {
                        1
                    } else {
                        rng.random_range(2..200)
                    }
                }
                _ => rng.random_range(1..5000),
            };
            cur += gap;
            values.push(cur);
        }
        let plan = plan_block(sample, &values).map_err(|e| e.to_string())?;
        *chosen.entry(plan.mode).or_default() += 1;
        let mut modes = vec![BlockMode::Bv, BlockMode::Ef, BlockMode::Rl];
        if plan.u == b as u64 {
            modes.push(BlockMode::Nil);
        }
        for mode in modes {
            let forced = BlockPlan { mode, ..plan };
            let enc = encode_block(&forced, sample, &values).map_err(|e| e.to_string())?;
            ensure!(
                enc.payload.len() as u64 == forced.cost(),
                "block {i} {mode:?}: payload {} bits, planner {}",
                enc.payload.len(),
                forced.cost()
            );
            let dec = decode_block(&enc.payload, mode, sample, b).map_err(|e| e.to_string())?;
            ensure!(dec == values, "block {i} {mode:?}: decode mismatch");
            let probes = [
                0,
                sample,
                sample + 1,
                values[b / 2],
                values[b / 2] + 1,
                values[b - 1],
                values[b - 1] + 1,
                rng.random_range(sample..=values[b - 1] + 1),
            ];
            for x in probes {
                let want = values.iter().position(|&v| v >= x).map(|j| (j, values[j]));
                let got =
                    block_successor(&enc.payload, mode, sample, b, x).map_err(|e| e.to_string())?;
                ensure!(
                    got == want,
                    "block {i} {mode:?}: successor({x}) = {got:?}, scan {want:?}"
                );
            }
            encodings += 1;
        }
    }
    for mode in [BlockMode::Nil, BlockMode::Bv, BlockMode::Ef, BlockMode::Rl] {
        ensure!(
            chosen.get(&mode).copied().unwrap_or(0) > 0,
            "planner never chose {mode:?}"
        );
    }
    within(CODEC_LIMIT, start)?;
    Ok(format!(
        "10000 blocks, {encodings} encodings, chosen modes {chosen:?}"
    ))
}

fn c6_serialization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    for t in 0..20 {
        let n = rng.random_range(0..4000);
        let text = random_text(&mut rng, n, [2u64, 4, 26, 256, 1000][t % 5]);
        let (k, l) = [(2, 2), (16, 8), (64, 64), (128, 128)][t % 4];
        let idx = Index::build(&text, k, l).map_err(|e| e.to_string())?;
        let bytes = idx.to_bytes();
        let back = Index::read_from(&mut bytes.as_slice()).map_err(|e| e.to_string())?;
        ensure!(
            back.to_bytes() == bytes,
            "index {t}: re-serialization differs"
        );
        let src = source_of(&text);
        let mut queries: Vec<Vec<u64>> = (0..200)
            .map(|_| {
                let m = rng.random_range(1..=12.min(n.max(1)));
                if n >= m && rng.random_bool(0.5) {
                    let at = rng.random_range(0..=n - m);
                    src[at..at + m].to_vec()
                } else {
                    (0..m).map(|_| rng.random_range(0..1002)).collect()
                }
            })
            .collect();
        queries.push(Vec::new());
        ensure!(
            back.count_batch_sequential(&queries) == idx.count_batch_sequential(&queries),
            "index {t}: loaded index answers differently"
        );
    }
    Ok("20 indexes".into())
}

fn percent_sum(idx: &Index) -> f64 {
    // rounded as the stats CSV prints them
    let r = idx.space_report();
    r.rows
        .iter()
        .filter_map(|row| r.fraction(row.component))
        .map(|f| (100.0 * f * 100.0).round() / 100.0)
        .sum()
}

fn c7_space_breakdown() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);

    // (b) 1000 copies of a 1 KiB phrase
    let phrase: Vec<u8> = (0..1024).map(|_| rng.random_range(b' '..=b'~')).collect();
    let rep = phrase.repeat(1000);
    let rep_idx = Index::build(&load_byte_text(&rep), 128, 128).map_err(|e| e.to_string())?;
    let r = rep_idx.space_report();
    let runs = r.fraction(Component::Nil).unwrap_or(0.0) + r.fraction(Component::Rl).unwrap_or(0.0);
    ensure!(
        runs > RUN_MAJORITY,
        "(b) NIL+RL cover {:.2}% of ψ",
        100.0 * runs
    );

    // (c) Zipf tokens with many hapaxes
    let zipf = Zipf::new(2_000_000.0, 1.4).map_err(|e| e.to_string())?;
    let toks: Vec<u64> = (0..500_000).map(|_| zipf.sample(&mut rng) as u64).collect();
    let raw = toks
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    ensure!(
        (MIB..=8 * MIB).contains(&raw.len()),
        "token input is {} bytes",
        raw.len()
    );
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for &t in &toks {
        *freq.entry(t).or_default() += 1;
    }
    let hapax = freq.values().filter(|&&f| f == 1).count() as f64 / freq.len() as f64;
    ensure!(
        hapax >= HAPAX_MIN,
        "(c) only {:.1}% hapax symbols",
        100.0 * hapax
    );
    let text = load_token_text(raw.as_bytes()).map_err(|e| e.to_string())?;
    let zipf_idx = Index::build(&text, 128, 128).map_err(|e| e.to_string())?;
    let binary = zipf_idx
        .space_report()
        .fraction(Component::Binary)
        .unwrap_or(0.0);
    ensure!(
        binary > 0.0 && binary < BINARY_MAX,
        "(c) Binary values cover {:.2}%",
        100.0 * binary
    );

    // (a) percentages sum to 100 on both inputs
    for (name, idx) in [("repetitive", &rep_idx), ("zipf", &zipf_idx)] {
        let s = percent_sum(idx);
        ensure!(
            (s - 100.0).abs() <= PERCENT_SUM_TOLERANCE,
            "(a) {name} percentages sum to {s}"
        );
    }
    within(SPACE_LIMIT, start)?;
    Ok(format!(
        "NIL+RL {:.1}%, hapax {:.1}%, binary {:.2}%",
        100.0 * runs,
        100.0 * hapax,
        100.0 * binary
    ))
}

/// Dictionary-occurrence oracle: a sorted suffix array with binary search.
struct Occurrences<'a> {
    d: &'a [u8],
    sa: Vec<u32>,
}

impl<'a> Occurrences<'a> {
    fn new(d: &'a [u8]) -> Self {
        let mut sa: Vec<u32> = (0..d.len() as u32).collect();
        sa.sort_unstable_by(|&a, &b| d[a as usize..].cmp(&d[b as usize..]));
        Occurrences { d, sa }
    }

    fn contains(&self, chunk: &[u8]) -> bool {
        let i = self.sa.partition_point(|&s| &self.d[s as usize..] < chunk);
        i < self.sa.len() && self.d[self.sa[i] as usize..].starts_with(chunk)
    }
}

fn word_text(rng: &mut ChaCha8Rng, words: &[Vec<u8>], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 16);
    while out.len() < len {
        let i = (rng.random::<f64>().powi(2) * words.len() as f64) as usize;
        out.extend_from_slice(&words[i]);
        out.push(b' ');
    }
    out.truncate(len);
    out
}

fn c8_rlz() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    let words: Vec<Vec<u8>> = (0..5000)
        .map(|_| {
            (0..rng.random_range(2..10))
                .map(|_| rng.random_range(b'a'..=b'z'))
                .collect()
        })
        .collect();
    let dict = word_text(&mut rng, &words, MIB);
    // stream: spans copied from the dictionary, fresh word text and bytes
    // absent from the dictionary
    let mut stream = Vec::with_capacity(4 * MIB);
    while stream.len() < 4 * MIB {
        match rng.random_range(0..10) {
            0..=6 => {
                let len = rng.random_range(1..400);
                let at = rng.random_range(0..dict.len() - len);
                stream.extend_from_slice(&dict[at..at + len]);
            }
            7 | 8 => {
                let len = rng.random_range(1..60);
                stream.extend(word_text(&mut rng, &words, len));
            }
            _ => stream.push(rng.random_range(b'A'..=b'Z')),
        }
    }
    stream.truncate(4 * MIB);

    let rev = load_byte_text(&dict).reversed();
    let idx = Index::build(&rev, 128, 128).map_err(|e| e.to_string())?;
    let src: Vec<u64> = stream.iter().map(|&b| u64::from(b)).collect();
    let factors = idx.factorize(&src);
    let oracle = Occurrences::new(&dict);

    let mut pos = 0usize;
    let mut rebuilt = Vec::with_capacity(stream.len());
    for (i, f) in factors.iter().enumerate() {
        if f.length == 0 {
            let lit = f
                .literal
                .ok_or_else(|| format!("factor {i}: empty factor without literal"))?;
            ensure!(pos < stream.len(), "factor {i}: literal past stream end");
            ensure!(
                !oracle.contains(&stream[pos..pos + 1]),
                "factor {i}: literal {lit} occurs in D"
            );
            rebuilt.push(lit as u8);
            pos += 1;
        } else {
            ensure!(
                f.literal.is_none(),
                "factor {i}: chunk also carries a literal"
            );
            ensure!(
                pos + f.length <= stream.len(),
                "factor {i}: runs past stream end"
            );
            let chunk = &stream[pos..pos + f.length];
            ensure!(
                oracle.contains(chunk),
                "factor {i}: chunk at {pos} (len {}) not in D",
                f.length
            );
            if i + 1 < factors.len() {
                let longer = &stream[pos..pos + f.length + 1];
                ensure!(!oracle.contains(longer), "factor {i}: not maximal at {pos}");
            }
            rebuilt.extend_from_slice(chunk);
            pos += f.length;
        }
    }
    ensure!(rebuilt == stream, "factors do not reconstruct S");
    within(RLZ_LIMIT, start)?;
    let literals = factors.iter().filter(|f| f.length == 0).count();
    Ok(format!(
        "{} factors ({literals} literals), avg length {:.2}",
        factors.len(),
        csapp::search::average_factor_length(&factors)
    ))
}

fn c9_k_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    let words: Vec<Vec<u8>> = (0..800)
        .map(|_| {
            (0..rng.random_range(1..8))
                .map(|_| rng.random_range(b'a'..=b'z'))
                .collect()
        })
        .collect();
    let raw = word_text(&mut rng, &words, 200_000);
    let text = load_byte_text(&raw);
    let mut queries: Vec<Vec<u64>> =
        csapp::workload::gen_queries(&text, 2000, 8, 5).map_err(|e| e.to_string())?;
    queries.extend((0..500).map(|_| {
        (0..rng.random_range(1..6))
            .map(|_| rng.random_range(b'a'..=b'{') as u64)
            .collect()
    }));
    let mut answers = Vec::new();
    for k in [16, 64, 256] {
        let idx = Index::build(&text, k, k).map_err(|e| e.to_string())?;
        answers.push(idx.count_batch_sequential(&queries));
    }
    ensure!(
        answers[0] == answers[1] && answers[1] == answers[2],
        "counts differ across k"
    );
    for (q, &got) in queries.iter().zip(&answers[0]).take(300) {
        let p: Vec<u8> = q.iter().map(|&s| s as u8).collect();
        let want = if p.len() > raw.len() {
            0
        } else {
            raw.windows(p.len()).filter(|w| *w == p.as_slice()).count()
        };
        ensure!(got == want, "count {got} != scan {want} for {p:?}");
    }
    Ok(format!(
        "{} queries identical for k ∈ {{16, 64, 256}}",
        queries.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "count equals naive count", c1_oracle_equivalence),
        (2, "GEQ equals C plus BWT rank", c2_geq_rank_identity),
        (3, "psi structural invariants", c3_psi_invariants),
        (4, "worked examples", c4_golden_examples),
        (5, "block codec roundtrips", c5_codec_roundtrips),
        (6, "index serialization", c6_serialization),
        (7, "space breakdown", c7_space_breakdown),
        (8, "RLZ factorization", c8_rlz),
        (9, "answers independent of k", c9_k_invariance),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {why} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
