//! Shared helpers for the integration suites: a deterministic fuzz-corpus
//! generator and a naive reference implementation of the characterization
//! metrics, kept independent of the library's code paths.

#![allow(dead_code)]

use loglight::{CodecConfig, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct FuzzCorpus {
    pub raw: Vec<u8>,
    pub lines: Vec<Vec<u8>>,
    pub trailing_newline: bool,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Any byte a log line may contain (everything except NUL and LF).
pub fn line_byte(rng: &mut ChaCha8Rng) -> u8 {
    loop {
        let b: u8 = rng.gen();
        if b != 0x00 && b != 0x0A {
            return b;
        }
    }
}

/// Random corpus with a small per-corpus palette of line lengths (so queues
/// actually fill), a mix of near-duplicate, run-heavy, and random lines,
/// lengths from 0 up to `max_len`, and a random trailing-newline disposition.
pub fn gen_corpus(rng: &mut ChaCha8Rng, max_lines: usize, max_len: usize) -> FuzzCorpus {
    let palette_size = rng.gen_range(1..=6);
    let palette: Vec<usize> = (0..palette_size)
        .map(|_| match rng.gen_range(0..10) {
            0 => 0,
            1 => rng.gen_range(max_len / 2..=max_len),
            2 => rng.gen_range(80..max_len.clamp(81, 2000)),
            _ => rng.gen_range(1..80),
        })
        .collect();

    let line_count = rng.gen_range(0..=max_lines);
    let mut lines: Vec<Vec<u8>> = Vec::with_capacity(line_count);
    for _ in 0..line_count {
        let len = palette[rng.gen_range(0..palette.len())];
        let style = rng.gen_range(0..10);
        let line = if style <= 5 {
            match lines.iter().rev().find(|l| l.len() == len) {
                Some(base) => {
                    // Near-duplicate of the most recent same-length line.
                    let mut line = base.clone();
                    if !line.is_empty() {
                        for _ in 0..rng.gen_range(0..=8usize) {
                            let pos = rng.gen_range(0..line.len());
                            line[pos] = line_byte(rng);
                        }
                    }
                    line
                }
                None => (0..len).map(|_| line_byte(rng)).collect(),
            }
        } else if style == 6 {
            let b = line_byte(rng);
            vec![b; len]
        } else {
            (0..len).map(|_| line_byte(rng)).collect()
        };
        lines.push(line);
    }

    let trailing_newline = !lines.is_empty() && rng.gen_bool(0.8);
    let raw = join(&lines, trailing_newline);
    // A final empty line without a trailing newline aliases with a trailing
    // newline ("a" + "" joins to "a\n"); re-split so the line list is the
    // canonical parse of the bytes.
    let (lines, trailing_newline) = resplit(&raw);
    FuzzCorpus {
        raw,
        lines,
        trailing_newline,
    }
}

/// Canonical (lines, trailing-newline) parse of a byte buffer.
pub fn resplit(raw: &[u8]) -> (Vec<Vec<u8>>, bool) {
    if raw.is_empty() {
        return (Vec::new(), false);
    }
    let trailing = *raw.last().unwrap() == 0x0A;
    let body = if trailing { &raw[..raw.len() - 1] } else { raw };
    let lines = body.split(|&b| b == 0x0A).map(|s| s.to_vec()).collect();
    (lines, trailing)
}

pub fn join(lines: &[Vec<u8>], trailing_newline: bool) -> Vec<u8> {
    let mut raw = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            raw.push(0x0A);
        }
        raw.extend_from_slice(line);
    }
    if trailing_newline {
        raw.push(0x0A);
    }
    raw
}

/// The config matrix the fuzz suites cycle through.
pub fn config_matrix() -> Vec<CodecConfig> {
    let mut configs = Vec::new();
    for &k in &[1usize, 2, 8, 32, 256] {
        for &theta in &[0.5, 0.85, 1.0] {
            for &variant in &[Variant::Bit, Variant::Byte] {
                configs.push(CodecConfig::new(k, theta, variant).unwrap());
            }
        }
    }
    configs
}

/// Naive reference implementation of the characterization metrics, written
/// against the definitions with plain index arithmetic. Deliberately shares
/// no code with the library: similarity is an indicator-sum loop and the
/// length buckets are rebuilt per line by scanning backwards.
pub mod naive {
    #[derive(Debug, PartialEq)]
    pub struct NaiveReport {
        pub avg_length: f64,
        pub distinct_lengths: usize,
        pub distinct_length_ratio: f64,
        pub psl: Vec<f64>,
        pub seq: Option<f64>,
        pub rev: Option<f64>,
        pub mss: Option<f64>,
        pub an: Option<f64>,
    }

    pub fn similarity(a: &[u8], b: &[u8]) -> f64 {
        assert_eq!(a.len(), b.len());
        if a.is_empty() {
            return 1.0;
        }
        let mut equal = 0usize;
        for i in 0..a.len() {
            if a[i] == b[i] {
                equal += 1;
            }
        }
        equal as f64 / a.len() as f64
    }

    /// Indices of earlier same-length lines, most recent first, up to `k`.
    fn window(lines: &[Vec<u8>], i: usize, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut j = i;
        while j > 0 && out.len() < k {
            j -= 1;
            if lines[j].len() == lines[i].len() {
                out.push(j);
            }
        }
        out
    }

    pub fn characterize(
        lines: &[Vec<u8>],
        psl_k: &[usize],
        theta: f64,
        search_k: usize,
        include_nopred_as_k: bool,
    ) -> NaiveReport {
        assert!(!lines.is_empty());
        let n = lines.len();

        let total: u64 = lines.iter().map(|l| l.len() as u64).sum();
        let avg_length = total as f64 / n as f64;
        let mut lengths: Vec<usize> = lines.iter().map(|l| l.len()).collect();
        lengths.sort_unstable();
        lengths.dedup();
        let distinct_lengths = lengths.len();
        let distinct_length_ratio = distinct_lengths as f64 / n as f64;

        let mut psl_counts = vec![0u64; psl_k.len()];
        let mut eligible = 0u64;
        let mut nopred = 0u64;
        let mut seq_sum = 0u64;
        let mut rev_sum = 0u64;
        let mut mss_sum = 0.0f64;
        let mut an_sum = 0u64;

        for i in 0..n {
            let max_k = psl_k.iter().copied().max().unwrap_or(1).max(search_k);
            let preds = window(lines, i, max_k);

            for (idx, &k) in psl_k.iter().enumerate() {
                let mut matched = false;
                for q in 0..k.min(preds.len()) {
                    if similarity(&lines[i], &lines[preds[q]]) >= theta {
                        matched = true;
                        break;
                    }
                }
                if matched {
                    psl_counts[idx] += 1;
                }
            }

            let w = search_k.min(preds.len());
            if w == 0 {
                nopred += 1;
                continue;
            }
            eligible += 1;

            let mut rev = search_k as u64;
            for t in 0..w {
                if similarity(&lines[i], &lines[preds[t]]) >= theta {
                    rev = t as u64 + 1;
                    break;
                }
            }
            rev_sum += rev;

            let mut seq = search_k as u64;
            for t in 0..w {
                // Sequential probe t+1 inspects the oldest unprobed entry.
                if similarity(&lines[i], &lines[preds[w - 1 - t]]) >= theta {
                    seq = t as u64 + 1;
                    break;
                }
            }
            seq_sum += seq;

            let mut best = -1.0f64;
            let mut best_probe = 1u64;
            for t in 0..w {
                let s = similarity(&lines[i], &lines[preds[t]]);
                if s > best {
                    best = s;
                    best_probe = t as u64 + 1;
                }
            }
            mss_sum += best;
            an_sum += best_probe;
        }

        let psl = psl_counts.iter().map(|&c| c as f64 / n as f64).collect();
        let (seq, rev, an) = if include_nopred_as_k {
            let denom = eligible + nopred;
            if denom == 0 {
                (None, None, None)
            } else {
                let extra = nopred * search_k as u64;
                (
                    Some((seq_sum + extra) as f64 / denom as f64),
                    Some((rev_sum + extra) as f64 / denom as f64),
                    Some((an_sum + extra) as f64 / denom as f64),
                )
            }
        } else if eligible == 0 {
            (None, None, None)
        } else {
            (
                Some(seq_sum as f64 / eligible as f64),
                Some(rev_sum as f64 / eligible as f64),
                Some(an_sum as f64 / eligible as f64),
            )
        };
        let mss = (eligible > 0).then(|| mss_sum / eligible as f64);
        // The upper-bound pair is undefined without any comparable pair.
        let an = if eligible == 0 { None } else { an };

        NaiveReport {
            avg_length,
            distinct_lengths,
            distinct_length_ratio,
            psl,
            seq,
            rev,
            mss,
            an,
        }
    }
}
