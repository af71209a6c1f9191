//! Corpus characterization: length statistics, length-bucketed similarity
//! proportions, and search-cost statistics.
//!
//! All metrics treat the corpus as an ordered sequence of lines and bucket
//! lines by exact length, preserving order inside each bucket. "Window"
//! always means the `k` most recent earlier lines of the same length.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::line::LogLine;
use crate::xorp::similarity;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Knobs for [`characterize`].
#[derive(Debug, Clone)]
pub struct MetricsOptions {
    /// Window sizes for the similarity-proportion columns.
    pub psl_k: Vec<usize>,
    /// Similarity threshold.
    pub theta: f64,
    /// Window size for the search-count and upper-bound statistics;
    /// defaults to the largest entry of `psl_k`.
    pub search_k: Option<usize>,
    /// Average search counts over every line, recording lines without any
    /// same-length in-window predecessor as `k` probes, instead of excluding
    /// them.
    pub include_nopred_as_k: bool,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            psl_k: vec![32, 16, 8, 4, 2],
            theta: 0.85,
            search_k: None,
            include_nopred_as_k: false,
        }
    }
}

/// One similarity-proportion data point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PslPoint {
    pub k: usize,
    /// Fraction of lines with a window match at threshold theta, in [0, 1].
    pub value: f64,
}

/// Per-corpus characterization row.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationReport {
    pub name: String,
    pub size_bytes: u64,
    pub lines: usize,
    /// Mean line length in bytes.
    pub avg_length: f64,
    /// Count of distinct line lengths.
    pub distinct_lengths: usize,
    /// distinct_lengths / lines, in (0, 1].
    pub distinct_length_ratio: f64,
    pub theta: f64,
    pub psl: Vec<PslPoint>,
    /// Window size used for seq/rev/mss/an.
    pub search_k: usize,
    /// Mean probes to find a threshold match scanning oldest-first.
    pub seq: Option<f64>,
    /// Mean probes to find a threshold match scanning newest-first.
    pub rev: Option<f64>,
    /// Mean of per-line maximum similarity inside the window, in [0, 1].
    pub mss: Option<f64>,
    /// Mean newest-first probes to first reach the per-line maximum.
    pub an: Option<f64>,
}

/// Mean length, distinct length count, and their ratio.
pub fn basic_stats(lines: &[LogLine]) -> Result<(f64, usize, f64)> {
    if lines.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let n = lines.len();
    let total: u64 = lines.iter().map(|l| l.len() as u64).sum();
    let mut seen: HashMap<usize, ()> = HashMap::new();
    for line in lines {
        seen.insert(line.len(), ());
    }
    let ndl = seen.len();
    Ok((total as f64 / n as f64, ndl, ndl as f64 / n as f64))
}

/// Fraction of lines that have, among the `k` most recent earlier lines of
/// the same length, at least one with similarity >= `theta`.
pub fn psl(lines: &[LogLine], k: usize, theta: f64) -> Result<f64> {
    let scan = scan_corpus(lines, &[k], theta, k)?;
    Ok(scan.psl_fraction(0, lines.len()))
}

/// Mean probe counts to find a threshold match, scanning the window
/// oldest-first (`seq`) and newest-first (`rev`). A line whose window has no
/// match is recorded as `k` probes. Returns `None` when no line has any
/// same-length in-window predecessor (and the inclusion flag is off).
pub fn search_counts(
    lines: &[LogLine],
    k: usize,
    theta: f64,
    include_nopred_as_k: bool,
) -> Result<Option<(f64, f64)>> {
    let scan = scan_corpus(lines, &[], theta, k)?;
    Ok(scan.search_means(k, include_nopred_as_k))
}

/// Mean of per-line maximum window similarity and the mean newest-first
/// probe count at which that maximum is first attained.
pub fn mss_an(
    lines: &[LogLine],
    k: usize,
    include_nopred_as_k: bool,
) -> Result<Option<(f64, f64)>> {
    // Threshold is irrelevant here; the scan only uses it for psl/seq/rev.
    let scan = scan_corpus(lines, &[], 1.0, k)?;
    Ok(scan.upper_bound_means(k, include_nopred_as_k))
}

/// Computes the full characterization row.
pub fn characterize(
    name: &str,
    lines: &[LogLine],
    size_bytes: u64,
    options: &MetricsOptions,
) -> Result<CharacterizationReport> {
    let (avg_length, distinct_lengths, distinct_length_ratio) = basic_stats(lines)?;
    if options.psl_k.is_empty() {
        return Err(MetricsError::InvalidParameter("empty psl window list".into()));
    }
    let search_k = options
        .search_k
        .unwrap_or_else(|| *options.psl_k.iter().max().expect("nonempty"));
    let scan = scan_corpus(lines, &options.psl_k, options.theta, search_k)?;

    let psl = options
        .psl_k
        .iter()
        .enumerate()
        .map(|(i, &k)| PslPoint {
            k,
            value: scan.psl_fraction(i, lines.len()),
        })
        .collect();
    let search = scan.search_means(search_k, options.include_nopred_as_k);
    let upper = scan.upper_bound_means(search_k, options.include_nopred_as_k);

    Ok(CharacterizationReport {
        name: name.to_string(),
        size_bytes,
        lines: lines.len(),
        avg_length,
        distinct_lengths,
        distinct_length_ratio,
        theta: scan.theta,
        psl,
        search_k,
        seq: search.map(|(s, _)| s),
        rev: search.map(|(_, r)| r),
        mss: upper.map(|(m, _)| m),
        an: upper.map(|(_, a)| a),
    })
}

struct CorpusScan {
    theta: f64,
    psl_counts: Vec<u64>,
    eligible: u64,
    nopred: u64,
    seq_sum: u64,
    rev_sum: u64,
    mss_sum: f64,
    an_sum: u64,
}

impl CorpusScan {
    fn psl_fraction(&self, idx: usize, n: usize) -> f64 {
        self.psl_counts[idx] as f64 / n as f64
    }

    fn search_means(&self, k: usize, include_nopred_as_k: bool) -> Option<(f64, f64)> {
        let (extra, denom) = self.averaging(k, include_nopred_as_k)?;
        Some((
            (self.seq_sum + extra) as f64 / denom as f64,
            (self.rev_sum + extra) as f64 / denom as f64,
        ))
    }

    fn upper_bound_means(&self, k: usize, include_nopred_as_k: bool) -> Option<(f64, f64)> {
        if self.eligible == 0 {
            return None;
        }
        let (extra, denom) = self.averaging(k, include_nopred_as_k)?;
        Some((
            self.mss_sum / self.eligible as f64,
            (self.an_sum + extra) as f64 / denom as f64,
        ))
    }

    fn averaging(&self, k: usize, include_nopred_as_k: bool) -> Option<(u64, u64)> {
        if include_nopred_as_k {
            let denom = self.eligible + self.nopred;
            if denom == 0 {
                return None;
            }
            Some((self.nopred * k as u64, denom))
        } else if self.eligible == 0 {
            None
        } else {
            Some((0, self.eligible))
        }
    }
}

/// Single pass over the corpus maintaining one window per length. Similarity
/// to each window entry is computed once per line and shared by every metric.
fn scan_corpus(lines: &[LogLine], psl_k: &[usize], theta: f64, search_k: usize) -> Result<CorpusScan> {
    if lines.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    if search_k < 1 || psl_k.iter().any(|&k| k < 1) {
        return Err(MetricsError::InvalidParameter("window size must be >= 1".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(MetricsError::InvalidParameter(format!(
            "theta must be in (0, 1], got {theta}"
        )));
    }

    let max_k = psl_k.iter().copied().max().unwrap_or(1).max(search_k);
    let mut buckets: HashMap<usize, VecDeque<usize>> = HashMap::new();
    let mut scan = CorpusScan {
        theta,
        psl_counts: vec![0; psl_k.len()],
        eligible: 0,
        nopred: 0,
        seq_sum: 0,
        rev_sum: 0,
        mss_sum: 0.0,
        an_sum: 0,
    };
    let mut sims: Vec<f64> = Vec::with_capacity(max_k);

    for (i, line) in lines.iter().enumerate() {
        let bucket = buckets.entry(line.len()).or_default();

        // sims[j] is the similarity to the (j+1)-th most recent predecessor.
        sims.clear();
        for &j in bucket.iter().rev() {
            sims.push(similarity(line.as_bytes(), lines[j].as_bytes()));
        }
        let available = sims.len();

        let first_match = sims.iter().position(|&s| s >= theta);
        for (idx, &k) in psl_k.iter().enumerate() {
            if first_match.is_some_and(|fm| fm < k) {
                scan.psl_counts[idx] += 1;
            }
        }

        if available >= 1 {
            scan.eligible += 1;
            let w = search_k.min(available);
            let window = &sims[..w];
            scan.rev_sum += match window.iter().position(|&s| s >= theta) {
                Some(j) => j as u64 + 1,
                None => search_k as u64,
            };
            // Sequential probe t inspects window[w - t].
            scan.seq_sum += match window.iter().rposition(|&s| s >= theta) {
                Some(j) => (w - j) as u64,
                None => search_k as u64,
            };
            let mut best = f64::NEG_INFINITY;
            let mut best_at = 0usize;
            for (j, &s) in window.iter().enumerate() {
                if s > best {
                    best = s;
                    best_at = j;
                }
            }
            scan.mss_sum += best;
            scan.an_sum += best_at as u64 + 1;
        } else {
            scan.nopred += 1;
        }

        bucket.push_back(i);
        if bucket.len() > max_k {
            bucket.pop_front();
        }
    }
    Ok(scan)
}

fn fmt_pct(fraction: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, fraction * 100.0)
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| format!("{v:.2}"))
}

fn fmt_opt_pct(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| fmt_pct(v, 1))
}

impl CharacterizationReport {
    /// Two CSV lines: header and the row. Percentages carry one decimal
    /// place, the distinct-length ratio four.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("name,size_bytes,size_mb,lines,al,ndl,rdl_pct");
        let mut row = format!(
            "{},{},{:.2},{},{:.2},{},{}",
            csv_escape(&self.name),
            self.size_bytes,
            self.size_bytes as f64 / 1e6,
            self.lines,
            self.avg_length,
            self.distinct_lengths,
            fmt_pct(self.distinct_length_ratio, 4),
        );
        for point in &self.psl {
            header.push_str(&format!(",psl{}_pct", point.k));
            row.push_str(&format!(",{}", fmt_pct(point.value, 1)));
        }
        header.push_str(",seq,rev,mss_pct,an,theta,search_k");
        row.push_str(&format!(
            ",{},{},{},{},{},{}",
            fmt_opt(self.seq),
            fmt_opt(self.rev),
            fmt_opt_pct(self.mss),
            fmt_opt(self.an),
            self.theta,
            self.search_k,
        ));
        format!("{header}\n{row}\n")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(strs: &[&str]) -> Vec<LogLine> {
        strs.iter()
            .map(|s| LogLine::new(s.as_bytes().to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn basic_stats_mixed_lengths() {
        let lines = corpus(&["abc", "xyz", "hello"]);
        let (al, ndl, rdl) = basic_stats(&lines).unwrap();
        assert_eq!(al, 11.0 / 3.0);
        assert_eq!(ndl, 2);
        assert_eq!(rdl, 2.0 / 3.0);
    }

    #[test]
    fn basic_stats_identical_lengths() {
        let lines = corpus(&["aaaa"; 10]);
        let (al, ndl, rdl) = basic_stats(&lines).unwrap();
        assert_eq!(al, 4.0);
        assert_eq!(ndl, 1);
        assert_eq!(rdl, 0.1);
    }

    #[test]
    fn basic_stats_empty_corpus() {
        assert!(matches!(basic_stats(&[]), Err(MetricsError::EmptyCorpus)));
    }

    #[test]
    fn psl_counts_lines_with_window_match() {
        let lines = corpus(&["same", "same", "same", "same"]);
        assert_eq!(psl(&lines, 2, 0.85).unwrap(), 0.75);
    }

    #[test]
    fn psl_zero_for_singleton_buckets() {
        let lines = corpus(&["a", "bb", "ccc", "dddd"]);
        assert_eq!(psl(&lines, 32, 0.85).unwrap(), 0.0);
    }

    #[test]
    fn psl_respects_window_size() {
        // The only match is 3 back; k=2 misses it, k=3 finds it.
        let lines = corpus(&["abcd", "wxyz", "pqrs", "abcd"]);
        assert_eq!(psl(&lines, 2, 0.85).unwrap(), 0.0);
        assert_eq!(psl(&lines, 3, 0.85).unwrap(), 0.25);
    }

    #[test]
    fn psl_monotone_in_k() {
        let lines = corpus(&[
            "aaaa", "bbbb", "aaaa", "cccc", "dddd", "aaaa", "bbbb", "x", "yy", "x",
        ]);
        let mut prev = 0.0;
        for k in [1, 2, 4, 8, 16, 32] {
            let v = psl(&lines, k, 0.85).unwrap();
            assert!(v >= prev, "psl({k}) = {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn rev_is_one_when_immediate_predecessor_matches() {
        let lines = corpus(&["log line", "log line", "log line"]);
        let (seq, rev) = search_counts(&lines, 8, 0.85, false).unwrap().unwrap();
        assert_eq!(rev, 1.0);
        assert_eq!(seq, 1.0);
    }

    #[test]
    fn seq_and_rev_disagree_when_match_is_oldest() {
        // Fourth line matches only the first; its window holds 3 entries.
        let lines = corpus(&["aaaa", "bbbb", "cccc", "aaaa"]);
        let (seq, rev) = search_counts(&lines, 8, 0.85, false).unwrap().unwrap();
        // Lines 2 and 3 find nothing and record k=8; line 4: seq 1, rev 3.
        assert_eq!(seq, (8.0 + 8.0 + 1.0) / 3.0);
        assert_eq!(rev, (8.0 + 8.0 + 3.0) / 3.0);
    }

    #[test]
    fn search_counts_none_without_comparable_pairs() {
        let lines = corpus(&["a", "bb", "ccc"]);
        assert!(search_counts(&lines, 8, 0.85, false).unwrap().is_none());
        // Inclusion mode records every line as k probes.
        let (seq, rev) = search_counts(&lines, 8, 0.85, true).unwrap().unwrap();
        assert_eq!(seq, 8.0);
        assert_eq!(rev, 8.0);
    }

    #[test]
    fn mss_an_all_identical() {
        let lines = corpus(&["zzzz", "zzzz", "zzzz"]);
        let (mss, an) = mss_an(&lines, 8, false).unwrap().unwrap();
        assert_eq!(mss, 1.0);
        assert_eq!(an, 1.0);
    }

    #[test]
    fn an_records_first_attainment_of_maximum() {
        // Best match for the last line sits 3 probes back.
        let lines = corpus(&["abcx", "ayyy", "azzz", "abcd"]);
        let (mss, an) = mss_an(&lines, 8, false).unwrap().unwrap();
        // Line 2: max 0.25 at probe 1; line 3: sims [0.25, 0.25] -> probe 1;
        // line 4: sims [0.25, 0.25, 0.75] -> max 0.75 at probe 3.
        assert_eq!(mss, (0.25 + 0.25 + 0.75) / 3.0);
        assert_eq!(an, (1.0 + 1.0 + 3.0) / 3.0);
    }

    #[test]
    fn characterize_single_line_reports_absent_search_stats() {
        let lines = corpus(&["only"]);
        let report = characterize("one", &lines, 5, &MetricsOptions::default()).unwrap();
        assert_eq!(report.avg_length, 4.0);
        assert_eq!(report.distinct_lengths, 1);
        assert!(report.psl.iter().all(|p| p.value == 0.0));
        assert!(report.seq.is_none());
        assert!(report.rev.is_none());
        assert!(report.mss.is_none());
        assert!(report.an.is_none());
    }

    #[test]
    fn characterize_emits_csv_and_json() {
        let lines = corpus(&["aaaa", "aaaa", "bb"]);
        let report = characterize("demo", &lines, 13, &MetricsOptions::default()).unwrap();
        let csv = report.to_csv();
        let mut it = csv.lines();
        let header = it.next().unwrap();
        let row = it.next().unwrap();
        assert!(header.starts_with("name,size_bytes,size_mb,lines,al,ndl,rdl_pct,psl32_pct"));
        assert_eq!(header.split(',').count(), row.split(',').count());
        assert!(row.starts_with("demo,13,"));

        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["lines"], 3);
        assert_eq!(json["distinct_lengths"], 2);
        assert_eq!(json["psl"][0]["k"], 32);
    }

    #[test]
    fn search_window_is_capped_at_k() {
        // Five predecessors but k = 2: only the two most recent are probed.
        let lines = corpus(&["abcd", "eeee", "ffff", "gggg", "hhhh", "abcd"]);
        let (seq, rev) = search_counts(&lines, 2, 0.85, false).unwrap().unwrap();
        // No line finds a match inside its 2-window: all record 2.
        assert_eq!(seq, 2.0);
        assert_eq!(rev, 2.0);
        let (mss, _) = mss_an(&lines, 2, false).unwrap().unwrap();
        assert!(mss < 0.85);
    }
}
