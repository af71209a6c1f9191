//! Measurement harness: compression ratio, compression speed, and
//! decompression speed over a corpus file, with an optional external
//! post-compression filter for archive-style pipelines.
//!
//! Ratio is compressed size divided by original size (smaller is better).
//! Speeds are computed over the original, uncompressed byte count. The
//! primary timings run entirely in memory; a file-to-file figure including
//! read/write is reported alongside.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::config::CodecConfig;
use crate::error::CodecError;
use crate::stream::{compress_stream, decompress_stream};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("codec error: {0}")]
    Codec(#[from] CodecError),
    #[error("round-trip mismatch: decompressed output differs from the input")]
    RoundTripMismatch,
    #[error("nondeterministic compression output across repetitions")]
    NonDeterministic,
    #[error("post-compressor failed: {0}")]
    PostCommand(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

/// One benchmark row, serialized as JSON by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub dataset: String,
    pub config: CodecConfig,
    pub repetitions: u32,
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    /// compressed / original; absent for an empty corpus.
    pub ratio: Option<f64>,
    /// Median in-memory wall times, seconds.
    pub compress_seconds: Option<f64>,
    pub decompress_seconds: Option<f64>,
    /// Throughput over original bytes, MB/s (1 MB = 1e6 bytes).
    pub compress_mb_per_s: Option<f64>,
    pub decompress_mb_per_s: Option<f64>,
    /// Compression timed file-to-file, including read and write.
    pub io_compress_seconds: Option<f64>,
    pub io_compress_mb_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_compressed_bytes: Option<u64>,
    /// post-compressed / original.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_ratio: Option<f64>,
}

/// Compresses and decompresses `path` `repetitions` times, verifies the
/// round trip before reporting anything, and reports medians.
pub fn bench_codec(path: &Path, config: CodecConfig, repetitions: u32) -> Result<BenchResult> {
    let raw = fs::read(path)?;
    let dataset = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    bench_buffer(&dataset, &raw, Some(path), config, repetitions)
}

/// In-memory variant of [`bench_codec`] for callers that already hold the
/// corpus; skips the file-to-file timing.
pub fn bench_buffer(
    dataset: &str,
    raw: &[u8],
    path: Option<&Path>,
    config: CodecConfig,
    repetitions: u32,
) -> Result<BenchResult> {
    let repetitions = repetitions.max(1);
    let mut compress_times = Vec::with_capacity(repetitions as usize);
    let mut decompress_times = Vec::with_capacity(repetitions as usize);
    let mut container: Option<Vec<u8>> = None;

    for _ in 0..repetitions {
        let started = Instant::now();
        let compressed = compress_stream(raw, config)?;
        compress_times.push(started.elapsed().as_secs_f64());

        let started = Instant::now();
        let restored = decompress_stream(&compressed)?;
        decompress_times.push(started.elapsed().as_secs_f64());

        if restored != raw {
            return Err(BenchError::RoundTripMismatch);
        }
        match &container {
            Some(prev) if *prev != compressed => return Err(BenchError::NonDeterministic),
            Some(_) => {}
            None => container = Some(compressed),
        }
    }
    let container = container.expect("at least one repetition");

    let io_compress_seconds = match path {
        Some(path) if !raw.is_empty() => Some(timed_file_compress(path, config, repetitions)?),
        _ => None,
    };

    let original_bytes = raw.len() as u64;
    let compressed_bytes = container.len() as u64;
    let nonempty = original_bytes > 0;
    let mb = original_bytes as f64 / 1e6;
    let compress_seconds = nonempty.then(|| median(&mut compress_times));
    let decompress_seconds = nonempty.then(|| median(&mut decompress_times));

    Ok(BenchResult {
        dataset: dataset.to_string(),
        config,
        repetitions,
        original_bytes,
        compressed_bytes,
        ratio: nonempty.then(|| compressed_bytes as f64 / original_bytes as f64),
        compress_seconds,
        decompress_seconds,
        compress_mb_per_s: compress_seconds.map(|s| mb / s),
        decompress_mb_per_s: decompress_seconds.map(|s| mb / s),
        io_compress_seconds,
        io_compress_mb_per_s: io_compress_seconds.map(|s| mb / s),
        post_command: None,
        post_compressed_bytes: None,
        post_ratio: None,
    })
}

/// Runs [`bench_codec`] and then pipes the container through an external
/// filter command (`sh -c`), reporting the combined ratio. When an inverse
/// command is given, the filter output is piped back through it and must
/// reproduce the container exactly before the result is reported.
pub fn bench_with_post(
    path: &Path,
    config: CodecConfig,
    repetitions: u32,
    post_command: &str,
    post_inverse_command: Option<&str>,
) -> Result<BenchResult> {
    let mut result = bench_codec(path, config, repetitions)?;
    let raw = fs::read(path)?;
    let container = compress_stream(&raw, config)?;

    let post_bytes = run_filter(post_command, &container)?;
    if let Some(inverse) = post_inverse_command {
        let recovered = run_filter(inverse, &post_bytes)?;
        if recovered != container {
            return Err(BenchError::PostCommand(format!(
                "inverse `{inverse}` did not reproduce the container"
            )));
        }
    }

    result.post_command = Some(post_command.to_string());
    result.post_compressed_bytes = Some(post_bytes.len() as u64);
    result.post_ratio = (result.original_bytes > 0)
        .then(|| post_bytes.len() as f64 / result.original_bytes as f64);
    Ok(result)
}

/// Feeds `input` to `sh -c command` and collects stdout. A nonzero exit or a
/// spawn failure aborts the benchmark; no partial result is reported.
fn run_filter(command: &str, input: &[u8]) -> Result<Vec<u8>> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| BenchError::PostCommand(format!("failed to spawn `{command}`: {e}")))?;

    let mut stdin = child.stdin.take().expect("stdin piped");
    let input = input.to_vec();
    let writer = std::thread::spawn(move || stdin.write_all(&input));

    let output = child
        .wait_with_output()
        .map_err(|e| BenchError::PostCommand(format!("`{command}` failed: {e}")))?;
    // A filter that exits before draining stdin surfaces as a broken pipe
    // here; the exit status is the authoritative signal.
    let _ = writer.join().expect("stdin writer thread");

    if !output.status.success() {
        return Err(BenchError::PostCommand(format!(
            "`{command}` exited with {}",
            output.status
        )));
    }
    Ok(output.stdout)
}

fn timed_file_compress(path: &Path, config: CodecConfig, repetitions: u32) -> Result<f64> {
    let mut times = Vec::with_capacity(repetitions as usize);
    let scratch = std::env::temp_dir().join(format!(
        "loglight-bench-{}-{}.lgl",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    ));
    for _ in 0..repetitions {
        let started = Instant::now();
        let raw = fs::read(path)?;
        let compressed = compress_stream(&raw, config)?;
        fs::write(&scratch, &compressed)?;
        times.push(started.elapsed().as_secs_f64());
    }
    let _ = fs::remove_file(&scratch);
    Ok(median(&mut times))
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}
