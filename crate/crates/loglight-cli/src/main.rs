//! loglight: compress, decompress, analyze, and benchmark log streams.
//!
//! Exit codes: 0 success, 1 usage or environment error, 2 data error (the
//! codec error kind is printed to stderr).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

use loglight::bench::{bench_codec, bench_with_post, BenchError};
use loglight::metrics::{characterize, MetricsOptions};
use loglight::stream::patch_trailing_newline;
use loglight::{split_lines, CodecConfig, CodecError, Compressor, Decompressor, Variant};

/// Compressed records are spooled in memory up to this size when the header
/// cannot be finalized before the input is fully read (stdin to stdout).
const SPOOL_MEMORY_LIMIT: usize = 8 * 1024 * 1024;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

#[derive(Parser)]
#[command(name = "loglight", version, about = "Streaming lossless log compression")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Compress a log stream into a container
    Compress(CompressArgs),
    /// Restore the original log stream from a container
    Decompress(DecompressArgs),
    /// Characterize a log corpus: lengths, similarity, search costs
    Analyze(AnalyzeArgs),
    /// Measure compression ratio and throughput on a corpus file
    Bench(BenchArgs),
}

#[derive(Args)]
struct CodecArgs {
    /// Window size: cached lines per distinct length (1-256)
    #[arg(short = 'k', long = "window-size", default_value_t = CodecConfig::DEFAULT_K)]
    window_size: usize,
    /// Similarity threshold in (0, 1]
    #[arg(long, default_value_t = CodecConfig::DEFAULT_THETA)]
    theta: f64,
    /// Record stream variant: b (bit-aligned) or B (byte-aligned)
    #[arg(long, value_parser = parse_variant, default_value = "B")]
    variant: Variant,
}

impl CodecArgs {
    fn config(&self) -> Result<CodecConfig, CliError> {
        Ok(CodecConfig::new(self.window_size, self.theta, self.variant)?)
    }
}

fn parse_variant(value: &str) -> Result<Variant, String> {
    match value {
        "b" | "bit" => Ok(Variant::Bit),
        "B" | "byte" => Ok(Variant::Byte),
        _ => Err(format!("expected `b` or `B`, got `{value}`")),
    }
}

#[derive(Args)]
struct CompressArgs {
    /// Input log file, or `-` for stdin
    #[arg(default_value = "-")]
    input: String,
    /// Output container file, or `-` for stdout
    #[arg(default_value = "-")]
    output: String,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Args)]
struct DecompressArgs {
    /// Input container file, or `-` for stdin
    #[arg(default_value = "-")]
    input: String,
    /// Output log file, or `-` for stdout
    #[arg(default_value = "-")]
    output: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input log file, or `-` for stdin
    #[arg(default_value = "-")]
    input: String,
    /// Comma-separated window sizes for the similarity-proportion columns
    #[arg(long = "psl-k", default_value = "32,16,8,4,2", value_parser = parse_k_list)]
    psl_k: KList,
    /// Similarity threshold in (0, 1]
    #[arg(long, default_value_t = 0.85)]
    theta: f64,
    /// Window size for search statistics (default: largest --psl-k entry)
    #[arg(long = "search-k")]
    search_k: Option<usize>,
    /// Record lines without a same-length in-window predecessor as k probes
    /// instead of excluding them from the averages
    #[arg(long = "include-nopred-as-k")]
    include_nopred_as_k: bool,
    /// Output format
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
    /// Corpus name in the report (default: input file name)
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone)]
struct KList(Vec<usize>);

fn parse_k_list(value: &str) -> Result<KList, String> {
    let ks = value
        .split(',')
        .map(|part| part.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if ks.is_empty() || ks.contains(&0) {
        return Err("window sizes must be positive".into());
    }
    Ok(KList(ks))
}

#[derive(Args)]
struct BenchArgs {
    /// Corpus file to measure
    input: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    /// Timed repetitions; the median is reported
    #[arg(long, default_value_t = 3)]
    reps: u32,
    /// External post-compression filter (bytes in, bytes out), e.g. `zstd -q`
    #[arg(long = "post-cmd")]
    post_cmd: Option<String>,
    /// Inverse of --post-cmd, used to verify the archive path, e.g. `zstd -dq`
    #[arg(long = "post-inverse-cmd")]
    post_inverse_cmd: Option<String>,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> CliError {
        match e {
            CodecError::Io(err) => CliError::Usage(format!("i/o error: {err}")),
            other => CliError::Data(format!("{}: {other}", other.kind_name())),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> CliError {
        match e {
            BenchError::Codec(inner) => CliError::from(inner),
            BenchError::Io(err) => CliError::Usage(format!("i/o error: {err}")),
            BenchError::PostCommand(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<loglight::metrics::MetricsError> for CliError {
    fn from(e: loglight::metrics::MetricsError) -> CliError {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("loglight: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("loglight: {msg}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        CliCommand::Compress(args) => run_compress(args),
        CliCommand::Decompress(args) => run_decompress(args),
        CliCommand::Analyze(args) => run_analyze(args),
        CliCommand::Bench(args) => run_bench(args),
    }
}

fn open_input(spec: &str) -> Result<Box<dyn Read>, CliError> {
    if spec == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        let file = File::open(spec)
            .map_err(|e| CliError::Usage(format!("cannot open `{spec}`: {e}")))?;
        Ok(Box::new(file))
    }
}

/// Feeds LF-delimited lines to the compressor and returns whether the input
/// ended with LF.
fn compress_lines<R: BufRead, W: Write>(
    reader: &mut R,
    compressor: &mut Compressor<W>,
) -> Result<bool, CliError> {
    let mut buf = Vec::with_capacity(4096);
    let mut trailing = false;
    loop {
        buf.clear();
        let n = reader.read_until(0x0A, &mut buf)?;
        if n == 0 {
            return Ok(trailing);
        }
        trailing = buf.last() == Some(&0x0A);
        if trailing {
            buf.pop();
        }
        compressor.write_line(&buf)?;
    }
}

fn run_compress(args: CompressArgs) -> Result<(), CliError> {
    let config = args.codec.config()?;

    if args.input != "-" {
        // Seekable input: the trailing-newline disposition is known up front,
        // so records stream straight to the output.
        let mut file = File::open(&args.input)
            .map_err(|e| CliError::Usage(format!("cannot open `{}`: {e}", args.input)))?;
        let len = file.metadata()?.len();
        let trailing = if len == 0 {
            false
        } else {
            file.seek(SeekFrom::End(-1))?;
            let mut last = [0u8; 1];
            file.read_exact(&mut last)?;
            file.seek(SeekFrom::Start(0))?;
            last[0] == 0x0A
        };
        let mut reader = BufReader::with_capacity(256 * 1024, file);

        let mut write_to = |sink: Box<dyn Write>| -> Result<(), CliError> {
            let mut compressor = Compressor::new(sink, config, trailing)?;
            compress_lines(&mut reader, &mut compressor)?;
            compressor.finish()?.flush()?;
            Ok(())
        };
        if args.output == "-" {
            write_to(Box::new(BufWriter::new(io::stdout().lock())))
        } else {
            write_to(Box::new(BufWriter::new(create_output(&args.output)?)))
        }
    } else if args.output != "-" {
        // Pipe input, seekable output: stream records to the file and patch
        // the header's trailing-newline bit once the input is exhausted.
        let mut reader = BufReader::with_capacity(256 * 1024, io::stdin().lock());
        let out = create_output(&args.output)?;
        let mut compressor = Compressor::new(BufWriter::new(out), config, false)?;
        let trailing = compress_lines(&mut reader, &mut compressor)?;
        let mut out = compressor.finish()?;
        out.flush()?;
        let mut file = out
            .into_inner()
            .map_err(|e| CliError::Usage(format!("i/o error: {e}")))?;
        patch_trailing_newline(&mut file, trailing)?;
        Ok(())
    } else {
        // Pipe to pipe: the header cannot be finalized until the input ends,
        // so records spool to memory (spilling to a temp file past the cap)
        // and are copied out once the flag byte is patched.
        let mut reader = BufReader::with_capacity(256 * 1024, io::stdin().lock());
        let spool = tempfile::spooled_tempfile(SPOOL_MEMORY_LIMIT);
        let mut compressor = Compressor::new(spool, config, false)?;
        let trailing = compress_lines(&mut reader, &mut compressor)?;
        let mut spool = compressor.finish()?;
        patch_trailing_newline(&mut spool, trailing)?;
        spool.seek(SeekFrom::Start(0))?;
        let mut stdout = BufWriter::new(io::stdout().lock());
        io::copy(&mut spool, &mut stdout)?;
        stdout.flush()?;
        Ok(())
    }
}

fn create_output(spec: &str) -> Result<File, CliError> {
    File::create(spec).map_err(|e| CliError::Usage(format!("cannot create `{spec}`: {e}")))
}

fn run_decompress(args: DecompressArgs) -> Result<(), CliError> {
    let reader = BufReader::with_capacity(256 * 1024, open_input(&args.input)?);
    let mut writer: Box<dyn Write> = if args.output == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(create_output(&args.output)?))
    };

    let mut decompressor = Decompressor::new(reader)?;
    let mut first = true;
    while let Some(line) = decompressor.next_line()? {
        if !first {
            writer.write_all(b"\n")?;
        }
        writer.write_all(line)?;
        first = false;
    }
    if decompressor.trailing_newline() {
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let mut raw = Vec::new();
    open_input(&args.input)?.read_to_end(&mut raw)?;
    let (lines, _) = split_lines(&raw)?;

    let name = args.name.clone().unwrap_or_else(|| {
        if args.input == "-" {
            "-".to_string()
        } else {
            Path::new(&args.input)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| args.input.clone())
        }
    });
    let options = MetricsOptions {
        psl_k: args.psl_k.0.clone(),
        theta: args.theta,
        search_k: args.search_k,
        include_nopred_as_k: args.include_nopred_as_k,
    };
    let report = characterize(&name, &lines, raw.len() as u64, &options)?;
    let mut stdout = io::stdout().lock();
    match args.format.as_str() {
        "csv" => stdout.write_all(report.to_csv().as_bytes())?,
        _ => {
            stdout.write_all(report.to_json().as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let config = args.codec.config()?;
    let result = match &args.post_cmd {
        Some(post) => bench_with_post(
            &args.input,
            config,
            args.reps,
            post,
            args.post_inverse_cmd.as_deref(),
        )?,
        None => bench_codec(&args.input, config, args.reps)?,
    };
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &result)
        .map_err(|e| CliError::Data(e.to_string()))?;
    stdout.write_all(b"\n")?;
    Ok(())
}
