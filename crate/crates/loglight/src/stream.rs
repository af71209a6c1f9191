//! Streaming compressor and decompressor engines and the container format.
//!
//! A container is a fixed 10-byte header followed by one record per input
//! line, in input order. Each line is emitted either raw (flag bit 0, varint
//! length, content) or as a run-length record referencing a cached line of
//! the same length (see the `rle` module). Both sides cache every processed
//! line after handling it, so the decoder's window state mirrors the
//! encoder's exactly and records can refer to cache entries by position.

use std::io::{Read, Seek, SeekFrom, Write};

use crate::bits::{push_varint, read_varint, read_varint_bits, varint_len, write_varint_bits, BitSink, BitSource};
use crate::config::{CodecConfig, Variant, THETA_SCALE};
use crate::error::{CodecError, Result};
use crate::line::{validate_line_bytes, LogLine, MAX_LINE_LEN};
use crate::lwindows::LengthWindows;
use crate::rle::{
    bit_record_len_bits, byte_record_len, decode_bit_record_body, decode_byte_record_after_flag,
    detokenize, encode_bit_record, encode_byte_record, tokenize,
};
use crate::xorp::{find_similar, restore};

pub const MAGIC: [u8; 4] = *b"LGLT";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Offset of the flags byte inside the header, for writers that need to
/// patch the trailing-newline bit after streaming from a pipe.
pub const FLAGS_OFFSET: u64 = 9;

const FLAG_TRAILING_NEWLINE: u8 = 0b0000_0001;

/// The decoded container header: codec parameters plus the trailing-newline
/// disposition of the original input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainerHeader {
    pub config: CodecConfig,
    pub trailing_newline: bool,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[..4].copy_from_slice(&MAGIC);
        h[4] = VERSION;
        h[5] = self.config.variant().wire_byte();
        // k is 1..=256; 0 encodes 256.
        h[6] = (self.config.window_size() % 256) as u8;
        h[7..9].copy_from_slice(&self.config.theta_scaled().to_be_bytes());
        h[9] = if self.trailing_newline {
            FLAG_TRAILING_NEWLINE
        } else {
            0
        };
        h
    }

    pub fn from_bytes(h: &[u8; HEADER_LEN]) -> Result<ContainerHeader> {
        if h[..4] != MAGIC {
            return Err(CodecError::BadHeader("magic mismatch".into()));
        }
        if h[4] != VERSION {
            return Err(CodecError::BadHeader(format!(
                "unsupported version {}, expected {VERSION}",
                h[4]
            )));
        }
        let variant = Variant::from_wire_byte(h[5])?;
        let k = if h[6] == 0 { 256 } else { h[6] as usize };
        let scaled = u16::from_be_bytes([h[7], h[8]]);
        if scaled == 0 || scaled as u32 > THETA_SCALE {
            return Err(CodecError::BadHeader(format!("theta field {scaled} out of range")));
        }
        let config = CodecConfig::new(k, scaled as f64 / THETA_SCALE as f64, variant)
            .map_err(|e| CodecError::BadHeader(e.to_string()))?;
        if h[9] & !FLAG_TRAILING_NEWLINE != 0 {
            return Err(CodecError::BadHeader(format!("unknown flag bits {:#04x}", h[9])));
        }
        Ok(ContainerHeader {
            config,
            trailing_newline: h[9] & FLAG_TRAILING_NEWLINE != 0,
        })
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<ContainerHeader> {
        let mut h = [0u8; HEADER_LEN];
        reader.read_exact(&mut h).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                CodecError::BadHeader("container shorter than header".into())
            } else {
                CodecError::Io(e)
            }
        })?;
        ContainerHeader::from_bytes(&h)
    }
}

/// Rewrites the trailing-newline flag of an already-written header in place.
pub fn patch_trailing_newline<S: Write + Seek>(out: &mut S, trailing_newline: bool) -> std::io::Result<()> {
    let end = out.stream_position()?;
    out.seek(SeekFrom::Start(FLAGS_OFFSET))?;
    out.write_all(&[if trailing_newline { FLAG_TRAILING_NEWLINE } else { 0 }])?;
    out.seek(SeekFrom::Start(end))?;
    Ok(())
}

/// Per-stream compression counters.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompressStats {
    pub lines: u64,
    pub raw_records: u64,
    pub rle_records: u64,
    /// Cached lines probed by similarity searches; at most `k` per line.
    pub similarity_probes: u64,
}

enum RecordSink<W: Write> {
    Byte(W),
    Bit(BitSink<W>),
}

/// Streaming line-by-line compressor. One instance owns one stream.
pub struct Compressor<W: Write> {
    config: CodecConfig,
    windows: LengthWindows,
    sink: RecordSink<W>,
    stats: CompressStats,
    scratch: Vec<u8>,
}

impl<W: Write> Compressor<W> {
    /// Writes the container header and readies the engine. The caller states
    /// up front whether the original input ends with a newline; writers that
    /// cannot know yet may pass a guess and fix the header afterwards with
    /// [`patch_trailing_newline`].
    pub fn new(mut sink: W, config: CodecConfig, trailing_newline: bool) -> Result<Compressor<W>> {
        let header = ContainerHeader {
            config,
            trailing_newline,
        };
        sink.write_all(&header.to_bytes())?;
        let sink = match config.variant() {
            Variant::Byte => RecordSink::Byte(sink),
            Variant::Bit => RecordSink::Bit(BitSink::new(sink)),
        };
        Ok(Compressor {
            config,
            windows: LengthWindows::new(config.window_size()),
            sink,
            stats: CompressStats::default(),
            scratch: Vec::new(),
        })
    }

    /// Encodes one delimiter-free line and emits its record.
    ///
    /// Lines with a never-seen length, lines whose queue is empty, empty
    /// lines, and lines whose encoded form would not be smaller than the raw
    /// framing are emitted raw. Every line is cached afterwards, whichever
    /// record it produced.
    pub fn write_line(&mut self, line: &[u8]) -> Result<()> {
        validate_line_bytes(line)?;
        self.stats.lines += 1;
        let len = line.len();

        let mut encoded = None;
        if len > 0 {
            if let Some(queue) = self.windows.lookup(len) {
                if !queue.is_empty() {
                    let theta = self.config.theta();
                    let out = find_similar(queue, line, theta).expect("queue is nonempty");
                    self.stats.similarity_probes += if out.score >= theta {
                        out.window_id as u64 + 1
                    } else {
                        queue.len() as u64
                    };
                    encoded = Some((tokenize(&out.bytes), out.window_id));
                }
            }
        }

        let k = self.config.window_size();
        match &mut self.sink {
            RecordSink::Byte(w) => {
                let raw_len = 1 + varint_len(len as u32) + len;
                match encoded {
                    Some((tokens, wid)) if byte_record_len(tokens.len(), k) < raw_len => {
                        self.scratch.clear();
                        encode_byte_record(&tokens, wid, k, &mut self.scratch);
                        w.write_all(&self.scratch)?;
                        self.stats.rle_records += 1;
                    }
                    _ => {
                        self.scratch.clear();
                        self.scratch.push(0x00);
                        push_varint(&mut self.scratch, len as u32);
                        w.write_all(&self.scratch)?;
                        w.write_all(line)?;
                        self.stats.raw_records += 1;
                    }
                }
            }
            RecordSink::Bit(sink) => {
                let raw_bits = 1 + 8 * (varint_len(len as u32) as u64 + len as u64);
                match encoded {
                    Some((tokens, wid)) if bit_record_len_bits(tokens.len(), k) < raw_bits => {
                        encode_bit_record(&tokens, wid, k, sink)?;
                        self.stats.rle_records += 1;
                    }
                    _ => {
                        sink.write_bit(false)?;
                        write_varint_bits(sink, len as u32)?;
                        for &b in line {
                            sink.write_bits(b as u64, 8)?;
                        }
                        self.stats.raw_records += 1;
                    }
                }
            }
        }

        self.windows.cache(LogLine::from_validated(line.to_vec()));
        Ok(())
    }

    /// Flushes any partial trailing byte (bit variant) and returns the sink.
    pub fn finish(self) -> Result<W> {
        match self.sink {
            RecordSink::Byte(w) => Ok(w),
            RecordSink::Bit(sink) => Ok(sink.finish()?),
        }
    }

    pub fn stats(&self) -> CompressStats {
        self.stats
    }

    pub fn windows(&self) -> &LengthWindows {
        &self.windows
    }

    pub fn config(&self) -> CodecConfig {
        self.config
    }
}

enum RecordSource<R: Read> {
    Byte(R),
    Bit(BitSource<R>),
}

/// Streaming line-by-line decompressor.
pub struct Decompressor<R: Read> {
    header: ContainerHeader,
    windows: LengthWindows,
    source: RecordSource<R>,
}

impl<R: Read> Decompressor<R> {
    /// Reads and validates the container header.
    pub fn new(mut source: R) -> Result<Decompressor<R>> {
        let header = ContainerHeader::read_from(&mut source)?;
        let windows = LengthWindows::new(header.config.window_size());
        let source = match header.config.variant() {
            Variant::Byte => RecordSource::Byte(source),
            Variant::Bit => RecordSource::Bit(BitSource::new(source)),
        };
        Ok(Decompressor {
            header,
            windows,
            source,
        })
    }

    /// Decodes the next record and returns the reconstructed line, or `None`
    /// at the end of the container. The line is cached exactly as the
    /// compressor cached it.
    pub fn next_line(&mut self) -> Result<Option<&[u8]>> {
        let k = self.header.config.window_size();
        let line: Vec<u8> = match &mut self.source {
            RecordSource::Byte(r) => {
                let flag = match read_byte_or_eof(r)? {
                    Some(b) => b,
                    None => return Ok(None),
                };
                if flag & 0x80 == 0 {
                    if flag != 0 {
                        return Err(CodecError::CorruptRecord(format!(
                            "nonzero padding in raw record flag byte {flag:#04x}"
                        )));
                    }
                    let len = read_varint(r, "raw record length")? as usize;
                    let mut line = vec![0u8; len];
                    r.read_exact(&mut line)
                        .map_err(|e| CodecError::from_read(e, "raw record content"))?;
                    validate_decoded_line(&line)?;
                    line
                } else {
                    let (tokens, wid) = decode_byte_record_after_flag(flag, r, k)?;
                    let delta = detokenize(&tokens);
                    self.resolve(&delta, wid)?
                }
            }
            RecordSource::Bit(source) => {
                if source.at_end()? {
                    return Ok(None);
                }
                if source.read_bit()? {
                    let (tokens, wid) = decode_bit_record_body(source, k)?;
                    let delta = detokenize(&tokens);
                    self.resolve(&delta, wid)?
                } else {
                    let len = read_varint_bits(source, "raw record length")? as usize;
                    let mut line = Vec::with_capacity(len);
                    for _ in 0..len {
                        line.push(source.read_bits(8)? as u8);
                    }
                    validate_decoded_line(&line)?;
                    line
                }
            }
        };

        let len = line.len();
        self.windows.cache(LogLine::from_validated(line));
        let cached = self
            .windows
            .lookup(len)
            .expect("queue exists after cache")
            .entry_at(0)
            .expect("entry just cached");
        Ok(Some(cached.as_bytes()))
    }

    fn resolve(&self, delta: &[u8], window_id: usize) -> Result<Vec<u8>> {
        let queue = self.windows.lookup(delta.len()).ok_or_else(|| {
            CodecError::CorruptRecord(format!(
                "record references length {} with no cached lines",
                delta.len()
            ))
        })?;
        let reference = queue.entry_at(window_id)?;
        Ok(restore(delta, reference.as_bytes()))
    }

    pub fn trailing_newline(&self) -> bool {
        self.header.trailing_newline
    }

    pub fn config(&self) -> CodecConfig {
        self.header.config
    }

    pub fn windows(&self) -> &LengthWindows {
        &self.windows
    }
}

fn read_byte_or_eof<R: Read>(reader: &mut R) -> Result<Option<u8>> {
    let mut byte = [0u8; 1];
    loop {
        match reader.read(&mut byte) {
            Ok(0) => return Ok(None),
            Ok(_) => return Ok(Some(byte[0])),
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(CodecError::Io(e)),
        }
    }
}

/// Decoded lines come from the wire, so invariant violations are corruption,
/// not caller errors.
fn validate_decoded_line(line: &[u8]) -> Result<()> {
    validate_line_bytes(line).map_err(|e| match e {
        CodecError::NulByteInInput(at) => {
            CodecError::CorruptRecord(format!("NUL byte in decoded line{at}"))
        }
        other => other,
    })
}

/// Compresses a whole buffer into a container.
pub fn compress_stream(raw: &[u8], config: CodecConfig) -> Result<Vec<u8>> {
    let trailing_newline = raw.last() == Some(&0x0A);
    let mut compressor = Compressor::new(
        Vec::with_capacity(HEADER_LEN + raw.len() / 4),
        config,
        trailing_newline,
    )?;
    if !raw.is_empty() {
        let mut segments = raw.split(|&b| b == 0x0A).peekable();
        while let Some(segment) = segments.next() {
            if segments.peek().is_none() && trailing_newline {
                // The split after the final LF is not a line.
                break;
            }
            compressor.write_line(segment)?;
        }
    }
    compressor.finish()
}

/// Decompresses a whole container back into the original bytes.
pub fn decompress_stream(container: &[u8]) -> Result<Vec<u8>> {
    let mut decompressor = Decompressor::new(container)?;
    let mut out = Vec::with_capacity(container.len().saturating_mul(4));
    let mut first = true;
    while let Some(line) = decompressor.next_line()? {
        if !first {
            out.push(0x0A);
        }
        out.extend_from_slice(line);
        first = false;
    }
    if decompressor.trailing_newline() {
        out.push(0x0A);
    }
    Ok(out)
}

const _: () = assert!(MAX_LINE_LEN == u32::MAX as u64);
