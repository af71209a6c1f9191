//! Run-length tokenization of preserved-character deltas and the two record
//! serializations: a bit-aligned stream and a byte-aligned stream.
//!
//! Both serializations are normative and bit-exact; see FORMAT.md at the
//! repository root for the full layout and a golden vector.

use std::io::{Read, Write};

use crate::bits::{push_varint, read_varint, varint_len, BitSink, BitSource};
use crate::error::{CodecError, Result};

/// One encoded unit of a delta: a run of NULs or a preserved original byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RleToken {
    /// 1..=255 consecutive NUL bytes. Longer runs are chunked.
    Run(u8),
    /// A preserved original byte; never NUL (and never LF, since log lines
    /// cannot contain the delimiter).
    Literal(u8),
}

/// Width in bits of the window id field, fixed per stream by `k`.
pub fn window_id_bits(k: usize) -> u32 {
    debug_assert!(k >= 1);
    if k <= 2 {
        1
    } else {
        (k - 1).ilog2() + 1
    }
}

/// Greedy left-to-right tokenization: maximal NUL runs become `Run` tokens
/// (chunked at 255), every other byte becomes a `Literal`.
pub fn tokenize(xorp: &[u8]) -> Vec<RleToken> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < xorp.len() {
        if xorp[i] == 0 {
            let start = i;
            while i < xorp.len() && xorp[i] == 0 {
                i += 1;
            }
            let mut run = i - start;
            while run >= 255 {
                tokens.push(RleToken::Run(255));
                run -= 255;
            }
            if run > 0 {
                tokens.push(RleToken::Run(run as u8));
            }
        } else {
            tokens.push(RleToken::Literal(xorp[i]));
            i += 1;
        }
    }
    tokens
}

/// Exact inverse of [`tokenize`] at the byte level.
pub fn detokenize(tokens: &[RleToken]) -> Vec<u8> {
    let mut out = Vec::with_capacity(decoded_len(tokens));
    for token in tokens {
        match *token {
            RleToken::Run(count) => out.resize(out.len() + count as usize, 0),
            RleToken::Literal(byte) => out.push(byte),
        }
    }
    out
}

/// Length of the delta a token sequence decodes to (= original line length).
pub fn decoded_len(tokens: &[RleToken]) -> usize {
    tokens
        .iter()
        .map(|t| match *t {
            RleToken::Run(count) => count as usize,
            RleToken::Literal(_) => 1,
        })
        .sum()
}

/// Size in bytes of a byte-variant record holding `token_count` tokens.
pub fn byte_record_len(token_count: usize, k: usize) -> usize {
    let header_bytes = (4 + window_id_bits(k) as usize).div_ceil(8);
    let q = token_count.div_ceil(8);
    header_bytes + varint_len(q as u32) + q + token_count
}

/// Size in bits of a bit-variant record holding `token_count` tokens,
/// including the end-of-record sentinel.
pub fn bit_record_len_bits(token_count: usize, k: usize) -> u64 {
    1 + window_id_bits(k) as u64 + 9 * (token_count as u64 + 1)
}

/// Serializes one byte-aligned record.
///
/// Layout, MSB-first: flag bit 1, window id (`window_id_bits(k)` bits), three
/// bits holding `token_count mod 8` (0 meaning 8), zero padding to the byte
/// boundary; then a varint with the instruction byte count q; then q
/// instruction bytes (bit per token, 0 = run, 1 = literal, final byte padded
/// low with zeros); then one data byte per token (run count or literal byte).
pub fn encode_byte_record(tokens: &[RleToken], window_id: usize, k: usize, out: &mut Vec<u8>) {
    let m = tokens.len();
    assert!(m >= 1, "a record encodes at least one token");
    assert!(window_id < k, "window id must be below k");
    let w = window_id_bits(k) as usize;
    let header_bits = 4 + w;
    let header_bytes = header_bits.div_ceil(8);
    let len_last_bit = (m % 8) as u32;
    let q = m.div_ceil(8);

    let mut header: u32 = 1;
    header = header << w | window_id as u32;
    header = header << 3 | len_last_bit;
    header <<= header_bytes * 8 - header_bits;
    out.extend_from_slice(&header.to_be_bytes()[4 - header_bytes..]);

    push_varint(out, q as u32);

    let mut cur = 0u8;
    for (i, token) in tokens.iter().enumerate() {
        if matches!(token, RleToken::Literal(_)) {
            cur |= 1 << (7 - i % 8);
        }
        if i % 8 == 7 {
            out.push(cur);
            cur = 0;
        }
    }
    if !m.is_multiple_of(8) {
        out.push(cur);
    }

    for token in tokens {
        out.push(match *token {
            RleToken::Run(count) => count,
            RleToken::Literal(byte) => byte,
        });
    }
}

/// Decodes one byte-aligned record from the start of `bytes`.
///
/// Returns the tokens, the window id, and the number of bytes consumed.
pub fn decode_byte_record(bytes: &[u8], k: usize) -> Result<(Vec<RleToken>, usize, usize)> {
    let mut cursor = std::io::Cursor::new(bytes);
    let mut first = [0u8; 1];
    cursor
        .read_exact(&mut first)
        .map_err(|e| CodecError::from_read(e, "record flag byte"))?;
    if first[0] & 0x80 == 0 {
        return Err(CodecError::CorruptRecord(
            "record flag bit is 0, not a run-length record".into(),
        ));
    }
    let (tokens, window_id) = decode_byte_record_after_flag(first[0], &mut cursor, k)?;
    Ok((tokens, window_id, cursor.position() as usize))
}

/// Byte-record decode given the already-consumed first byte. The flag bit of
/// `first` must be 1.
pub(crate) fn decode_byte_record_after_flag<R: Read>(
    first: u8,
    src: &mut R,
    k: usize,
) -> Result<(Vec<RleToken>, usize)> {
    let w = window_id_bits(k) as usize;
    let header_bits = 4 + w;
    let header_bytes = header_bits.div_ceil(8);

    let mut header = first as u32;
    for _ in 1..header_bytes {
        let mut byte = [0u8; 1];
        src.read_exact(&mut byte)
            .map_err(|e| CodecError::from_read(e, "record header"))?;
        header = header << 8 | byte[0] as u32;
    }
    let pad = header_bytes * 8 - header_bits;
    if pad > 0 && header & ((1 << pad) - 1) != 0 {
        return Err(CodecError::CorruptRecord("nonzero header padding bits".into()));
    }
    let fields = header >> pad;
    let window_id = (fields >> 3 & ((1 << w) - 1)) as usize;
    let len_last_bit = (fields & 7) as usize;

    let q = read_varint(src, "instruction byte count")? as usize;
    if q == 0 {
        return Err(CodecError::CorruptRecord(
            "run-length record with zero instruction bytes".into(),
        ));
    }
    let m = 8 * (q - 1) + if len_last_bit == 0 { 8 } else { len_last_bit };

    let mut instructions = vec![0u8; q];
    src.read_exact(&mut instructions)
        .map_err(|e| CodecError::from_read(e, "instruction bytes"))?;
    let meaningful_last = if len_last_bit == 0 { 8 } else { len_last_bit };
    if meaningful_last < 8 {
        let mask = (1u8 << (8 - meaningful_last)) - 1;
        if instructions[q - 1] & mask != 0 {
            return Err(CodecError::CorruptRecord(
                "nonzero padding in final instruction byte".into(),
            ));
        }
    }

    let mut data = vec![0u8; m];
    src.read_exact(&mut data)
        .map_err(|e| CodecError::from_read(e, "record data bytes"))?;

    let mut tokens = Vec::with_capacity(m);
    for (i, &byte) in data.iter().enumerate() {
        let literal = instructions[i / 8] >> (7 - i % 8) & 1 == 1;
        tokens.push(token_from_wire(literal, byte)?);
    }
    Ok((tokens, window_id))
}

/// Serializes one bit-aligned record: flag bit 1, window id, then per token
/// an indicator bit (0 = run, 1 = literal) followed by eight payload bits.
/// A run with payload zero-never a real token-terminates the record.
pub fn encode_bit_record<W: Write>(
    tokens: &[RleToken],
    window_id: usize,
    k: usize,
    sink: &mut BitSink<W>,
) -> std::io::Result<()> {
    assert!(!tokens.is_empty(), "a record encodes at least one token");
    assert!(window_id < k, "window id must be below k");
    sink.write_bit(true)?;
    sink.write_bits(window_id as u64, window_id_bits(k))?;
    for token in tokens {
        match *token {
            RleToken::Run(count) => {
                sink.write_bit(false)?;
                sink.write_bits(count as u64, 8)?;
            }
            RleToken::Literal(byte) => {
                sink.write_bit(true)?;
                sink.write_bits(byte as u64, 8)?;
            }
        }
    }
    sink.write_bit(false)?;
    sink.write_bits(0, 8)
}

/// Decodes one bit-aligned record, consuming its leading flag bit.
pub fn decode_bit_record<R: Read>(
    source: &mut BitSource<R>,
    k: usize,
) -> Result<(Vec<RleToken>, usize)> {
    if !source.read_bit()? {
        return Err(CodecError::CorruptRecord(
            "record flag bit is 0, not a run-length record".into(),
        ));
    }
    decode_bit_record_body(source, k)
}

/// Bit-record decode positioned just past the flag bit.
pub(crate) fn decode_bit_record_body<R: Read>(
    source: &mut BitSource<R>,
    k: usize,
) -> Result<(Vec<RleToken>, usize)> {
    let window_id = source.read_bits(window_id_bits(k))? as usize;
    let mut tokens = Vec::new();
    loop {
        let literal = source.read_bit()?;
        let payload = source.read_bits(8)? as u8;
        if !literal && payload == 0 {
            break;
        }
        tokens.push(token_from_wire(literal, payload)?);
    }
    if tokens.is_empty() {
        return Err(CodecError::CorruptRecord("record with no tokens".into()));
    }
    Ok((tokens, window_id))
}

fn token_from_wire(literal: bool, byte: u8) -> Result<RleToken> {
    if literal {
        match byte {
            0x00 => Err(CodecError::CorruptRecord("NUL literal in record".into())),
            0x0A => Err(CodecError::CorruptRecord("LF literal in record".into())),
            _ => Ok(RleToken::Literal(byte)),
        }
    } else if byte == 0 {
        Err(CodecError::CorruptRecord("zero-length run in record".into()))
    } else {
        Ok(RleToken::Run(byte))
    }
}
