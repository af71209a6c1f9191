//! Log lines and LF-delimited line splitting.
//!
//! A log line is the byte content between delimiters: the LF itself is never
//! part of a line, CR is ordinary content, and NUL is forbidden because it is
//! the match sentinel inside encoded records.

use crate::error::{CodecError, Result};

/// Longest encodable line. Lengths travel as 32-bit varints.
pub const MAX_LINE_LEN: u64 = u32::MAX as u64;

/// One delimiter-free log line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogLine(Vec<u8>);

impl LogLine {
    /// Validates and wraps raw bytes: no NUL, no LF, length within bounds.
    pub fn new(bytes: Vec<u8>) -> Result<LogLine> {
        validate_line_bytes(&bytes)?;
        Ok(LogLine(bytes))
    }

    /// Wraps bytes the caller has already validated.
    pub(crate) fn from_validated(bytes: Vec<u8>) -> LogLine {
        debug_assert!(validate_line_bytes(&bytes).is_ok());
        LogLine(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for LogLine {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Checks the [`LogLine`] invariants without taking ownership.
pub fn validate_line_bytes(bytes: &[u8]) -> Result<()> {
    if bytes.len() as u64 > MAX_LINE_LEN {
        return Err(CodecError::LineTooLong(bytes.len() as u64));
    }
    if let Some(pos) = find_forbidden(bytes) {
        return match bytes[pos] {
            0x00 => Err(CodecError::NulByteInInput(format!(" at offset {pos}"))),
            _ => Err(CodecError::CorruptRecord(format!(
                "LF byte inside line at offset {pos}"
            ))),
        };
    }
    Ok(())
}

/// Offset of the first NUL or LF byte, scanning eight bytes at a time.
fn find_forbidden(bytes: &[u8]) -> Option<usize> {
    const LF_PATTERN: u64 = 0x0A0A_0A0A_0A0A_0A0A;
    let mut chunks = bytes.chunks_exact(8);
    let mut base = 0usize;
    for chunk in &mut chunks {
        let word = u64::from_ne_bytes(chunk.try_into().unwrap());
        if has_zero_byte(word) || has_zero_byte(word ^ LF_PATTERN) {
            for (i, &b) in chunk.iter().enumerate() {
                if b == 0x00 || b == 0x0A {
                    return Some(base + i);
                }
            }
        }
        base += 8;
    }
    chunks
        .remainder()
        .iter()
        .position(|&b| b == 0x00 || b == 0x0A)
        .map(|i| base + i)
}

#[inline]
pub(crate) fn has_zero_byte(word: u64) -> bool {
    const LO: u64 = 0x0101_0101_0101_0101;
    const HI: u64 = 0x8080_8080_8080_8080;
    word.wrapping_sub(LO) & !word & HI != 0
}

/// Splits a buffer into maximal LF-delimited lines.
///
/// Returns the lines (LF stripped) and whether the buffer ended with LF, so
/// that [`join_lines`] can reproduce the input byte-for-byte.
pub fn split_lines(raw: &[u8]) -> Result<(Vec<LogLine>, bool)> {
    let mut lines = Vec::new();
    let mut rest = raw;
    let mut trailing_newline = false;
    while !rest.is_empty() {
        match rest.iter().position(|&b| b == 0x0A) {
            Some(pos) => {
                lines.push(LogLine::new(rest[..pos].to_vec())?);
                rest = &rest[pos + 1..];
                trailing_newline = rest.is_empty();
            }
            None => {
                lines.push(LogLine::new(rest.to_vec())?);
                rest = &[];
            }
        }
    }
    Ok((lines, trailing_newline))
}

/// Inverse of [`split_lines`]: LF between lines, plus a final LF if flagged.
pub fn join_lines<L: AsRef<[u8]>>(lines: &[L], trailing_newline: bool) -> Vec<u8> {
    let total: usize = lines.iter().map(|l| l.as_ref().len() + 1).sum();
    let mut out = Vec::with_capacity(total);
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            out.push(0x0A);
        }
        out.extend_from_slice(line.as_ref());
    }
    if trailing_newline {
        out.push(0x0A);
    }
    out
}
