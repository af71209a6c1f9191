//! MSB-first bit sink/source over byte streams, plus LEB128 varints.

use std::io::{Read, Write};

use crate::error::{CodecError, Result};

/// Accumulates bits MSB-first and flushes whole bytes to the inner writer.
pub struct BitSink<W: Write> {
    out: W,
    cur: u8,
    used: u8,
}

impl<W: Write> BitSink<W> {
    pub fn new(out: W) -> Self {
        BitSink { out, cur: 0, used: 0 }
    }

    pub fn write_bit(&mut self, bit: bool) -> std::io::Result<()> {
        if bit {
            self.cur |= 1 << (7 - self.used);
        }
        self.used += 1;
        if self.used == 8 {
            self.out.write_all(&[self.cur])?;
            self.cur = 0;
            self.used = 0;
        }
        Ok(())
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, n: u32) -> std::io::Result<()> {
        debug_assert!(n <= 64);
        for shift in (0..n).rev() {
            self.write_bit(value >> shift & 1 == 1)?;
        }
        Ok(())
    }

    /// Zero-pads the current byte (if partially filled) and returns the
    /// inner writer. Padding is at most seven bits.
    pub fn finish(mut self) -> std::io::Result<W> {
        if self.used > 0 {
            self.out.write_all(&[self.cur])?;
        }
        Ok(self.out)
    }
}

/// Reads bits MSB-first. Keeps one byte of lookahead so that a record
/// boundary can distinguish "next record follows" from "only padding left".
pub struct BitSource<R: Read> {
    inner: R,
    cur: u8,
    left: u8,
    lookahead: Option<u8>,
    hit_eof: bool,
}

impl<R: Read> BitSource<R> {
    pub fn new(inner: R) -> Self {
        BitSource {
            inner,
            cur: 0,
            left: 0,
            lookahead: None,
            hit_eof: false,
        }
    }

    fn fill_lookahead(&mut self) -> Result<()> {
        if self.lookahead.is_some() || self.hit_eof {
            return Ok(());
        }
        let mut byte = [0u8; 1];
        loop {
            match self.inner.read(&mut byte) {
                Ok(0) => {
                    self.hit_eof = true;
                    return Ok(());
                }
                Ok(_) => {
                    self.lookahead = Some(byte[0]);
                    return Ok(());
                }
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(CodecError::Io(e)),
            }
        }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.left == 0 {
            self.fill_lookahead()?;
            match self.lookahead.take() {
                Some(b) => {
                    self.cur = b;
                    self.left = 8;
                }
                None => {
                    return Err(CodecError::TruncatedStream(
                        "bit stream ended inside a record".into(),
                    ))
                }
            }
        }
        self.left -= 1;
        Ok(self.cur >> self.left & 1 == 1)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut v = 0u64;
        for _ in 0..n {
            v = v << 1 | self.read_bit()? as u64;
        }
        Ok(v)
    }

    /// Call only at a record boundary. Returns true when the stream is
    /// exhausted (at most seven zero padding bits remain). Nonzero padding
    /// is corruption.
    pub fn at_end(&mut self) -> Result<bool> {
        self.fill_lookahead()?;
        if self.lookahead.is_some() {
            return Ok(false);
        }
        if self.left == 0 {
            return Ok(true);
        }
        let mask = (1u16 << self.left) - 1;
        if self.cur as u16 & mask != 0 {
            return Err(CodecError::CorruptRecord(
                "nonzero padding bits at end of stream".into(),
            ));
        }
        self.left = 0;
        Ok(true)
    }
}

/// Encoded byte length of `value` as an unsigned LEB128 varint.
pub(crate) fn varint_len(value: u32) -> usize {
    match value {
        0..=0x7F => 1,
        0x80..=0x3FFF => 2,
        0x4000..=0x1F_FFFF => 3,
        0x20_0000..=0xFFF_FFFF => 4,
        _ => 5,
    }
}

pub(crate) fn push_varint(buf: &mut Vec<u8>, mut value: u32) {
    loop {
        let byte = (value & 0x7F) as u8;
        value >>= 7;
        if value == 0 {
            buf.push(byte);
            return;
        }
        buf.push(byte | 0x80);
    }
}

pub(crate) fn read_varint<R: Read>(reader: &mut R, what: &str) -> Result<u32> {
    let mut value: u64 = 0;
    for i in 0..5 {
        let mut byte = [0u8; 1];
        reader
            .read_exact(&mut byte)
            .map_err(|e| CodecError::from_read(e, what))?;
        value |= ((byte[0] & 0x7F) as u64) << (7 * i);
        if byte[0] & 0x80 == 0 {
            if value > u32::MAX as u64 {
                return Err(CodecError::CorruptRecord(format!("varint overflow in {what}")));
            }
            return Ok(value as u32);
        }
    }
    Err(CodecError::CorruptRecord(format!("varint too long in {what}")))
}

/// Varint written through a bit sink as a sequence of 8-bit groups.
pub(crate) fn write_varint_bits<W: Write>(sink: &mut BitSink<W>, mut value: u32) -> std::io::Result<()> {
    loop {
        let byte = (value & 0x7F) as u8;
        value >>= 7;
        if value == 0 {
            return sink.write_bits(byte as u64, 8);
        }
        sink.write_bits((byte | 0x80) as u64, 8)?;
    }
}

pub(crate) fn read_varint_bits<R: Read>(source: &mut BitSource<R>, what: &str) -> Result<u32> {
    let mut value: u64 = 0;
    for i in 0..5 {
        let byte = source.read_bits(8)? as u8;
        value |= ((byte & 0x7F) as u64) << (7 * i);
        if byte & 0x80 == 0 {
            if value > u32::MAX as u64 {
                return Err(CodecError::CorruptRecord(format!("varint overflow in {what}")));
            }
            return Ok(value as u32);
        }
    }
    Err(CodecError::CorruptRecord(format!("varint too long in {what}")))
}
