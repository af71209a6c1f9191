//! Byte-wise similarity scoring, reverse-order reference search, and the
//! preserved-character delta.
//!
//! XOR of equal bytes is zero, so counting zero bytes in the XOR of two
//! equal-length lines yields their positional similarity. The delta we store
//! keeps NUL where the line matches its reference and the line's own original
//! byte where it differs; undoing it needs no XOR at all, only substitution.

use crate::line::LogLine;
use crate::lwindows::Queue;

/// Preserved-character delta against a cached reference line.
#[derive(Debug, Clone, PartialEq)]
pub struct XorpOutput {
    /// Same length as the input: NUL where input and reference agree, the
    /// input's original byte where they differ.
    pub bytes: Vec<u8>,
    /// Tail offset of the chosen reference inside its length queue.
    pub window_id: usize,
    /// Fraction of matching positions, in [0, 1].
    pub score: f64,
}

/// Positional similarity of two equal-length byte strings: the fraction of
/// indices holding identical bytes. Defined as 1.0 for empty input.
///
/// Callers must pass equal-length slices.
pub fn similarity(a: &[u8], b: &[u8]) -> f64 {
    debug_assert_eq!(a.len(), b.len(), "similarity requires equal lengths");
    if a.is_empty() {
        return 1.0;
    }
    equal_bytes(a, b) as f64 / a.len() as f64
}

/// Count of positions where `a` and `b` hold the same byte, eight bytes at a
/// time: XOR the words and count zero bytes in the result.
pub(crate) fn equal_bytes(a: &[u8], b: &[u8]) -> usize {
    let mut eq = 0usize;
    let mut ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    for (wa, wb) in (&mut ca).zip(cb) {
        let x = u64::from_ne_bytes(wa.try_into().unwrap())
            ^ u64::from_ne_bytes(wb.try_into().unwrap());
        eq += zero_byte_count(x);
    }
    let tail = ca.remainder();
    let b_tail = &b[a.len() - tail.len()..];
    for (pa, pb) in tail.iter().zip(b_tail) {
        if pa == pb {
            eq += 1;
        }
    }
    eq
}

/// Exact per-byte zero indicator. The usual `(x - LO) & !x & HI` detector
/// overcounts when borrows ripple across byte lanes, so the carry-free form
/// is used: the masked add can carry into bit 7 of each byte but never out.
#[inline]
fn zero_byte_count(word: u64) -> usize {
    const LO7: u64 = 0x7F7F_7F7F_7F7F_7F7F;
    let nonzero = ((word & LO7) + LO7) | word | LO7;
    (!nonzero).count_ones() as usize
}

/// Scans `queue` from the tail (window id 0) toward the head and picks a
/// reference for `line`.
///
/// The first entry scoring at least `theta` wins; if none reaches the
/// threshold, the highest-scoring entry wins, ties going to the smaller
/// window id. Returns `None` only for an empty queue.
pub fn find_similar(queue: &Queue, line: &[u8], theta: f64) -> Option<XorpOutput> {
    let mut best: Option<(usize, usize)> = None; // (equal byte count, window_id)
    for (window_id, candidate) in queue.iter_from_tail().enumerate() {
        debug_assert_eq!(candidate.len(), line.len());
        if line.is_empty() {
            return Some(preserve(line, candidate.as_bytes(), window_id));
        }
        let eq = equal_bytes(line, candidate.as_bytes());
        if eq as f64 / line.len() as f64 >= theta {
            return Some(preserve(line, candidate.as_bytes(), window_id));
        }
        if best.is_none_or(|(best_eq, _)| eq > best_eq) {
            best = Some((eq, window_id));
        }
    }
    let (_, window_id) = best?;
    let reference = queue
        .entry_at(window_id)
        .expect("window id from scan is in range");
    Some(preserve(line, reference.as_bytes(), window_id))
}

/// Builds the preserved-character delta of `line` against `reference`.
pub fn preserve(line: &[u8], reference: &[u8], window_id: usize) -> XorpOutput {
    debug_assert_eq!(line.len(), reference.len());
    let mut bytes = Vec::with_capacity(line.len());
    let mut matches = 0usize;
    for (&a, &r) in line.iter().zip(reference) {
        if a == r {
            bytes.push(0x00);
            matches += 1;
        } else {
            bytes.push(a);
        }
    }
    let score = if line.is_empty() {
        1.0
    } else {
        matches as f64 / line.len() as f64
    };
    XorpOutput {
        bytes,
        window_id,
        score,
    }
}

/// Undoes [`preserve`]: NUL positions take the reference byte, every other
/// position keeps the stored original byte. Pure substitution, no XOR.
pub fn restore(xorp: &[u8], reference: &[u8]) -> Vec<u8> {
    debug_assert_eq!(xorp.len(), reference.len());
    xorp.iter()
        .zip(reference)
        .map(|(&d, &r)| if d == 0x00 { r } else { d })
        .collect()
}

/// Convenience over [`LogLine`] pairs.
pub fn similarity_lines(a: &LogLine, b: &LogLine) -> f64 {
    similarity(a.as_bytes(), b.as_bytes())
}
