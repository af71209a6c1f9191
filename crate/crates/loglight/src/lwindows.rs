//! Length-keyed window cache: one bounded FIFO queue of recent lines per
//! distinct line length.
//!
//! The cache is the shared state of a compressor/decompressor pair. Both
//! sides apply identical caching rules after every line, so replaying the
//! record stream reproduces the exact cache state the encoder had.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{CodecError, Result};
use crate::line::LogLine;

/// One FIFO queue of equal-length lines. The tail is the most recent entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Queue {
    lines: VecDeque<LogLine>,
}

impl Queue {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Entry at `window_id` positions back from the tail (0 = most recent).
    pub fn entry_at(&self, window_id: usize) -> Result<&LogLine> {
        let n = self.lines.len();
        if window_id >= n {
            return Err(CodecError::CorruptRecord(format!(
                "window id {window_id} out of range for queue of {n}"
            )));
        }
        Ok(&self.lines[n - 1 - window_id])
    }

    /// Iterates from the tail (most recent) toward the head; the iteration
    /// index is the entry's window id.
    pub fn iter_from_tail(&self) -> impl Iterator<Item = &LogLine> {
        self.lines.iter().rev()
    }
}

/// Map from line length to the queue of the `k` most recent lines of that
/// length. Queues are created on first use and never dropped; line lengths in
/// practice draw from a small finite set, so retention stays bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthWindows {
    k: usize,
    queues: HashMap<usize, Queue>,
    cached_bytes: u64,
}

impl LengthWindows {
    pub fn new(k: usize) -> LengthWindows {
        assert!(k >= 1, "window size must be at least 1");
        LengthWindows {
            k,
            queues: HashMap::new(),
            cached_bytes: 0,
        }
    }

    pub fn window_size(&self) -> usize {
        self.k
    }

    /// The queue for `length`, if one was ever created. Never allocates.
    pub fn lookup(&self, length: usize) -> Option<&Queue> {
        self.queues.get(&length)
    }

    /// Appends `line` to the queue for its length, creating the queue if
    /// needed and evicting a single line from the head once the queue holds
    /// more than `k`. Applied identically on the compress and decompress
    /// paths, and to raw-emitted lines.
    pub fn cache(&mut self, line: LogLine) {
        self.cached_bytes += line.len() as u64;
        let queue = match self.queues.entry(line.len()) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(Queue::default()),
        };
        queue.lines.push_back(line);
        if queue.lines.len() > self.k {
            let evicted = queue.lines.pop_front().expect("queue not empty");
            self.cached_bytes -= evicted.len() as u64;
        }
    }

    /// Number of distinct lengths seen so far (= number of queues).
    pub fn distinct_lengths(&self) -> usize {
        self.queues.len()
    }

    /// Total bytes of line content currently cached across all queues.
    pub fn cached_bytes(&self) -> u64 {
        self.cached_bytes
    }
}
