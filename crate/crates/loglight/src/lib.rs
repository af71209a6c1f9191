//! Streaming, lossless, plug-and-play log compression.
//!
//! Log lines produced by the same statement share a pattern, differ only in
//! a few variable positions, and very often have exactly the same length.
//! This library exploits that: lines are grouped by length in a bounded FIFO
//! cache, each incoming line is matched against the most recent cached lines
//! of its length, the match is reduced to a delta that keeps only the
//! differing original characters, and the delta is run-length encoded into
//! either a bit-aligned or a byte-aligned record.
//!
//! Compression is line-by-line and needs no rules, dictionaries, sampling,
//! or training: state is just the window cache, rebuilt identically by the
//! decoder as it replays records. Lines whose length was never seen before
//! (or that would not shrink) are stored raw and still enter the cache, so
//! the stream adapts to new log shapes as they appear.
//!
//! The wire format is specified in FORMAT.md at the repository root.
//!
//! ```
//! use loglight::{compress_stream, decompress_stream, CodecConfig};
//!
//! let raw = b"svc=auth login ok user=1041\nsvc=auth login ok user=2276\n";
//! let container = compress_stream(raw, CodecConfig::default()).unwrap();
//! assert_eq!(decompress_stream(&container).unwrap(), raw);
//! ```

pub mod bench;
pub mod bits;
pub mod config;
pub mod error;
pub mod line;
pub mod lwindows;
pub mod metrics;
pub mod rle;
pub mod stream;
pub mod xorp;

pub use config::{CodecConfig, Variant};
pub use error::{CodecError, Result};
pub use line::{join_lines, split_lines, LogLine};
pub use lwindows::LengthWindows;
pub use stream::{compress_stream, decompress_stream, Compressor, Decompressor};
