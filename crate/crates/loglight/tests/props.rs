//! Property tests for the codec invariants.

mod common;

use loglight::bits::{BitSink, BitSource};
use loglight::rle::{
    decode_bit_record, decode_byte_record, detokenize, encode_bit_record, encode_byte_record,
    tokenize, RleToken,
};
use loglight::xorp::{preserve, restore, similarity};
use loglight::{compress_stream, decompress_stream, CodecConfig, Variant};
use proptest::prelude::*;

/// Bytes a log line may contain.
fn line_bytes(max: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(
        prop::num::u8::ANY.prop_filter("no NUL or LF", |&b| b != 0x00 && b != 0x0A),
        0..max,
    )
}

/// Two equal-length lines with correlated content so matches actually occur.
fn line_pair() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (line_bytes(300), prop::collection::vec(prop::bool::ANY, 300)).prop_map(|(a, flips)| {
        let b: Vec<u8> = a
            .iter()
            .zip(flips)
            .map(|(&byte, flip)| {
                if flip {
                    if byte == 0xFF { 0x01 } else { byte + 1 }
                } else {
                    byte
                }
            })
            .map(|b| if b == 0x0A { 0x0B } else { b })
            .collect();
        (a, b)
    })
}

/// Delta-shaped buffers: NUL runs mixed with non-NUL literals.
fn delta_bytes() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(
        prop_oneof![
            3 => Just(0u8),
            1 => prop::num::u8::ANY.prop_filter("literal", |&b| b != 0x00 && b != 0x0A),
        ],
        0..700,
    )
}

proptest! {
    #[test]
    fn similarity_matches_indicator_definition((a, b) in line_pair()) {
        prop_assert_eq!(similarity(&a, &b), common::naive::similarity(&a, &b));
    }

    #[test]
    fn preserve_restore_round_trip((a, b) in line_pair()) {
        let out = preserve(&a, &b, 0);
        prop_assert_eq!(out.bytes.len(), a.len());
        for (i, &d) in out.bytes.iter().enumerate() {
            prop_assert_eq!(d == 0x00, a[i] == b[i]);
            if d != 0x00 {
                prop_assert_eq!(d, a[i]);
            }
        }
        // Score soundness: the score is exactly the match-count ratio, and
        // the match count is the complement of the preserved-byte count.
        let non_nul = out.bytes.iter().filter(|&&d| d != 0).count();
        if !a.is_empty() {
            prop_assert_eq!(out.score, (a.len() - non_nul) as f64 / a.len() as f64);
        }
        prop_assert_eq!(restore(&out.bytes, &b), a);
    }

    #[test]
    fn tokenize_detokenize_round_trip(delta in delta_bytes()) {
        let tokens = tokenize(&delta);
        for token in &tokens {
            match *token {
                RleToken::Run(c) => prop_assert!(c >= 1),
                RleToken::Literal(b) => prop_assert!(b != 0x00),
            }
        }
        prop_assert_eq!(detokenize(&tokens), delta);
    }

    #[test]
    fn byte_record_round_trip(
        delta in delta_bytes(),
        k_pick in 0usize..5,
        wid_seed in prop::num::usize::ANY,
    ) {
        let k = [1usize, 2, 8, 32, 256][k_pick];
        let tokens = tokenize(&delta);
        prop_assume!(!tokens.is_empty());
        let window_id = wid_seed % k;
        let mut out = Vec::new();
        encode_byte_record(&tokens, window_id, k, &mut out);
        prop_assert_eq!(out.len(), loglight::rle::byte_record_len(tokens.len(), k));
        let (decoded, wid, consumed) = decode_byte_record(&out, k).unwrap();
        prop_assert_eq!(decoded, tokens);
        prop_assert_eq!(wid, window_id);
        prop_assert_eq!(consumed, out.len());
    }

    #[test]
    fn bit_record_round_trip(
        delta in delta_bytes(),
        k_pick in 0usize..5,
        wid_seed in prop::num::usize::ANY,
    ) {
        let k = [1usize, 2, 8, 32, 256][k_pick];
        let tokens = tokenize(&delta);
        prop_assume!(!tokens.is_empty());
        let window_id = wid_seed % k;
        let mut sink = BitSink::new(Vec::new());
        encode_bit_record(&tokens, window_id, k, &mut sink).unwrap();
        let bytes = sink.finish().unwrap();
        let mut source = BitSource::new(&bytes[..]);
        let (decoded, wid) = decode_bit_record(&mut source, k).unwrap();
        prop_assert_eq!(decoded, tokens);
        prop_assert_eq!(wid, window_id);
    }

    #[test]
    fn container_round_trip(
        lines in proptest::collection::vec(line_bytes(120), 0..24),
        trailing in prop::bool::ANY,
        k_pick in 0usize..5,
        variant in prop::bool::ANY,
    ) {
        let trailing = trailing && !lines.is_empty();
        let raw = common::join(&lines, trailing);
        let variant = if variant { Variant::Bit } else { Variant::Byte };
        let config = CodecConfig::new([1, 2, 8, 32, 256][k_pick], 0.85, variant).unwrap();
        let container = compress_stream(&raw, config).unwrap();
        prop_assert_eq!(decompress_stream(&container).unwrap(), raw);
    }

    #[test]
    fn psl_monotone_in_window_size(
        lines in proptest::collection::vec(line_bytes(12), 1..40),
    ) {
        let log_lines: Vec<loglight::LogLine> = lines
            .iter()
            .map(|l| loglight::LogLine::new(l.clone()).unwrap())
            .collect();
        let mut prev = 0.0;
        for k in [2usize, 4, 8, 16, 32] {
            let value = loglight::metrics::psl(&log_lines, k, 0.85).unwrap();
            prop_assert!(value >= prev);
            prev = value;
        }
    }
}
