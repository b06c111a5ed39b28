//! Property tests: randomized invariants that must hold for every input,
//! checked against brute-force reference implementations.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use nlab::blocks::{census, count_overlapping, frequency_report, CensusScope};
use nlab::digits::{digits_of, stream_digits, value_of, Block, SeqKind, StreamSpec};
use nlab::primes::{build_tables, PrimeTables};
use nlab::svfun::{parse_rational, SvFunction, SvParams};

fn tables() -> &'static Arc<PrimeTables> {
    static TABLES: OnceLock<Arc<PrimeTables>> = OnceLock::new();
    TABLES.get_or_init(|| Arc::new(build_tables(10_000).expect("test sieve builds")))
}

fn kind_strategy() -> impl Strategy<Value = SeqKind> {
    prop::sample::select(vec![
        SeqKind::Natural,
        SeqKind::Square,
        SeqKind::FloorSqrt,
        SeqKind::Primes,
        SeqKind::PrimeCount,
    ])
}

fn spec_strategy() -> impl Strategy<Value = (SeqKind, u32, u64, u64)> {
    (kind_strategy(), 2u32..=36, 0u64..2, 1u64..120).prop_map(|(kind, base, start, entries)| {
        let start = if kind == SeqKind::Primes { 1 } else { start };
        (kind, base, start, entries)
    })
}

fn hay_and_needle() -> impl Strategy<Value = (u32, Vec<u8>, Vec<u8>)> {
    (2u32..=36).prop_flat_map(|base| {
        let digit = 0..base as u8;
        (
            Just(base),
            prop::collection::vec(digit.clone(), 0..200),
            prop::collection::vec(digit, 1..5),
        )
    })
}

fn naive_count(hay: &[u8], needle: &[u8]) -> u64 {
    if hay.len() < needle.len() {
        return 0;
    }
    hay.windows(needle.len()).filter(|w| *w == needle).count() as u64
}

proptest! {
    /// The stream is exactly the concatenation of each entry's expansion.
    #[test]
    fn stream_concatenates_entry_expansions((kind, base, start, entries) in spec_strategy()) {
        let t = tables();
        let spec = StreamSpec::new(kind, base, start).unwrap().with_entries(entries);
        let mut expected = Vec::new();
        for i in 0..entries {
            let v = value_of(kind, start + i, t).unwrap();
            expected.extend_from_slice(digits_of(v, base).unwrap().digits());
        }
        let got: Vec<u8> = stream_digits(&spec, t)
            .collect::<Result<_, _>>()
            .unwrap();
        prop_assert_eq!(got, expected);
    }

    /// Overlap counting agrees with a plain window rescan.
    #[test]
    fn overlap_count_matches_rescan((base, hay, needle) in hay_and_needle()) {
        let expected = naive_count(&hay, &needle);
        let got = count_overlapping(
            &Block::new(base, hay).unwrap(),
            &Block::new(base, needle).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(got, expected);
    }

    /// A census counts exactly the sliding windows of the scanned stream.
    #[test]
    fn census_total_is_the_window_count(
        (kind, base, start, entries) in spec_strategy(),
        order in 1u32..4,
    ) {
        let t = tables();
        let spec = StreamSpec::new(kind, base, start).unwrap();
        let c = census(&spec, order, CensusScope::Entries(entries), t).unwrap();
        let expected = c.n_digits().saturating_sub(u64::from(order) - 1);
        prop_assert_eq!(c.total(), expected);
        prop_assert_eq!(c.window_count(), expected);
    }

    /// Frequency reports are internally consistent.
    #[test]
    fn frequency_report_is_consistent(
        (kind, base, start, entries) in spec_strategy(),
        order in 1u32..3,
    ) {
        let t = tables();
        let spec = StreamSpec::new(kind, base, start).unwrap();
        let c = census(&spec, order, CensusScope::Entries(entries), t).unwrap();
        prop_assume!(c.window_count() > 0);
        let report = frequency_report(&c).unwrap();
        let total: u64 = report.rows.iter().map(|r| r.count).sum();
        prop_assert_eq!(total, report.denominator);
        for row in &report.rows {
            prop_assert!(row.frequency >= 0.0 && row.frequency <= 1.0);
            prop_assert!((row.frequency - row.count as f64 / report.denominator as f64).abs() < 1e-15);
        }
        prop_assert!(report.max_deviation >= 0.0 && report.max_deviation <= 1.0);
    }

    /// ASCII rendering of a block parses back to the same digits.
    #[test]
    fn block_ascii_round_trips((base, digits, _) in hay_and_needle()) {
        let block = Block::new(base, digits).unwrap();
        let reparsed = Block::parse(&block.to_ascii(), base).unwrap();
        prop_assert_eq!(reparsed.digits(), block.digits());
    }

    /// Fraction strings parse to the exact rational.
    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let parsed = parse_rational(&format!("{n}/{d}")).unwrap();
        prop_assert_eq!(parsed, BigRational::new(BigInt::from(n), BigInt::from(d)));
    }

    /// The floor of the interpolant is the prime-counting function,
    /// at arbitrary rational points across the sieved range.
    #[test]
    fn interpolant_floor_is_the_prime_count(num in 0u64..1_000_000, den in 1u64..100) {
        let t = tables();
        let f = SvFunction::new(Arc::clone(t), SvParams::default());
        // Keep x within the sieve: reduce the numerator modulo 9000*den.
        let num = num % (9_000 * den);
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let fx = f.f_eval(&x).unwrap();
        let x_floor = x.floor().to_integer().to_u64().unwrap();
        let expected = t.pi(x_floor.max(0)).unwrap();
        prop_assert_eq!(fx.floor().to_integer().to_u64().unwrap(), expected);
    }
}
