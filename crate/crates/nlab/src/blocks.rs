//! Overlapping block censuses over digit streams.
//!
//! A length-k block occurrence is counted at every window position,
//! including overlapping ones: `131` occurs 4 times in
//! `713131051310131`. A census over n digits therefore has exactly
//! `n - k + 1` windows, which is the denominator of every reported
//! frequency.
//!
//! Counting rolls a base-g window index (`r <- (r mod g^(k-1)) * g + d`)
//! over the stream, storing counts in a dense vector when `g^k` is small
//! and a hash map otherwise. The census can be sharded: each shard owns
//! the windows that *start* in its digit range and reads `k - 1` digits
//! past its end, so the merged result equals the sequential one exactly.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{digit_len, stream_digits, value_of, Block, DigitStream, StreamSpec};
use crate::error::{NlabError, Result};
use crate::primes::PrimeTables;

/// Largest `g^k` stored as a dense count vector.
const DENSE_LIMIT: u64 = 10_000_000;

/// Reports list every block, present or not, up to this many; beyond it only
/// blocks that actually occur get a row.
const REPORT_ALL_LIMIT: u64 = 4_096;

/// How much of a stream a census consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusScope {
    /// Exactly this many digits (the stream must supply them).
    Digits(u64),
    /// All digits of this many entries.
    Entries(u64),
}

#[derive(Debug, Clone, PartialEq)]
enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<Vec<u8>, u64>),
}

/// Occurrence counts of every length-k block over a digit stretch.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCensus {
    base: u32,
    order: u32,
    n_digits: u64,
    counts: Counts,
}

/// One row of a frequency report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub block: String,
    pub count: u64,
    pub frequency: f64,
}

/// Block frequencies with their common denominator and the deviation from
/// the uniform reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub base: u32,
    pub order: u32,
    /// Digits scanned (for leading-digit reports: entries scanned).
    pub n_digits: u64,
    /// Window count `n_digits - order + 1` (leading-digit reports: entries
    /// with a nonzero value); every `frequency` is `count / denominator`.
    pub denominator: u64,
    /// Uniform reference frequency: `g^-k`, or `1/(g-1)` for leading digits.
    pub reference: f64,
    pub rows: Vec<FrequencyRow>,
    /// `max |frequency - reference|`, counting blocks without a row as
    /// frequency zero.
    pub max_deviation: f64,
}

impl BlockCensus {
    /// Assemble a census from explicit per-block counts.
    pub fn from_counts<I>(base: u32, order: u32, n_digits: u64, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, u64)>,
    {
        let mut census = BlockCensus::empty(base, order)?;
        census.n_digits = n_digits;
        for (digits, count) in counts {
            let block = Block::new(base, digits)?;
            if block.len() != order as usize {
                return Err(NlabError::usage(format!(
                    "block {:?} does not have length {order}",
                    block.to_ascii()
                )));
            }
            match &mut census.counts {
                Counts::Dense(v) => v[block_index(block.digits(), base) as usize] += count,
                Counts::Sparse(m) => *m.entry(block.digits().to_vec()).or_insert(0) += count,
            }
        }
        Ok(census)
    }

    fn empty(base: u32, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(NlabError::usage("block order must be at least 1"));
        }
        // Construction through Block::new would reject the base anyway, but
        // fail fast and uniformly here.
        if !(2..=36).contains(&base) {
            return Err(NlabError::usage(format!("base {base} not in 2..=36")));
        }
        let counts = match block_space(base, order) {
            Some(total) if total <= DENSE_LIMIT => Counts::Dense(vec![0; total as usize]),
            _ => Counts::Sparse(HashMap::new()),
        };
        Ok(BlockCensus {
            base,
            order,
            n_digits: 0,
            counts,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Digits scanned to produce this census.
    pub fn n_digits(&self) -> u64 {
        self.n_digits
    }

    /// Number of windows: `n_digits - order + 1` (0 for a too-short stretch).
    pub fn window_count(&self) -> u64 {
        (self.n_digits + 1).saturating_sub(u64::from(self.order))
    }

    /// Occurrences of a specific block (0 for wrong-length blocks).
    pub fn get(&self, digits: &[u8]) -> u64 {
        if digits.len() != self.order as usize
            || digits.iter().any(|&d| u32::from(d) >= self.base)
        {
            return 0;
        }
        match &self.counts {
            Counts::Dense(v) => v[block_index(digits, self.base) as usize],
            Counts::Sparse(m) => m.get(digits).copied().unwrap_or(0),
        }
    }

    /// Sum of all counts; always equals [`BlockCensus::window_count`].
    pub fn total(&self) -> u64 {
        match &self.counts {
            Counts::Dense(v) => v.iter().sum(),
            Counts::Sparse(m) => m.values().sum(),
        }
    }

    fn merge(&mut self, other: &BlockCensus) {
        self.n_digits += other.n_digits;
        match (&mut self.counts, &other.counts) {
            (Counts::Dense(a), Counts::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Counts::Sparse(a), Counts::Sparse(b)) => {
                for (k, v) in b {
                    *a.entry(k.clone()).or_insert(0) += v;
                }
            }
            _ => unreachable!("shards share the census representation"),
        }
    }

    /// Nonzero blocks in ascending numeric order.
    fn sorted_nonzero(&self) -> Vec<(Vec<u8>, u64)> {
        match &self.counts {
            Counts::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (index_to_digits(i as u64, self.base, self.order), c))
                .collect(),
            Counts::Sparse(m) => {
                let mut rows: Vec<_> = m.iter().map(|(k, &v)| (k.clone(), v)).collect();
                rows.sort();
                rows
            }
        }
    }
}

/// `g^k` when it fits in u64.
fn block_space(base: u32, order: u32) -> Option<u64> {
    u64::from(base).checked_pow(order)
}

fn block_index(digits: &[u8], base: u32) -> u64 {
    digits
        .iter()
        .fold(0u64, |r, &d| r * u64::from(base) + u64::from(d))
}

fn index_to_digits(mut idx: u64, base: u32, order: u32) -> Vec<u8> {
    let mut digits = vec![0u8; order as usize];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % u64::from(base)) as u8;
        idx /= u64::from(base);
    }
    digits
}

/// Occurrences of `needle` in `haystack`, overlapping windows included.
pub fn count_overlapping(haystack: &Block, needle: &Block) -> Result<u64> {
    if haystack.base() != needle.base() {
        return Err(NlabError::usage(format!(
            "base mismatch: haystack base {}, needle base {}",
            haystack.base(),
            needle.base()
        )));
    }
    if needle.is_empty() {
        return Err(NlabError::usage("needle must not be empty"));
    }
    let k = needle.len();
    let hay = haystack.digits();
    if hay.len() < k {
        return Ok(0);
    }
    let base = haystack.base();
    match block_space(base, k as u32) {
        Some(space) => {
            // Roll a window index over the haystack and compare against the
            // needle's index.
            let g = u64::from(base);
            let modulus = space / g;
            let target = block_index(needle.digits(), base);
            let mut r = 0u64;
            let mut count = 0u64;
            for (i, &d) in hay.iter().enumerate() {
                r = (r % modulus) * g + u64::from(d);
                if i + 1 >= k && r == target {
                    count += 1;
                }
            }
            Ok(count)
        }
        None => Ok(hay
            .windows(k)
            .filter(|w| *w == needle.digits())
            .count() as u64),
    }
}

/// Feed digits through a rolling window counter.
fn run_counter<I>(
    census: &mut BlockCensus,
    digits: I,
    max_windows: Option<u64>,
) -> Result<()>
where
    I: Iterator<Item = Result<u8>>,
{
    let g = u64::from(census.base);
    let order = census.order as usize;
    match &mut census.counts {
        Counts::Dense(counts) => {
            let modulus = block_space(census.base, census.order).unwrap() / g;
            let mut r = 0u64;
            let mut seen = 0u64;
            let mut windows = 0u64;
            for d in digits {
                let d = u64::from(d?);
                r = (r % modulus) * g + d;
                seen += 1;
                if seen >= order as u64 {
                    counts[r as usize] += 1;
                    windows += 1;
                    if Some(windows) == max_windows {
                        break;
                    }
                }
            }
            census.n_digits += seen;
        }
        Counts::Sparse(counts) => {
            let mut ring = vec![0u8; order];
            let mut seen = 0u64;
            let mut windows = 0u64;
            for d in digits {
                ring[(seen % order as u64) as usize] = d?;
                seen += 1;
                if seen >= order as u64 {
                    let split = (seen % order as u64) as usize;
                    let mut key = Vec::with_capacity(order);
                    key.extend_from_slice(&ring[split..]);
                    key.extend_from_slice(&ring[..split]);
                    *counts.entry(key).or_insert(0) += 1;
                    windows += 1;
                    if Some(windows) == max_windows {
                        break;
                    }
                }
            }
            census.n_digits += seen;
        }
    }
    Ok(())
}

fn apply_scope(spec: &StreamSpec, scope: CensusScope) -> Result<StreamSpec> {
    match scope {
        CensusScope::Digits(0) | CensusScope::Entries(0) => {
            Err(NlabError::usage("census scope must be positive"))
        }
        CensusScope::Digits(_) => Ok(spec.clone()),
        CensusScope::Entries(c) => Ok(spec.clone().with_entries(c)),
    }
}

/// Census of all length-`order` blocks over the scoped stream.
pub fn census(
    spec: &StreamSpec,
    order: u32,
    scope: CensusScope,
    tables: &PrimeTables,
) -> Result<BlockCensus> {
    let stream_spec = apply_scope(spec, scope)?;
    let mut census = BlockCensus::empty(spec.base, order)?;
    match scope {
        CensusScope::Digits(d) => {
            let stream = stream_digits(&stream_spec, tables).take(d as usize);
            run_counter(&mut census, stream, None)?;
            if census.n_digits < d {
                return Err(NlabError::usage(format!(
                    "stream ended after {} digits; census needs {d}",
                    census.n_digits
                )));
            }
        }
        CensusScope::Entries(_) => {
            run_counter(&mut census, stream_digits(&stream_spec, tables), None)?;
        }
    }
    Ok(census)
}

/// Entry position of a digit offset: `(entry index, offset within entry)`.
/// `total` is the running digit count up to (excluding) `entry`.
struct EntryCursor {
    entry: u64,
    total: u64,
}

/// Same census as [`census`], computed in `shards` parallel pieces and
/// merged; the result is identical to the sequential census.
pub fn census_parallel(
    spec: &StreamSpec,
    order: u32,
    scope: CensusScope,
    tables: &PrimeTables,
    shards: usize,
) -> Result<BlockCensus> {
    if shards == 0 {
        return Err(NlabError::usage("shard count must be positive"));
    }
    let stream_spec = apply_scope(spec, scope)?;
    // Validate base/order before doing any heavy walking.
    BlockCensus::empty(spec.base, order)?;

    // Total digit length of the scoped stream.
    let total_digits = match scope {
        CensusScope::Digits(d) => {
            if let Some(c) = stream_spec.entry_count {
                let mut sum = 0u64;
                let mut i = 0;
                while i < c && sum < d {
                    let n = stream_spec.start_index + i;
                    sum += u64::from(digit_len(value_of(spec.kind, n, tables)?, spec.base));
                    i += 1;
                }
                if sum < d {
                    return Err(NlabError::usage(format!(
                        "stream ended after {sum} digits; census needs {d}"
                    )));
                }
            }
            d
        }
        CensusScope::Entries(c) => {
            let mut sum = 0u64;
            for i in 0..c {
                let n = spec.start_index + i;
                sum += u64::from(digit_len(value_of(spec.kind, n, tables)?, spec.base));
            }
            sum
        }
    };

    // Locate the digit positions s * D / shards as (entry, offset) pairs.
    let shards = shards.min(total_digits.max(1) as usize);
    let mut starts = Vec::with_capacity(shards);
    let mut cursor = EntryCursor {
        entry: spec.start_index,
        total: 0,
    };
    let mut next_len =
        u64::from(digit_len(value_of(spec.kind, cursor.entry, tables)?, spec.base));
    for s in 0..shards {
        let target = total_digits as u128 * s as u128 / shards as u128;
        let target = target as u64;
        while cursor.total + next_len <= target {
            cursor.total += next_len;
            cursor.entry += 1;
            next_len =
                u64::from(digit_len(value_of(spec.kind, cursor.entry, tables)?, spec.base));
        }
        starts.push((cursor.entry, (target - cursor.total) as u32, target));
    }

    let window_total = (total_digits + 1).saturating_sub(u64::from(order));
    let results: Result<Vec<BlockCensus>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &(entry, offset, digit_start))| {
            let digit_end = if i + 1 < shards {
                starts[i + 1].2
            } else {
                total_digits
            };
            // Windows whose start index falls in [digit_start, digit_end).
            let budget = digit_end.min(window_total) - digit_start.min(window_total);
            let mut shard = BlockCensus::empty(spec.base, order)?;
            if budget > 0 {
                let stream = DigitStream::starting_at(&stream_spec, tables, entry, offset)?;
                run_counter(&mut shard, stream, Some(budget))?;
            }
            // Normalize: a shard's digit attribution is its owned range.
            shard.n_digits = digit_end - digit_start;
            Ok(shard)
        })
        .collect();

    let mut merged = BlockCensus::empty(spec.base, order)?;
    for shard in results? {
        merged.merge(&shard);
    }
    if merged.total() != window_total {
        return Err(NlabError::internal(format!(
            "sharded census counted {} windows, expected {window_total}",
            merged.total()
        )));
    }
    Ok(merged)
}

/// Frequencies from a census. Every frequency divides the window count; the
/// report lists all `g^k` blocks when that is small, otherwise only blocks
/// that occur.
pub fn frequency_report(census: &BlockCensus) -> Result<FrequencyReport> {
    let windows = census.window_count();
    if windows == 0 {
        return Err(NlabError::usage(format!(
            "census of {} digits has no windows of order {}",
            census.n_digits(),
            census.order()
        )));
    }
    if census.total() != windows {
        return Err(NlabError::internal(format!(
            "census counted {} windows over {} digits, expected {windows}",
            census.total(),
            census.n_digits()
        )));
    }
    let reference = (f64::from(census.base)).powi(-(census.order as i32));
    let list_all = matches!(block_space(census.base, census.order), Some(t) if t <= REPORT_ALL_LIMIT);

    let mut rows = Vec::new();
    let mut max_deviation = 0f64;
    let mut listed = 0u64;
    if list_all {
        let total = block_space(census.base, census.order).unwrap();
        for idx in 0..total {
            let digits = index_to_digits(idx, census.base, census.order);
            push_row(&mut rows, census, digits, windows, reference, &mut max_deviation);
        }
        listed = total;
    } else {
        for (digits, _) in census.sorted_nonzero() {
            push_row(&mut rows, census, digits, windows, reference, &mut max_deviation);
            listed += 1;
        }
    }
    // Blocks with no occurrences and no row still deviate by `reference`.
    let some_absent = match block_space(census.base, census.order) {
        Some(total) => listed < total,
        None => true,
    };
    if some_absent {
        max_deviation = max_deviation.max(reference);
    }
    Ok(FrequencyReport {
        base: census.base,
        order: census.order,
        n_digits: census.n_digits,
        denominator: windows,
        reference,
        rows,
        max_deviation,
    })
}

fn push_row(
    rows: &mut Vec<FrequencyRow>,
    census: &BlockCensus,
    digits: Vec<u8>,
    windows: u64,
    reference: f64,
    max_deviation: &mut f64,
) {
    let count = census.get(&digits);
    let frequency = count as f64 / windows as f64;
    *max_deviation = (*max_deviation).max((frequency - reference).abs());
    let block = Block::new(census.base, digits).expect("census digits are valid");
    rows.push(FrequencyRow {
        block: block.to_ascii(),
        count,
        frequency,
    });
}

/// Leading-digit frequencies of `a(n)` over `entries` entries, skipping
/// zero values (which have no leading digit). The reference is the uniform
/// `1/(g-1)`.
pub fn benford_leading(
    spec: &StreamSpec,
    entries: u64,
    tables: &PrimeTables,
) -> Result<FrequencyReport> {
    if entries == 0 {
        return Err(NlabError::usage("entry count must be positive"));
    }
    let g = u64::from(spec.base);
    let mut counts = vec![0u64; spec.base as usize];
    let mut nonzero = 0u64;
    for i in 0..entries {
        let n = spec.start_index + i;
        let mut v = value_of(spec.kind, n, tables)?;
        if v == 0 {
            continue;
        }
        while v >= g {
            v /= g;
        }
        counts[v as usize] += 1;
        nonzero += 1;
    }
    if nonzero == 0 {
        return Err(NlabError::usage(
            "no leading digits: every scanned entry was zero",
        ));
    }
    let reference = 1.0 / f64::from(spec.base - 1);
    let mut rows = Vec::with_capacity(spec.base as usize - 1);
    let mut max_deviation = 0f64;
    for (d, &count) in counts.iter().enumerate().skip(1) {
        let frequency = count as f64 / nonzero as f64;
        max_deviation = max_deviation.max((frequency - reference).abs());
        rows.push(FrequencyRow {
            block: Block::new(spec.base, vec![d as u8])?.to_ascii(),
            count,
            frequency,
        });
    }
    Ok(FrequencyReport {
        base: spec.base,
        order: 1,
        n_digits: entries,
        denominator: nonzero,
        reference,
        rows,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::SeqKind;
    use crate::primes::build_tables;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tables() -> PrimeTables {
        build_tables(20_000).unwrap()
    }

    fn naive_census(digits: &[u8], base: u32, k: usize) -> HashMap<Vec<u8>, u64> {
        let mut m = HashMap::new();
        if digits.len() >= k {
            for w in digits.windows(k) {
                *m.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
        let _ = base;
        m
    }

    fn naive_count(hay: &[u8], needle: &[u8]) -> u64 {
        if hay.len() < needle.len() {
            return 0;
        }
        hay.windows(needle.len()).filter(|w| *w == needle).count() as u64
    }

    #[test]
    fn overlapping_occurrences_counted() {
        let hay = Block::parse("713131051310131", 10).unwrap();
        let needle = Block::parse("131", 10).unwrap();
        assert_eq!(count_overlapping(&hay, &needle).unwrap(), 4);
        let needle = Block::parse("31", 10).unwrap();
        assert_eq!(count_overlapping(&hay, &needle).unwrap(), 4);
        let needle = Block::parse("713131051310131", 10).unwrap();
        assert_eq!(count_overlapping(&hay, &needle).unwrap(), 1);
        let needle = Block::parse("7131310513101317", 10).unwrap();
        assert_eq!(count_overlapping(&hay, &needle).unwrap(), 0);
    }

    #[test]
    fn self_overlap() {
        let hay = Block::new(16, vec![10, 10, 10, 10]).unwrap();
        let needle = Block::new(16, vec![10, 10]).unwrap();
        assert_eq!(count_overlapping(&hay, &needle).unwrap(), 3);
    }

    #[test]
    fn count_argument_errors() {
        let hay = Block::parse("123", 10).unwrap();
        let needle = Block::parse("12", 8).unwrap();
        assert!(count_overlapping(&hay, &needle).is_err());
        let empty = Block::new(10, vec![]).unwrap();
        assert!(count_overlapping(&hay, &empty).is_err());
    }

    #[test]
    fn long_needles_leave_the_rolling_range() {
        // Base 10, length >= 20: 10^k overflows u64, forcing the
        // slice-comparison path.
        let mut digits = vec![0u8; 60];
        digits[20] = 1;
        digits[41] = 1;
        let hay = Block::new(10, digits).unwrap();
        let needle = Block::new(10, vec![0u8; 20]).unwrap();
        assert_eq!(
            count_overlapping(&hay, &needle).unwrap(),
            naive_count(hay.digits(), needle.digits())
        );
    }

    #[test]
    fn census_counts_tiny_example() {
        // pi(1..4) concatenates to 0122.
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        let c = census(&spec, 2, CensusScope::Entries(4), &t).unwrap();
        assert_eq!(c.n_digits(), 4);
        assert_eq!(c.window_count(), 3);
        assert_eq!(c.get(&[0, 1]), 1);
        assert_eq!(c.get(&[1, 2]), 1);
        assert_eq!(c.get(&[2, 2]), 1);
        assert_eq!(c.get(&[9, 9]), 0);
    }

    #[test]
    fn census_digit_scope_prefix() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        let c = census(&spec, 1, CensusScope::Digits(30), &t).unwrap();
        let expect = [2u64, 2, 2, 2, 4, 2, 4, 2, 4, 6];
        for (d, &e) in expect.iter().enumerate() {
            assert_eq!(c.get(&[d as u8]), e, "digit {d}");
        }
        assert_eq!(c.total(), 30);
    }

    #[test]
    fn census_scope_errors() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        assert!(census(&spec, 0, CensusScope::Digits(5), &t).is_err());
        assert!(census(&spec, 1, CensusScope::Digits(0), &t).is_err());
        assert!(census(&spec, 1, CensusScope::Entries(0), &t).is_err());
        // Digit scope larger than the stream.
        let bounded = spec.clone().with_entries(3);
        assert!(census(&bounded, 1, CensusScope::Digits(10), &t).is_err());
    }

    #[test]
    fn census_matches_naive_on_random_specs() {
        let t = tables();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let kind = [
                SeqKind::Natural,
                SeqKind::Square,
                SeqKind::FloorSqrt,
                SeqKind::Primes,
                SeqKind::PrimeCount,
            ][rng.random_range(0..5)];
            let base = [2u32, 3, 10, 16][rng.random_range(0..4)];
            let start = if kind == SeqKind::Primes {
                1
            } else {
                rng.random_range(0..2)
            };
            let order = rng.random_range(1..5);
            let entries = rng.random_range(1..200);
            let spec = StreamSpec::new(kind, base, start).unwrap();
            let c = census(&spec, order, CensusScope::Entries(entries), &t).unwrap();
            let flat = crate::digits::prefix(
                &spec.clone().with_entries(entries),
                c.n_digits(),
                &t,
            )
            .unwrap();
            let naive = naive_census(flat.digits(), base, order as usize);
            assert_eq!(c.total(), naive.values().sum::<u64>());
            for (block, &count) in &naive {
                assert_eq!(c.get(block), count);
            }
        }
    }

    #[test]
    fn sparse_census_matches_naive() {
        // Order 30 in base 10 cannot be dense.
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        let c = census(&spec, 30, CensusScope::Entries(60), &t).unwrap();
        let flat = crate::digits::prefix(&spec.clone().with_entries(60), c.n_digits(), &t).unwrap();
        let naive = naive_census(flat.digits(), 10, 30);
        assert_eq!(c.total(), c.window_count());
        for (block, &count) in &naive {
            assert_eq!(c.get(block), count);
        }
        assert!(matches!(c.counts, Counts::Sparse(_)));
    }

    #[test]
    fn marginalizing_order_two_recovers_order_one() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        let c2 = census(&spec, 2, CensusScope::Digits(500), &t).unwrap();
        let c1 = census(&spec, 1, CensusScope::Digits(499), &t).unwrap();
        for d1 in 0..10u8 {
            let marginal: u64 = (0..10u8).map(|d2| c2.get(&[d1, d2])).sum();
            assert_eq!(marginal, c1.get(&[d1]), "first digit {d1}");
        }
    }

    #[test]
    fn parallel_census_equals_sequential() {
        let t = tables();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let kind = [
                SeqKind::Natural,
                SeqKind::FloorSqrt,
                SeqKind::Primes,
                SeqKind::PrimeCount,
            ][rng.random_range(0..4)];
            let start = if kind == SeqKind::Primes {
                1
            } else {
                rng.random_range(0..2)
            };
            let base = [2u32, 10][rng.random_range(0..2)];
            let order = rng.random_range(1..4);
            let spec = StreamSpec::new(kind, base, start).unwrap();
            let scope = if rng.random_range(0..2) == 0 {
                CensusScope::Entries(rng.random_range(1..400))
            } else {
                CensusScope::Digits(rng.random_range(1..800))
            };
            let shards = rng.random_range(1..9);
            let seq = census(&spec, order, scope, &t);
            let par = census_parallel(&spec, order, scope, &t, shards);
            match (seq, par) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a, b);
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("sequential {a:?} vs parallel {b:?}"),
            }
        }
    }

    #[test]
    fn parallel_shard_edge_cases() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        // More shards than digits; order larger than some shards.
        let seq = census(&spec, 3, CensusScope::Digits(7), &t).unwrap();
        for shards in [1, 2, 3, 7, 50] {
            let par = census_parallel(&spec, 3, CensusScope::Digits(7), &t, shards).unwrap();
            assert_eq!(par, seq, "{shards} shards");
        }
        assert!(census_parallel(&spec, 1, CensusScope::Digits(5), &t, 0).is_err());
    }

    #[test]
    fn report_lists_all_blocks_when_small() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        let c = census(&spec, 2, CensusScope::Digits(100), &t).unwrap();
        let report = frequency_report(&c).unwrap();
        assert_eq!(report.rows.len(), 100);
        assert_eq!(report.denominator, 99);
        assert_eq!(report.rows[0].block, "00");
        assert_eq!(report.rows[99].block, "99");
        let total: u64 = report.rows.iter().map(|r| r.count).sum();
        assert_eq!(total, 99);
        let freq_sum: f64 = report.rows.iter().map(|r| r.frequency).sum();
        assert!((freq_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_lists_nonzero_blocks_when_large() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        let c = census(&spec, 4, CensusScope::Digits(50), &t).unwrap();
        let report = frequency_report(&c).unwrap();
        assert_eq!(report.denominator, 47);
        assert_eq!(report.rows.iter().map(|r| r.count).sum::<u64>(), 47);
        assert!(report.rows.iter().all(|r| r.count > 0));
        // Absent blocks pin the deviation at the reference frequency or more.
        assert!(report.max_deviation >= report.reference);
        let sorted: Vec<_> = report.rows.iter().map(|r| r.block.clone()).collect();
        let mut resorted = sorted.clone();
        resorted.sort();
        assert_eq!(sorted, resorted);
    }

    #[test]
    fn uniform_synthetic_census_has_zero_deviation() {
        let blocks = (0..4u8).flat_map(|a| (0..4u8).map(move |b| (vec![a, b], 5u64)));
        let c = BlockCensus::from_counts(4, 2, 81, blocks).unwrap();
        let report = frequency_report(&c).unwrap();
        assert_eq!(report.denominator, 80);
        assert!(report.max_deviation < 1e-12);
    }

    #[test]
    fn report_of_short_census_errors() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        let c = census(&spec, 4, CensusScope::Digits(3), &t).unwrap();
        assert_eq!(c.window_count(), 0);
        assert!(frequency_report(&c).is_err());
    }

    #[test]
    fn benford_prime_count_small() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        let report = benford_leading(&spec, 28, &t).unwrap();
        // pi(1..28): one zero value (pi(1) = 0) is skipped.
        assert_eq!(report.denominator, 27);
        let expect = [1u64, 2, 2, 4, 2, 4, 2, 4, 6];
        for (row, &e) in report.rows.iter().zip(&expect) {
            assert_eq!(row.count, e, "digit {}", row.block);
        }
    }

    #[test]
    fn benford_uniform_cases() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::Natural, 10, 1).unwrap();
        let report = benford_leading(&spec, 9, &t).unwrap();
        assert!(report.max_deviation < 1e-12);
        assert!(report.rows.iter().all(|r| r.count == 1));

        let spec = StreamSpec::new(SeqKind::Square, 10, 1).unwrap();
        let report = benford_leading(&spec, 3, &t).unwrap();
        // 1, 4, 9: one hit each.
        assert_eq!(report.denominator, 3);
        assert_eq!(report.rows.iter().filter(|r| r.count == 1).count(), 3);
    }

    #[test]
    fn benford_all_zero_errors() {
        let t = tables();
        let spec = StreamSpec::new(SeqKind::PrimeCount, 10, 1).unwrap();
        // pi(1) = 0 only.
        assert!(benford_leading(&spec, 1, &t).is_err());
        assert!(benford_leading(&spec, 0, &t).is_err());
    }
}
