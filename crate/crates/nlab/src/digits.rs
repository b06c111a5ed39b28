//! Digit streams for concatenation constants.
//!
//! A [`StreamSpec`] names an integer sequence `a(n)`, a base, and the first
//! index; the stream is the base-g digits of `a(start)`, `a(start+1)`, ...
//! laid end to end. With `a(n) = pi(n)` from `n = 1` this is the digit
//! expansion of the prime-counting concatenation constant
//! `0.0122334444556666778888999999...`; with `a(n) = p_n` it is the prime
//! concatenation constant `0.235711131719...`.
//!
//! Streams are plain restartable iterators: two iterators from the same spec
//! yield identical digits. Entries are expanded into a small stack buffer,
//! so iteration does not allocate per entry.

use std::io::Write;

use crate::error::{NlabError, Result};
use crate::primes::PrimeTables;

/// Digits-to-character alphabet for bases up to 36.
const ALPHABET: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Longest digit expansion we ever produce: u64::MAX in base 2.
const MAX_ENTRY_DIGITS: usize = 64;

/// A finite digit string in a fixed base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    base: u32,
    digits: Vec<u8>,
}

impl Block {
    /// Wrap a digit vector, checking every digit is below `base`.
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if let Some(&d) = digits.iter().find(|&&d| u32::from(d) >= base) {
            return Err(NlabError::usage(format!(
                "digit {d} out of range for base {base}"
            )));
        }
        Ok(Block { base, digits })
    }

    /// Parse an ASCII digit string (`0-9a-z`, case-insensitive).
    pub fn parse(s: &str, base: u32) -> Result<Self> {
        check_base(base)?;
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = c
                .to_digit(36)
                .ok_or_else(|| NlabError::usage(format!("invalid digit character {c:?}")))?;
            digits.push(d as u8);
        }
        Block::new(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Render with the `0-9a-z` alphabet.
    pub fn to_ascii(&self) -> String {
        self.digits
            .iter()
            .map(|&d| ALPHABET[d as usize] as char)
            .collect()
    }
}

fn check_base(base: u32) -> Result<()> {
    if !(2..=36).contains(&base) {
        return Err(NlabError::usage(format!("base {base} not in 2..=36")));
    }
    Ok(())
}

/// The integer sequences whose digits we concatenate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqKind {
    /// `a(n) = n`.
    Natural,
    /// `a(n) = n^2`.
    Square,
    /// `a(n) = floor(sqrt(n))`.
    FloorSqrt,
    /// `a(n) = p_n`, the n-th prime (requires `n >= 1`).
    Primes,
    /// `a(n) = pi(n)`, the number of primes `<= n`.
    PrimeCount,
}

impl SeqKind {
    /// Stable token used in CLI flags and dump headers.
    pub fn token(self) -> &'static str {
        match self {
            SeqKind::Natural => "natural",
            SeqKind::Square => "square",
            SeqKind::FloorSqrt => "floor-sqrt",
            SeqKind::Primes => "primes",
            SeqKind::PrimeCount => "prime-count",
        }
    }

    pub fn from_token(s: &str) -> Result<Self> {
        Ok(match s {
            "natural" => SeqKind::Natural,
            "square" => SeqKind::Square,
            "floor-sqrt" => SeqKind::FloorSqrt,
            "primes" => SeqKind::Primes,
            "prime-count" => SeqKind::PrimeCount,
            _ => return Err(NlabError::usage(format!("unknown sequence {s:?}"))),
        })
    }
}

/// A digit stream: sequence kind, base, first index, optional entry budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamSpec {
    pub kind: SeqKind,
    pub base: u32,
    pub start_index: u64,
    /// `Some(c)`: the stream ends after the digits of `c` entries.
    /// `None`: unbounded (the sieve range is the practical end).
    pub entry_count: Option<u64>,
}

impl StreamSpec {
    /// `start_index` must be 0 or 1, and 1 for [`SeqKind::Primes`].
    pub fn new(kind: SeqKind, base: u32, start_index: u64) -> Result<Self> {
        check_base(base)?;
        if start_index > 1 {
            return Err(NlabError::usage(format!(
                "start index must be 0 or 1, got {start_index}"
            )));
        }
        if kind == SeqKind::Primes && start_index == 0 {
            return Err(NlabError::usage(
                "the prime sequence is indexed from 1",
            ));
        }
        Ok(StreamSpec {
            kind,
            base,
            start_index,
            entry_count: None,
        })
    }

    pub fn with_entries(mut self, count: u64) -> Self {
        self.entry_count = Some(count);
        self
    }

    /// Largest index whose value the stream will request, if bounded.
    pub fn last_index(&self) -> Option<u64> {
        self.entry_count
            .map(|c| self.start_index + c.saturating_sub(1))
    }
}

/// `a(n)` for the given sequence kind. Prime-backed kinds consult `tables`.
pub fn value_of(kind: SeqKind, n: u64, tables: &PrimeTables) -> Result<u64> {
    match kind {
        SeqKind::Natural => Ok(n),
        SeqKind::Square => n.checked_mul(n).ok_or_else(|| {
            NlabError::out_of_range(format!("square of entry {n} overflows u64"))
        }),
        SeqKind::FloorSqrt => Ok(n.isqrt()),
        SeqKind::Primes => tables.nth_prime(n).map_err(|_| {
            NlabError::out_of_range(format!(
                "entry {n}: prime #{n} is beyond sieve limit {}",
                tables.limit()
            ))
        }),
        SeqKind::PrimeCount => tables.pi(n).map_err(|_| {
            NlabError::out_of_range(format!(
                "entry {n}: pi({n}) is beyond sieve limit {}",
                tables.limit()
            ))
        }),
    }
}

/// Base-g digits of `n`, most significant first. `0` expands to `[0]`.
pub fn digits_of(n: u64, base: u32) -> Result<Block> {
    check_base(base)?;
    let mut buf = [0u8; MAX_ENTRY_DIGITS];
    let len = expand(n, base, &mut buf);
    Ok(Block {
        base,
        digits: buf[..len].to_vec(),
    })
}

/// Number of base-g digits of `n` (1 for `n = 0`).
pub fn digit_len(n: u64, base: u32) -> u32 {
    let mut len = 1;
    let mut v = n / u64::from(base);
    while v > 0 {
        len += 1;
        v /= u64::from(base);
    }
    len
}

/// Expand `n` into `buf`, most significant first; returns the digit count.
fn expand(n: u64, base: u32, buf: &mut [u8; MAX_ENTRY_DIGITS]) -> usize {
    let b = u64::from(base);
    let mut v = n;
    let mut i = MAX_ENTRY_DIGITS;
    loop {
        i -= 1;
        buf[i] = (v % b) as u8;
        v /= b;
        if v == 0 {
            break;
        }
    }
    buf.copy_within(i.., 0);
    MAX_ENTRY_DIGITS - i
}

/// Iterator over the digits of a stream. Yields `Err` once (and then stops)
/// if a value cannot be produced, e.g. when a prime-backed sequence runs past
/// the sieve.
pub struct DigitStream<'a> {
    spec: StreamSpec,
    tables: &'a PrimeTables,
    next_index: u64,
    entries_left: Option<u64>,
    buf: [u8; MAX_ENTRY_DIGITS],
    buf_len: u8,
    buf_pos: u8,
    failed: bool,
}

/// Digits of `spec` from its beginning.
pub fn stream_digits<'a>(spec: &StreamSpec, tables: &'a PrimeTables) -> DigitStream<'a> {
    DigitStream {
        spec: spec.clone(),
        tables,
        next_index: spec.start_index,
        entries_left: spec.entry_count,
        buf: [0; MAX_ENTRY_DIGITS],
        buf_len: 0,
        buf_pos: 0,
        failed: false,
    }
}

impl<'a> DigitStream<'a> {
    /// Start mid-stream: at digit `digit_offset` within entry `index`.
    /// Used to shard census work; `index` counts from `spec.start_index`
    /// and the entry budget is reduced by the skipped entries.
    pub(crate) fn starting_at(
        spec: &StreamSpec,
        tables: &'a PrimeTables,
        index: u64,
        digit_offset: u32,
    ) -> Result<DigitStream<'a>> {
        let skipped = index - spec.start_index;
        let entries_left = match spec.entry_count {
            Some(c) if skipped > c => {
                return Err(NlabError::usage("shard start lies past the stream end"))
            }
            Some(c) => Some(c - skipped),
            None => None,
        };
        let mut s = DigitStream {
            spec: spec.clone(),
            tables,
            next_index: index,
            entries_left,
            buf: [0; MAX_ENTRY_DIGITS],
            buf_len: 0,
            buf_pos: 0,
            failed: false,
        };
        if digit_offset > 0 {
            s.load_entry()?;
            debug_assert!(digit_offset < u32::from(s.buf_len));
            s.buf_pos = digit_offset as u8;
        }
        Ok(s)
    }

    /// Pull the next entry into the buffer. Returns false at end of stream.
    fn load_entry(&mut self) -> Result<bool> {
        if let Some(left) = self.entries_left.as_mut() {
            if *left == 0 {
                return Ok(false);
            }
            *left -= 1;
        }
        let n = self.next_index;
        self.next_index += 1;
        let v = value_of(self.spec.kind, n, self.tables)?;
        self.buf_len = expand(v, self.spec.base, &mut self.buf) as u8;
        self.buf_pos = 0;
        Ok(true)
    }
}

impl<'a> Iterator for DigitStream<'a> {
    type Item = Result<u8>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if self.buf_pos >= self.buf_len {
            match self.load_entry() {
                Ok(true) => {}
                Ok(false) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        let d = self.buf[self.buf_pos as usize];
        self.buf_pos += 1;
        Some(Ok(d))
    }
}

/// The first `n_digits` digits of the stream as one block. Errors if the
/// stream ends (entry budget or sieve range) before producing them.
pub fn prefix(spec: &StreamSpec, n_digits: u64, tables: &PrimeTables) -> Result<Block> {
    let mut digits = Vec::with_capacity(n_digits as usize);
    let mut stream = stream_digits(spec, tables);
    for _ in 0..n_digits {
        match stream.next() {
            Some(Ok(d)) => digits.push(d),
            Some(Err(e)) => return Err(e),
            None => {
                return Err(NlabError::usage(format!(
                    "stream ended after {} digits; {n_digits} requested",
                    digits.len()
                )))
            }
        }
    }
    Ok(Block {
        base: spec.base,
        digits,
    })
}

/// Write a digit dump: optionally a `# kind base start entries` header line,
/// then all digits of `entries` entries as one ASCII line.
pub fn write_digit_dump<W: Write>(
    w: &mut W,
    spec: &StreamSpec,
    entries: u64,
    tables: &PrimeTables,
    header: bool,
) -> Result<()> {
    let spec = spec.clone().with_entries(entries);
    if header {
        writeln!(
            w,
            "# {} {} {} {}",
            spec.kind.token(),
            spec.base,
            spec.start_index,
            entries
        )?;
    }
    let mut line = Vec::new();
    for d in stream_digits(&spec, tables) {
        line.push(ALPHABET[d? as usize]);
    }
    w.write_all(&line)?;
    writeln!(w)?;
    Ok(())
}
