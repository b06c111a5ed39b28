//! Segmented sieve of Eratosthenes with O(1) rank queries, prime-gap
//! statistics, and explicit prime-counting bounds.
//!
//! [`PrimeTables`] holds a full bitset over `0..=limit` (bit `i` set iff `i`
//! is prime), a flat list of the primes, and one running prime count per
//! 4096-bit block so that `pi(x)` needs at most one block scan. The sieve
//! works segment by segment for cache locality; the result is bit-identical
//! regardless of segment size.
//!
//! Gap statistics report the ratio `(p_{m+1} - p_m) / ln^2 p_m`, whose
//! empirical maximum over any sieved range is attained at `m = 1` (value
//! `1 / ln^2 2`). [`dusart_check`] scans the classical explicit bounds
//! `x/(ln x - 1) <= pi(x)` and `pi(x) <= x/(ln x - 1.1)` above the smallest
//! x-thresholds at which they hold.

use std::env;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{NlabError, Result};

/// Smallest x from which `x/(ln x - 1) <= pi(x)` holds (it fails at 5392).
pub const DUSART_LOWER_MIN_X: u64 = 5393;

/// Smallest x from which `pi(x) <= x/(ln x - 1.1)` holds (it fails at 60183).
pub const DUSART_UPPER_MIN_X: u64 = 60184;

/// Default sieve segment length in numbers.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

const CACHE_MAGIC: &[u8; 5] = b"NLAB1";
/// Cache validation re-sieves this prefix and compares it bit for bit.
const CACHE_CHECK_PREFIX: u64 = 10_000;
const RANK_BLOCK_BITS: u64 = 4096;
const RANK_BLOCK_WORDS: usize = (RANK_BLOCK_BITS / 64) as usize;

/// Sieve tables over `0..=limit`.
pub struct PrimeTables {
    limit: u64,
    /// Bit `i` (LSB-first within each word) is 1 iff `i` is prime.
    words: Vec<u64>,
    /// `rank[b]` = number of primes below bit index `b * 4096`.
    rank: Vec<u64>,
    /// All primes `<= limit`, ascending; `primes[m-1]` is the m-th prime.
    primes: Vec<u64>,
    /// Cached full-range gap-ratio maximum `(ratio, argmax m)`.
    cramer_max: OnceLock<(f64, u64)>,
}

/// One prime gap, as a row of a ratio series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRatio {
    /// Gap index: this row describes `p_{m+1} - p_m`.
    pub m: u64,
    /// The prime `p_m` opening the gap.
    pub p: u64,
    /// `p_{m+1} - p_m`.
    pub gap: u64,
    /// `gap / ln^2 p_m`.
    pub ratio: f64,
}

/// Summary of normalized prime gaps over a sieved range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStats {
    /// Largest `(p_{m+1} - p_m) / ln^2 p_m` over the scanned gaps.
    pub max_ratio: f64,
    /// The `m` attaining `max_ratio` (smallest such index).
    pub argmax_m: u64,
    /// First gap index scanned.
    pub m_min: u64,
    /// Last gap index scanned.
    pub m_max: u64,
    /// Per-gap rows, present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_series: Option<Vec<GapRatio>>,
}

/// Which of the two prime-counting bounds a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DusartSide {
    /// `x/(ln x - 1) <= pi(x)` failed.
    Lower,
    /// `pi(x) <= x/(ln x - 1.1)` failed.
    Upper,
}

/// A point where a prime-counting bound failed its inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DusartViolation {
    pub x: u64,
    pub pi: u64,
    pub bound: f64,
    pub side: DusartSide,
}

/// Sieve `0..=limit` with the default segment size.
pub fn build_tables(limit: u64) -> Result<PrimeTables> {
    build_tables_with_segment(limit, DEFAULT_SEGMENT_SIZE)
}

/// Sieve `0..=limit` using segments of `segment_size` numbers.
pub fn build_tables_with_segment(limit: u64, segment_size: u64) -> Result<PrimeTables> {
    if limit < 2 {
        return Err(NlabError::usage("sieve limit must be at least 2"));
    }
    if segment_size < 64 {
        return Err(NlabError::usage("segment size must be at least 64"));
    }

    let nbits = limit + 1;
    let nwords = nbits.div_ceil(64) as usize;
    let mut words = vec![u64::MAX; nwords];
    // 0 and 1 are not prime.
    words[0] &= !0b11;
    // Bits above `limit` stay zero so popcounts see only real candidates.
    let tail = nwords as u64 * 64 - nbits;
    if tail > 0 {
        words[nwords - 1] &= u64::MAX >> tail;
    }

    let root = limit.isqrt();
    let base = base_primes(root);

    let mut seg_lo = 0u64;
    while seg_lo <= limit {
        let seg_hi = limit.min(seg_lo + segment_size - 1);
        for &p in &base {
            let p2 = p * p;
            if p2 > seg_hi {
                break;
            }
            // First multiple of p in the segment, never below p^2 (smaller
            // composites were struck by smaller primes).
            let mut i = if p2 >= seg_lo {
                p2
            } else {
                seg_lo + (p - seg_lo % p) % p
            };
            while i <= seg_hi {
                words[(i / 64) as usize] &= !(1u64 << (i % 64));
                i += p;
            }
        }
        if seg_hi == limit {
            break;
        }
        seg_lo = seg_hi + 1;
    }

    Ok(finish_tables(limit, words))
}

/// Primes up to `root` by a plain one-pass sieve, for striking composites.
fn base_primes(root: u64) -> Vec<u64> {
    if root < 2 {
        return Vec::new();
    }
    let n = (root + 1) as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Build the rank index and prime list from a finished bitset.
fn finish_tables(limit: u64, words: Vec<u64>) -> PrimeTables {
    let nwords = words.len();
    let mut rank = Vec::with_capacity(nwords / RANK_BLOCK_WORDS + 1);
    // Rough overcount of pi(limit) to avoid reallocation.
    let cap = if limit >= 17 {
        (limit as f64 / (limit as f64).ln() * 1.3) as usize
    } else {
        8
    };
    let mut primes = Vec::with_capacity(cap);
    let mut count = 0u64;
    for (wi, &w) in words.iter().enumerate() {
        if wi % RANK_BLOCK_WORDS == 0 {
            rank.push(count);
        }
        let mut bits = w;
        while bits != 0 {
            let tz = bits.trailing_zeros() as u64;
            primes.push(wi as u64 * 64 + tz);
            bits &= bits - 1;
        }
        count += w.count_ones() as u64;
    }
    PrimeTables {
        limit,
        words,
        rank,
        primes,
        cramer_max: OnceLock::new(),
    }
}

impl PrimeTables {
    /// Inclusive sieve bound.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes `<= limit`.
    pub fn prime_count(&self) -> u64 {
        self.primes.len() as u64
    }

    /// Largest sieved prime.
    pub fn largest_prime(&self) -> u64 {
        *self.primes.last().expect("limit >= 2 guarantees a prime")
    }

    /// Whether `x` is prime. Errors if `x` is beyond the sieve.
    pub fn is_prime(&self, x: u64) -> Result<bool> {
        if x > self.limit {
            return Err(NlabError::out_of_range(format!(
                "is_prime({x}) exceeds sieve limit {}",
                self.limit
            )));
        }
        Ok(self.bit(x))
    }

    #[inline]
    fn bit(&self, x: u64) -> bool {
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    /// `pi(x)`: the number of primes `<= x`. Errors if `x > limit`.
    pub fn pi(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(NlabError::out_of_range(format!(
                "pi({x}) exceeds sieve limit {}",
                self.limit
            )));
        }
        let block = (x / RANK_BLOCK_BITS) as usize;
        let mut n = self.rank[block];
        let last_word = (x / 64) as usize;
        for wi in block * RANK_BLOCK_WORDS..last_word {
            n += self.words[wi].count_ones() as u64;
        }
        let rem = x % 64;
        let mask = if rem == 63 {
            u64::MAX
        } else {
            (1u64 << (rem + 1)) - 1
        };
        Ok(n + (self.words[last_word] & mask).count_ones() as u64)
    }

    /// The m-th prime (`m >= 1`). Errors if `m` exceeds the sieved count.
    pub fn nth_prime(&self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(NlabError::usage("prime index starts at 1"));
        }
        self.primes
            .get((m - 1) as usize)
            .copied()
            .ok_or_else(|| {
                NlabError::out_of_range(format!(
                    "prime #{m} is beyond sieve limit {} ({} primes sieved)",
                    self.limit,
                    self.primes.len()
                ))
            })
    }

    /// The gap `p_{m+1} - p_m`. Errors if `p_{m+1}` is not sieved.
    pub fn gap(&self, m: u64) -> Result<u64> {
        Ok(self.nth_prime(m + 1)? - self.nth_prime(m)?)
    }

    /// Full-range gap statistics (no per-gap series).
    pub fn cramer_stats(&self) -> Result<GapStats> {
        self.cramer_stats_from(1, false)
    }

    /// Gap statistics over gap indices `m_min ..= pi(limit) - 1`, optionally
    /// carrying the per-gap ratio series.
    pub fn cramer_stats_from(&self, m_min: u64, with_series: bool) -> Result<GapStats> {
        if m_min == 0 {
            return Err(NlabError::usage("gap index starts at 1"));
        }
        let n = self.primes.len() as u64;
        if n < 2 || m_min > n - 1 {
            return Err(NlabError::usage(format!(
                "no gaps to scan: need p_{{m+1}} sieved for m = {m_min} (limit {})",
                self.limit
            )));
        }
        let m_max = n - 1;

        if m_min == 1 && !with_series {
            if let Some(&(max_ratio, argmax_m)) = self.cramer_max.get() {
                return Ok(GapStats {
                    max_ratio,
                    argmax_m,
                    m_min,
                    m_max,
                    ratio_series: None,
                });
            }
        }

        let mut series = if with_series {
            Some(Vec::with_capacity((m_max - m_min + 1) as usize))
        } else {
            None
        };
        let mut max_ratio = f64::NEG_INFINITY;
        let mut argmax_m = m_min;
        for m in m_min..=m_max {
            let p = self.primes[(m - 1) as usize];
            let gap = self.primes[m as usize] - p;
            let lp = (p as f64).ln();
            let ratio = gap as f64 / (lp * lp);
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax_m = m;
            }
            if let Some(s) = series.as_mut() {
                s.push(GapRatio { m, p, gap, ratio });
            }
        }
        if m_min == 1 {
            let _ = self.cramer_max.set((max_ratio, argmax_m));
        }
        Ok(GapStats {
            max_ratio,
            argmax_m,
            m_min,
            m_max,
            ratio_series: series,
        })
    }

    /// Scan `x_lo ..= x_hi` for violations of the explicit prime-counting
    /// bounds. Each bound is only tested from its validity threshold
    /// ([`DUSART_LOWER_MIN_X`], [`DUSART_UPPER_MIN_X`]) upward, so a clean
    /// run returns an empty list.
    pub fn dusart_check(&self, x_lo: u64, x_hi: u64) -> Result<Vec<DusartViolation>> {
        if x_lo < 2 {
            return Err(NlabError::usage("dusart scan starts at x >= 2"));
        }
        if x_lo > x_hi {
            return Err(NlabError::usage("empty dusart scan range"));
        }
        if x_hi > self.limit {
            return Err(NlabError::out_of_range(format!(
                "dusart scan to {x_hi} exceeds sieve limit {}",
                self.limit
            )));
        }
        let mut violations = Vec::new();
        let mut pi = self.pi(x_lo - 1)?;
        for x in x_lo..=x_hi {
            if self.bit(x) {
                pi += 1;
            }
            if x < DUSART_LOWER_MIN_X {
                continue;
            }
            let xf = x as f64;
            let lx = xf.ln();
            let lower = xf / (lx - 1.0);
            if lower > pi as f64 {
                violations.push(DusartViolation {
                    x,
                    pi,
                    bound: lower,
                    side: DusartSide::Lower,
                });
            }
            if x >= DUSART_UPPER_MIN_X {
                let upper = xf / (lx - 1.1);
                if (pi as f64) > upper {
                    violations.push(DusartViolation {
                        x,
                        pi,
                        bound: upper,
                        side: DusartSide::Upper,
                    });
                }
            }
        }
        Ok(violations)
    }

    /// Write the sieve to `path`: magic `NLAB1`, the limit as little-endian
    /// u64, then the bitset rounded up to whole bytes (LSB-first).
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        let nbytes = ((self.limit + 1).div_ceil(8)) as usize;
        let mut written = 0usize;
        for word in &self.words {
            let bytes = word.to_le_bytes();
            let take = bytes.len().min(nbytes - written);
            w.write_all(&bytes[..take])?;
            written += take;
            if written == nbytes {
                break;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Load a sieve written by [`PrimeTables::save_cache`]. The first 10^4
    /// numbers are re-sieved and compared bit for bit; any mismatch, bad
    /// magic, or size mismatch is a cache error.
    pub fn load_cache(path: &Path) -> Result<PrimeTables> {
        let mut f = File::open(path).map_err(|e| {
            NlabError::cache(format!("cannot open {}: {e}", path.display()))
        })?;
        let mut data = Vec::new();
        f.read_to_end(&mut data)?;
        if data.len() < CACHE_MAGIC.len() + 8 {
            return Err(NlabError::cache(format!(
                "{} is too short for a sieve cache",
                path.display()
            )));
        }
        if &data[..CACHE_MAGIC.len()] != CACHE_MAGIC {
            return Err(NlabError::cache(format!(
                "{} has wrong magic bytes",
                path.display()
            )));
        }
        let mut limit_bytes = [0u8; 8];
        limit_bytes.copy_from_slice(&data[CACHE_MAGIC.len()..CACHE_MAGIC.len() + 8]);
        let limit = u64::from_le_bytes(limit_bytes);
        if limit < 2 {
            return Err(NlabError::cache(format!(
                "{} declares limit {limit} < 2",
                path.display()
            )));
        }
        let body = &data[CACHE_MAGIC.len() + 8..];
        let nbytes = ((limit + 1).div_ceil(8)) as usize;
        if body.len() != nbytes {
            return Err(NlabError::cache(format!(
                "{}: expected {nbytes} bitset bytes for limit {limit}, found {}",
                path.display(),
                body.len()
            )));
        }

        let nwords = (limit + 1).div_ceil(64) as usize;
        let mut words = vec![0u64; nwords];
        for (i, chunk) in body.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        // Stray bits past `limit` would corrupt popcounts.
        let tail = nwords as u64 * 64 - (limit + 1);
        if tail > 0 {
            words[nwords - 1] &= u64::MAX >> tail;
        }

        let check_to = limit.min(CACHE_CHECK_PREFIX);
        let fresh = build_tables(check_to.max(2))?;
        for x in 0..=check_to {
            let loaded = words[(x / 64) as usize] >> (x % 64) & 1 == 1;
            if loaded != fresh.bit(x) {
                return Err(NlabError::cache(format!(
                    "{} failed validation: primality bit for {x} disagrees with a fresh sieve",
                    path.display()
                )));
            }
        }

        Ok(finish_tables(limit, words))
    }

    /// Default cache location for a given limit under `NLAB_CACHE_DIR`, or
    /// `None` when the variable is unset.
    pub fn default_cache_path(limit: u64) -> Option<PathBuf> {
        env::var_os("NLAB_CACHE_DIR")
            .map(|dir| Path::new(&dir).join(format!("nlab-sieve-{limit}.bits")))
    }
}
