//! Digit statistics of concatenation constants and an exact piecewise
//! interpolant of the prime-counting function.
//!
//! The crate has two halves that share one segmented prime sieve
//! ([`primes`]):
//!
//! * **Digit streams and block censuses.** [`digits`] concatenates the
//!   base-g expansions of integer sequences — most interestingly the
//!   prime-counting sequence and the primes themselves — and [`blocks`]
//!   counts length-k blocks in the resulting stream with the overlapping
//!   convention (occurrences may share digits, so `131` appears twice in
//!   `13131`), reporting frequencies against the uniform reference.
//!
//! * **An exact interpolant of the prime-counting staircase.** [`svfun`]
//!   builds, in exact rational arithmetic, a piecewise-quadratic function
//!   whose floor is the prime-counting function and whose derivative is
//!   controlled by prime gaps; its construction can be certified point by
//!   point. [`eta`] samples logarithmic growth ratios of that function and
//!   its derivative together with explicit sandwich bounds.
//!
//! [`report`] renders results as CSV, JSON, or markdown, and [`cli`]
//! exposes everything as a deterministic command-line tool.

pub mod blocks;
pub mod cli;
pub mod digits;
pub mod error;
pub mod eta;
pub mod primes;
pub mod report;
pub mod svfun;

pub use error::{NlabError, Result};
