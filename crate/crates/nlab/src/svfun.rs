//! An exact piecewise interpolant of the prime-counting function.
//!
//! The function f is built so that `floor(f(x)) = pi(x)` everywhere, f is
//! continuously differentiable, strictly increasing, and `f(p_m) = m` at
//! every prime. Three fixed polynomial pieces cover `[0, 3]`:
//!
//! * `(4x^2 + 12x + 39)/96` on `[0, 3/2]` (so `f(0) = 13/32`),
//! * `(3x^2 - 8x + 8)/4` on `[3/2, 2]`,
//! * `x - 1` on `[2, 3]`.
//!
//! On each prime interval `[p_m, p_{m+1}]` (m >= 2) the derivative is a
//! two-piece linear profile h with `h(p_m) = 1/g_{m-1}` and
//! `h(p_{m+1}) = 1/g_m`, where `g_m = p_{m+1} - p_m`. The middle knot sits
//! `eps` (gap widening), `delta` (gap narrowing), or nominally `eps` (equal
//! gaps, where the profile is constant) past `p_m`, and its value is chosen
//! so the profile integrates to exactly 1 over the interval - which makes
//! `f(p_{m+1}) = m + 1` and the whole construction seamless.
//!
//! All arithmetic here is exact rational arithmetic; floating point appears
//! only in callers that sample f for asymptotics. [`SvFunction::check_construction`]
//! certifies the invariants on demand and reports per-check outcomes.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NlabError, Result};
use crate::primes::PrimeTables;

fn rat_u(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a rational from `a/b` form or from an exact decimal like `0.04`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || NlabError::usage(format!("cannot parse {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: BigInt = if int.is_empty() { BigInt::zero() } else { int.parse().map_err(|_| bad())? };
        let negative = int.is_negative() || s.starts_with('-');
        let digits: BigInt = fracpart.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(fracpart.len() as u32);
        let mag = int.abs() * &scale + digits;
        let v = BigRational::new(mag, scale);
        return Ok(if negative { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// The two knot-placement parameters. Both must lie strictly in (0, 1);
/// there, the middle knot value stays positive on every interval, so f
/// remains strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvParams {
    eps: BigRational,
    delta: BigRational,
}

impl SvParams {
    pub fn new(eps: BigRational, delta: BigRational) -> Result<Self> {
        for (name, v) in [("eps", &eps), ("delta", &delta)] {
            if !(v > &BigRational::zero() && v < &BigRational::one()) {
                return Err(NlabError::usage(format!(
                    "{name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        Ok(SvParams { eps, delta })
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }
}

impl Default for SvParams {
    /// `eps = delta = 1/25`.
    fn default() -> Self {
        SvParams {
            eps: frac(1, 25),
            delta: frac(1, 25),
        }
    }
}

/// Which parameter places the knot on an interval, decided by how the prime
/// gap changes across it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalCase {
    /// Gap widens (`g_{m-1} < g_m`): knot at `p_m + eps`, profile descends.
    Eps,
    /// Gap narrows (`g_{m-1} > g_m`): knot at `p_m + delta`, profile ascends.
    Delta,
    /// Equal gaps: the profile is the constant `1/g_m`.
    Null,
}

/// The derivative profile of one prime interval `[p_lo, p_hi]`: linear from
/// `(p_lo, a)` to `(knot, mid)`, then linear from `(knot, mid)` to
/// `(p_hi, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvCoefficients {
    pub m: u64,
    pub p_lo: u64,
    pub p_hi: u64,
    /// `g_{m-1} = p_m - p_{m-1}`.
    pub gap_prev: u64,
    /// `g_m = p_{m+1} - p_m`.
    pub gap: u64,
    pub case: IntervalCase,
    pub knot: BigRational,
    /// Profile value at `p_lo`: `1/g_{m-1}`.
    pub a: BigRational,
    /// Profile value at `p_hi`: `1/g_m`.
    pub b: BigRational,
    /// Profile value at the knot.
    pub mid: BigRational,
}

/// Compute the derivative profile of interval `m` (`m >= 2`). Errors if
/// `p_{m+1}` is not sieved. The knot value is computed twice, through an
/// expanded and a reduced formula, and any disagreement is an internal
/// error.
pub fn interval_coeffs(
    tables: &PrimeTables,
    m: u64,
    params: &SvParams,
) -> Result<SvCoefficients> {
    if m < 2 {
        return Err(NlabError::usage(
            "interpolation intervals start at m = 2 (the interval [3, 5])",
        ));
    }
    let p_prev = tables.nth_prime(m - 1)?;
    let p_lo = tables.nth_prime(m)?;
    let p_hi = tables.nth_prime(m + 1)?;
    let gap_prev = p_lo - p_prev;
    let gap = p_hi - p_lo;

    let case = match gap_prev.cmp(&gap) {
        std::cmp::Ordering::Less => IntervalCase::Eps,
        std::cmp::Ordering::Greater => IntervalCase::Delta,
        std::cmp::Ordering::Equal => IntervalCase::Null,
    };
    let par = match case {
        IntervalCase::Eps | IntervalCase::Null => params.eps.clone(),
        IntervalCase::Delta => params.delta.clone(),
    };

    let a = rat_u(gap_prev).recip();
    let b = rat_u(gap).recip();
    let g = rat_u(gap);
    let knot = rat_u(p_lo) + &par;

    // Reduced form: mid = par (b - a) / g + b.
    let mid = &par * (&b - &a) / &g + &b;
    // Expanded form, in terms of the knot's absolute position.
    let expanded = &knot * (&b - &a) / &g + (rat_u(p_lo) * (&a - &b) / &g + &b);
    if mid != expanded {
        return Err(NlabError::internal(format!(
            "knot value formulas disagree on interval {m}: {mid} vs {expanded}"
        )));
    }
    if case == IntervalCase::Null && mid != b {
        return Err(NlabError::internal(format!(
            "constant profile expected on interval {m}"
        )));
    }
    debug_assert!(knot < rat_u(p_hi));

    Ok(SvCoefficients {
        m,
        p_lo,
        p_hi,
        gap_prev,
        gap,
        case,
        knot,
        a,
        b,
        mid,
    })
}

/// Linear interpolation through `(x0, y0)` and `(x1, y1)`.
fn line_at(
    x0: &BigRational,
    y0: &BigRational,
    x1: &BigRational,
    y1: &BigRational,
    x: &BigRational,
) -> BigRational {
    y0 + (x - x0) * (y1 - y0) / (x1 - x0)
}

/// Evaluate the derivative profile at `x` in `[p_lo, p_hi]`.
pub fn h_eval(coeffs: &SvCoefficients, x: &BigRational) -> Result<BigRational> {
    let lo = rat_u(coeffs.p_lo);
    let hi = rat_u(coeffs.p_hi);
    if x < &lo || x > &hi {
        return Err(NlabError::out_of_range(format!(
            "{x} outside interval [{}, {}]",
            coeffs.p_lo, coeffs.p_hi
        )));
    }
    if x <= &coeffs.knot {
        Ok(line_at(&lo, &coeffs.a, &coeffs.knot, &coeffs.mid, x))
    } else {
        Ok(line_at(&coeffs.knot, &coeffs.mid, &hi, &coeffs.b, x))
    }
}

/// Integral of the profile over its whole interval; exactly 1 for a sound
/// construction.
pub fn interval_integral(coeffs: &SvCoefficients) -> BigRational {
    let lo = rat_u(coeffs.p_lo);
    let hi = rat_u(coeffs.p_hi);
    let half = frac(1, 2);
    let first = (&coeffs.knot - &lo) * (&coeffs.a + &coeffs.mid) * &half;
    let second = (&hi - &coeffs.knot) * (&coeffs.mid + &coeffs.b) * &half;
    first + second
}

/// Outcome of one certification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    /// Number of points or intervals examined.
    pub checked: u64,
    /// First failing point, when any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

/// Full certification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub m_max: u64,
    pub samples: u64,
    pub seed: u64,
    pub eps: String,
    pub delta: String,
    pub passed: bool,
    pub checks: Vec<CheckItem>,
}

impl CheckReport {
    /// Turn a failed report into an invariant-violation error.
    pub fn ensure(&self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(NlabError::invariant(format!(
            "construction checks failed: {}",
            failed.join(", ")
        )))
    }
}

/// The interpolant over a sieved range, with lazily cached per-interval
/// profiles. Cheap to share across threads; profile computation is
/// idempotent, so concurrent fills agree.
pub struct SvFunction {
    tables: Arc<PrimeTables>,
    params: SvParams,
    cache: RwLock<HashMap<u64, Arc<SvCoefficients>>>,
}

impl SvFunction {
    pub fn new(tables: Arc<PrimeTables>, params: SvParams) -> Self {
        SvFunction {
            tables,
            params,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn tables(&self) -> &Arc<PrimeTables> {
        &self.tables
    }

    pub fn params(&self) -> &SvParams {
        &self.params
    }

    /// Largest x in the function's domain: the last sieved prime.
    pub fn domain_end(&self) -> u64 {
        self.tables.largest_prime()
    }

    /// The profile of interval `m`, computed once and cached.
    pub fn coeffs(&self, m: u64) -> Result<Arc<SvCoefficients>> {
        if let Some(c) = self.cache.read().expect("cache lock").get(&m) {
            return Ok(Arc::clone(c));
        }
        let computed = Arc::new(interval_coeffs(&self.tables, m, &self.params)?);
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(
            cache.entry(m).or_insert(computed),
        ))
    }

    /// Replace interval `m`'s cached knot value with a broken one. Only for
    /// exercising failure paths of the certification checks.
    #[doc(hidden)]
    pub fn inject_bad_mid(&self, m: u64) -> Result<()> {
        let good = interval_coeffs(&self.tables, m, &self.params)?;
        let mut bad = good;
        bad.mid += frac(1, 10);
        self.cache
            .write()
            .expect("cache lock")
            .insert(m, Arc::new(bad));
        Ok(())
    }

    fn check_domain(&self, x: &BigRational) -> Result<()> {
        if x < &BigRational::zero() {
            return Err(NlabError::out_of_range(format!("{x} is negative")));
        }
        if x > &rat_u(self.domain_end()) {
            return Err(NlabError::out_of_range(format!(
                "{x} is beyond the last sieved prime {}",
                self.domain_end()
            )));
        }
        Ok(())
    }

    /// Index of the prime interval containing non-integer or composite `x`,
    /// plus `Some(m)` instead when `x` is exactly the m-th prime.
    fn locate(&self, x: &BigRational) -> Result<(u64, Option<u64>)> {
        let floor = x.floor().to_integer().to_u64().ok_or_else(|| {
            NlabError::internal(format!("floor of {x} does not fit in u64"))
        })?;
        let m = self.tables.pi(floor)?;
        if x.is_integer() && self.tables.is_prime(floor)? {
            Ok((m, Some(m)))
        } else {
            Ok((m, None))
        }
    }

    /// Evaluate f exactly.
    pub fn f_eval(&self, x: &BigRational) -> Result<BigRational> {
        self.check_domain(x)?;
        if x <= &frac(3, 2) {
            return Ok((frac(4, 96) * x * x) + frac(12, 96) * x + frac(39, 96));
        }
        if x <= &rat_u(2) {
            return Ok((frac(3, 4) * x * x) - rat_u(2) * x + rat_u(2));
        }
        if x <= &rat_u(3) {
            return Ok(x - BigRational::one());
        }
        let (m, at_prime) = self.locate(x)?;
        if at_prime.is_some() {
            return Ok(rat_u(m));
        }
        let c = self.coeffs(m)?;
        let lo = rat_u(c.p_lo);
        let hx = h_eval(&c, x)?;
        let half = frac(1, 2);
        let tail = if x <= &c.knot {
            (x - &lo) * (&c.a + &hx) * &half
        } else {
            (&c.knot - &lo) * (&c.a + &c.mid) * &half + (x - &c.knot) * (&c.mid + &hx) * &half
        };
        Ok(rat_u(m) + tail)
    }

    /// Evaluate f' exactly.
    pub fn f_prime_eval(&self, x: &BigRational) -> Result<BigRational> {
        self.check_domain(x)?;
        if x <= &frac(3, 2) {
            return Ok((frac(8, 96) * x) + frac(12, 96));
        }
        if x <= &rat_u(2) {
            return Ok((frac(6, 4) * x) - rat_u(2));
        }
        if x <= &rat_u(3) {
            return Ok(BigRational::one());
        }
        let (m, at_prime) = self.locate(x)?;
        if at_prime.is_some() {
            // Both adjacent profiles give 1/g_{m-1} here; the left interval
            // exists even when x is the last sieved prime.
            return Ok(self.coeffs(m - 1)?.b.clone());
        }
        let c = self.coeffs(m)?;
        h_eval(&c, x)
    }

    /// Certify the construction over intervals `2..=m_max` with `samples`
    /// seeded random evaluation points. All checks run even if an early one
    /// fails; the report lists each outcome.
    pub fn check_construction(&self, m_max: u64, samples: u64, seed: u64) -> Result<CheckReport> {
        if m_max < 2 {
            return Err(NlabError::usage("m_max must be at least 2"));
        }
        let p_end = self.tables.nth_prime(m_max + 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checks = Vec::new();

        // Exact random rationals int + num/den in [0, p_end], endpoints
        // added deliberately.
        let mut points: Vec<BigRational> = Vec::with_capacity(samples as usize + 2);
        points.push(BigRational::zero());
        points.push(rat_u(p_end));
        for _ in 0..samples {
            let int = rng.random_range(0..p_end);
            let den = rng.random_range(1..=1000u64);
            let num = rng.random_range(0..den);
            points.push(rat_u(int) + BigRational::new(BigInt::from(num), BigInt::from(den)));
        }

        checks.push(self.check_formula_agreement(m_max));
        checks.push(self.check_unit_integrals(m_max));
        checks.push(self.check_seams(m_max));
        checks.push(self.check_knot_positivity(m_max));
        checks.push(self.check_floor_identity(&points));
        checks.push(self.check_derivative_positive(m_max, &points));
        checks.push(self.check_bound_chain(&points));

        let passed = checks.iter().all(|c| c.passed);
        Ok(CheckReport {
            m_max,
            samples,
            seed,
            eps: self.params.eps.to_string(),
            delta: self.params.delta.to_string(),
            passed,
            checks,
        })
    }

    /// Expanded and reduced knot-value formulas agree on every interval.
    /// Recomputed from scratch so a poisoned cache cannot mask a mismatch.
    fn check_formula_agreement(&self, m_max: u64) -> CheckItem {
        let mut item = CheckItem {
            name: "knot-formula-agreement".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        for m in 2..=m_max {
            item.checked += 1;
            // interval_coeffs itself compares the two forms.
            if let Err(e) = interval_coeffs(&self.tables, m, &self.params) {
                item.passed = false;
                item.counterexample = Some(format!("interval {m}: {e}"));
                break;
            }
        }
        item
    }

    fn check_unit_integrals(&self, m_max: u64) -> CheckItem {
        let mut item = CheckItem {
            name: "unit-integral".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        for m in 2..=m_max {
            item.checked += 1;
            let integral = match self.coeffs(m) {
                Ok(c) => interval_integral(&c),
                Err(e) => {
                    item.passed = false;
                    item.counterexample = Some(format!("interval {m}: {e}"));
                    break;
                }
            };
            if !integral.is_one() {
                item.passed = false;
                item.counterexample =
                    Some(format!("interval {m}: integral {integral} != 1"));
                break;
            }
        }
        item
    }

    /// Value and derivative agree across every piece boundary: the three
    /// polynomial seams, every prime, and every knot.
    fn check_seams(&self, m_max: u64) -> CheckItem {
        let mut item = CheckItem {
            name: "seam-continuity".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        let fail = |item: &mut CheckItem, msg: String| {
            item.passed = false;
            if item.counterexample.is_none() {
                item.counterexample = Some(msg);
            }
        };

        // Polynomial seams at 3/2, 2, 3: left and right expressions.
        let seams: [(BigRational, BigRational, BigRational); 3] = [
            (frac(3, 2), frac(11, 16), frac(1, 4)),
            (rat_u(2), rat_u(1), rat_u(1)),
            (rat_u(3), rat_u(2), rat_u(1)),
        ];
        for (x, f_expect, fp_expect) in seams {
            item.checked += 1;
            match (self.f_eval(&x), self.f_prime_eval(&x)) {
                (Ok(f), Ok(fp)) => {
                    if f != f_expect || fp != fp_expect {
                        fail(&mut item, format!("seam at {x}: f = {f}, f' = {fp}"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => fail(&mut item, format!("seam at {x}: {e}")),
            }
        }

        for m in 2..=m_max {
            item.checked += 1;
            let c = match self.coeffs(m) {
                Ok(c) => c,
                Err(e) => {
                    fail(&mut item, format!("interval {m}: {e}"));
                    break;
                }
            };
            let lo = rat_u(c.p_lo);
            let hi = rat_u(c.p_hi);
            // f hits the exact integer at both interval ends.
            let lo_ok = self.f_eval(&lo).map(|v| v == rat_u(m)).unwrap_or(false);
            let hi_ok = self.f_eval(&hi).map(|v| v == rat_u(m + 1)).unwrap_or(false);
            if !(lo_ok && hi_ok) {
                fail(&mut item, format!("interval {m}: f misses an endpoint"));
            }
            // The previous profile ends where this one starts.
            if m > 2 {
                match self.coeffs(m - 1) {
                    Ok(prev) => {
                        let meets = h_eval(&prev, &lo).map(|v| v == c.a).unwrap_or(false);
                        if prev.b != c.a || !meets {
                            fail(&mut item, format!("derivative jumps at prime {}", c.p_lo));
                        }
                    }
                    Err(e) => fail(&mut item, format!("interval {}: {e}", m - 1)),
                }
            }
            // Both linear pieces meet the knot at its assigned value.
            let left = line_at(&lo, &c.a, &c.knot, &c.mid, &c.knot);
            let right = line_at(&c.knot, &c.mid, &hi, &c.b, &c.knot);
            if left != c.mid || right != c.mid {
                fail(&mut item, format!("knot mismatch on interval {m}"));
            }
        }
        item
    }

    /// The knot value stays strictly positive (and the knot inside its
    /// interval) for every profile; this is what bounds eps and delta.
    fn check_knot_positivity(&self, m_max: u64) -> CheckItem {
        let mut item = CheckItem {
            name: "knot-positivity".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        for m in 2..=m_max {
            item.checked += 1;
            match self.coeffs(m) {
                Ok(c) => {
                    let inside =
                        c.knot > rat_u(c.p_lo) && c.knot < rat_u(c.p_hi);
                    if !(c.mid.is_positive() && inside) {
                        item.passed = false;
                        item.counterexample =
                            Some(format!("interval {m}: knot {} value {}", c.knot, c.mid));
                        break;
                    }
                }
                Err(e) => {
                    item.passed = false;
                    item.counterexample = Some(format!("interval {m}: {e}"));
                    break;
                }
            }
        }
        item
    }

    /// `floor(f(x)) = pi(floor(x))` at every sample point.
    fn check_floor_identity(&self, points: &[BigRational]) -> CheckItem {
        let mut item = CheckItem {
            name: "floor-identity".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        for x in points {
            item.checked += 1;
            let expect = self
                .tables
                .pi(x.floor().to_integer().to_u64().unwrap_or(u64::MAX));
            let got = self.f_eval(x).map(|f| f.floor().to_integer());
            match (got, expect) {
                (Ok(got), Ok(expect)) if got == BigInt::from(expect) => {}
                (got, expect) => {
                    item.passed = false;
                    item.counterexample =
                        Some(format!("x = {x}: floor f = {got:?}, count = {expect:?}"));
                    break;
                }
            }
        }
        item
    }

    /// f' > 0 at samples, knots, and primes.
    fn check_derivative_positive(&self, m_max: u64, points: &[BigRational]) -> CheckItem {
        let mut item = CheckItem {
            name: "derivative-positive".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        let mut extra: Vec<BigRational> = Vec::new();
        for m in 2..=m_max {
            if let Ok(c) = self.coeffs(m) {
                extra.push(c.knot.clone());
                extra.push(rat_u(c.p_lo));
            }
        }
        for x in points.iter().chain(extra.iter()) {
            item.checked += 1;
            match self.f_prime_eval(x) {
                Ok(fp) if fp.is_positive() => {}
                Ok(fp) => {
                    item.passed = false;
                    item.counterexample = Some(format!("x = {x}: f' = {fp}"));
                    break;
                }
                Err(e) => {
                    item.passed = false;
                    item.counterexample = Some(format!("x = {x}: {e}"));
                    break;
                }
            }
        }
        item
    }

    /// Case-wise pinch on the derivative: on `[0, 3]` it stays within
    /// `[1/8, 1]`; on a widening interval within `[mid, a]`; on a narrowing
    /// one within `[a, mid]`; on an equal-gap interval it equals `1/g_m`.
    fn check_bound_chain(&self, points: &[BigRational]) -> CheckItem {
        let mut item = CheckItem {
            name: "derivative-bound-chain".into(),
            passed: true,
            checked: 0,
            counterexample: None,
        };
        for x in points {
            item.checked += 1;
            let fp = match self.f_prime_eval(x) {
                Ok(fp) => fp,
                Err(e) => {
                    item.passed = false;
                    item.counterexample = Some(format!("x = {x}: {e}"));
                    break;
                }
            };
            let ok = if x <= &rat_u(3) {
                fp >= frac(1, 8) && fp <= rat_u(1)
            } else {
                match self.locate(x) {
                    Ok((m, Some(_))) => {
                        // At a prime the derivative is shared by both
                        // intervals; it equals 1/g_{m-1} by construction.
                        self.coeffs(m - 1).map(|c| fp == c.b).unwrap_or(false)
                    }
                    Ok((m, None)) => match self.coeffs(m) {
                        Ok(c) => match c.case {
                            IntervalCase::Eps => fp >= c.mid && fp <= c.a,
                            IntervalCase::Delta => fp >= c.a && fp <= c.mid,
                            IntervalCase::Null => fp == c.b,
                        },
                        Err(_) => false,
                    },
                    Err(_) => false,
                }
            };
            if !ok {
                item.passed = false;
                item.counterexample = Some(format!("x = {x}: f' = {fp} escapes its case bounds"));
                break;
            }
        }
        item
    }
}
