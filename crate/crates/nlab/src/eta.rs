//! Log-ratio asymptotics of the interpolant.
//!
//! For a positive increasing function F, the growth exponent of interest is
//! `lim ln F(x) / ln x`. This module samples that ratio for f and f' along
//! with certified two-sided bounds:
//!
//! * For f (from x = 60184 on): `x/(ln x - 1) <= pi(x) <= f(x) <= pi(x) + 1
//!   <= x/(ln x - 1.1) + 1`, so `ln f(x)/ln x` is pinched toward 1.
//! * For f' (from x = 5 on): `1/(M ln^2 p) <= f'(x) <= 0.51` with `p` the
//!   largest prime `<= x` and M dominating every sieved gap ratio
//!   `g_m / ln^2 p_m`. A prime-free variant replaces `ln p` by a nested
//!   logarithmic expression in x alone; both pinch `ln f'(x)/ln x` toward 0.
//! * A square-root gap premise (`g_m <= M sqrt(p_m) ln p_m`) yields the
//!   lower bound `1/(M sqrt(p) ln p)` instead, whose log ratio tends to
//!   -1/2 rather than 0 - sampling it shows such bounds cannot pinch.
//!
//! Samplers verify their own sandwich and fail with an invariant violation
//! if a bound is broken. Values are f64; the underlying f and f' are still
//! evaluated exactly before conversion.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{NlabError, Result};
use crate::primes::PrimeTables;
use crate::svfun::SvFunction;

/// Numerical slack for sandwich assertions on f64 log ratios.
pub const SANDWICH_SLACK: f64 = 1e-12;

/// Smallest x for which the f sandwich bounds are certified.
pub const ETA_F_MIN_X: f64 = 60_184.0;

/// Smallest x for which the f' bounds are certified.
pub const ETA_FPRIME_MIN_X: f64 = 5.0;

/// Smallest x for the square-root-premise demonstration.
pub const RH_LOWER_MIN_X: f64 = 3.0;

/// Floor of the gap-ratio constant M, and the safety factor applied to the
/// empirical maximum when choosing M automatically.
const BIG_M_FLOOR: f64 = 2.2;
const BIG_M_SAFETY: f64 = 1.05;

/// Which log ratio a sample describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EtaTarget {
    #[serde(rename = "f")]
    F,
    #[serde(rename = "fprime")]
    Fprime,
    #[serde(rename = "rh")]
    RhLower,
}

impl EtaTarget {
    pub fn token(self) -> &'static str {
        match self {
            EtaTarget::F => "f",
            EtaTarget::Fprime => "fprime",
            EtaTarget::RhLower => "rh",
        }
    }
}

/// One sampled log ratio with its certified bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaSample {
    pub x: f64,
    pub value: f64,
    #[serde(rename = "lower")]
    pub lower_bound: f64,
    #[serde(rename = "upper")]
    pub upper_bound: f64,
    pub target: EtaTarget,
}

/// `M = max(2.2, 1.05 * empirical maximum of g_m / ln^2 p_m)`.
pub fn auto_big_m(tables: &PrimeTables) -> Result<f64> {
    let stats = tables.cramer_stats()?;
    Ok(BIG_M_FLOOR.max(BIG_M_SAFETY * stats.max_ratio))
}

fn check_x(x: f64, min: f64, what: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(NlabError::usage(format!("{what}: x must be finite")));
    }
    if x < min {
        return Err(NlabError::threshold(format!(
            "{what} is certified for x >= {min}, got {x}"
        )));
    }
    Ok(())
}

fn to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| NlabError::usage(format!("{x} is not a finite number")))
}

fn as_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("rational fits in f64 range")
}

/// `ln` of the prime-free upper bound on the largest prime `<= x`, built by
/// nesting the prime-counting upper bound `x/(ln x - 1.1)` three deep.
fn nested_prime_log(x: f64) -> f64 {
    let d = x.ln() - 1.1;
    let t1 = x / d;
    let t2 = x * t1.ln() / d;
    let t3 = x * t2.ln() / d;
    t3.ln()
}

/// Sample `ln f(x) / ln x` with its sandwich. Requires `x >= 60184` and x
/// within the sieved domain.
pub fn eta_f_sample(f: &SvFunction, x: f64) -> Result<EtaSample> {
    check_x(x, ETA_F_MIN_X, "the f log-ratio sandwich")?;
    let fx = f.f_eval(&to_rational(x)?)?;
    let lx = x.ln();
    let value = as_f64(&fx).ln() / lx;
    let lower_bound = (x / (lx - 1.0)).ln() / lx;
    let upper_bound = (x / (lx - 1.1) + 1.0).ln() / lx;
    let sample = EtaSample {
        x,
        value,
        lower_bound,
        upper_bound,
        target: EtaTarget::F,
    };
    ensure_sandwich(&sample)?;
    Ok(sample)
}

fn check_big_m_dominates(tables: &PrimeTables, big_m: f64) -> Result<()> {
    let stats = tables.cramer_stats()?;
    if big_m < stats.max_ratio {
        return Err(NlabError::usage(format!(
            "M = {big_m} is below the empirical gap-ratio maximum {} (at m = {})",
            stats.max_ratio, stats.argmax_m
        )));
    }
    Ok(())
}

/// Sample `ln f'(x) / ln x` with the prime-free nested-log lower bound and
/// the `ln 0.51 / ln x` upper bound. Requires `x >= 5` and M at least the
/// empirical gap-ratio maximum.
pub fn eta_fprime_sample(f: &SvFunction, x: f64, big_m: f64) -> Result<EtaSample> {
    check_x(x, ETA_FPRIME_MIN_X, "the f' log-ratio sandwich")?;
    check_big_m_dominates(f.tables(), big_m)?;
    let fp = f.f_prime_eval(&to_rational(x)?)?;
    let lx = x.ln();
    let value = as_f64(&fp).ln() / lx;
    let lp = nested_prime_log(x);
    let lower_bound = (1.0 / (big_m * lp * lp)).ln() / lx;
    let upper_bound = 0.51f64.ln() / lx;
    let sample = EtaSample {
        x,
        value,
        lower_bound,
        upper_bound,
        target: EtaTarget::Fprime,
    };
    ensure_sandwich(&sample)?;
    Ok(sample)
}

/// The raw prime-based pinch on f' at one point: verify
/// `1/(M ln^2 p) <= f'(x) <= 0.51` with p the largest prime `<= x`, and
/// return f'(x). Same preconditions as [`eta_fprime_sample`].
pub fn cramer_fprime_sandwich(f: &SvFunction, x: f64, big_m: f64) -> Result<f64> {
    check_x(x, ETA_FPRIME_MIN_X, "the f' pinch")?;
    check_big_m_dominates(f.tables(), big_m)?;
    let fp = as_f64(&f.f_prime_eval(&to_rational(x)?)?);
    let p = f.tables().nth_prime(f.tables().pi(x.floor() as u64)?)?;
    let lp = (p as f64).ln();
    let lower = 1.0 / (big_m * lp * lp);
    if fp < lower - SANDWICH_SLACK || fp > 0.51 + SANDWICH_SLACK {
        return Err(NlabError::invariant(format!(
            "f'({x}) = {fp} escapes [{lower}, 0.51]"
        )));
    }
    Ok(fp)
}

/// Sample the log ratio of the square-root-premise lower bound
/// `1/(M sqrt(p) ln p)`. No sandwich is asserted: the point of this sample
/// is that the bound's ratio tends to -1/2, not 0.
pub fn rh_lower_sample(tables: &PrimeTables, x: f64, big_m: f64) -> Result<EtaSample> {
    check_x(x, RH_LOWER_MIN_X, "the square-root-premise bound")?;
    if !(big_m > 0.0) {
        return Err(NlabError::usage("M must be positive"));
    }
    let p = tables.nth_prime(tables.pi(x.floor() as u64)?)?;
    let pf = p as f64;
    let value = (1.0 / (big_m * pf.sqrt() * pf.ln())).ln() / x.ln();
    Ok(EtaSample {
        x,
        value,
        lower_bound: value,
        upper_bound: 0.51f64.ln() / x.ln(),
        target: EtaTarget::RhLower,
    })
}

fn ensure_sandwich(s: &EtaSample) -> Result<()> {
    if s.value < s.lower_bound - SANDWICH_SLACK || s.value > s.upper_bound + SANDWICH_SLACK {
        return Err(NlabError::invariant(format!(
            "log-ratio sandwich broken at x = {}: {} outside [{}, {}]",
            s.x, s.value, s.lower_bound, s.upper_bound
        )));
    }
    Ok(())
}

/// Sample a target on a geometric grid of `points >= 2` points from `x_lo`
/// to `x_hi` inclusive. Each sample carries (and asserts) its own bounds.
pub fn eta_sweep(
    f: &SvFunction,
    target: EtaTarget,
    x_lo: f64,
    x_hi: f64,
    points: u64,
    big_m: f64,
) -> Result<Vec<EtaSample>> {
    if points < 2 {
        return Err(NlabError::usage("a sweep needs at least 2 points"));
    }
    if !(x_lo.is_finite() && x_hi.is_finite() && x_lo > 0.0 && x_lo <= x_hi) {
        return Err(NlabError::usage(format!(
            "bad sweep range [{x_lo}, {x_hi}]"
        )));
    }
    let ratio = (x_hi / x_lo).powf(1.0 / (points - 1) as f64);
    let mut samples = Vec::with_capacity(points as usize);
    for i in 0..points {
        let x = if i == points - 1 {
            x_hi
        } else {
            x_lo * ratio.powi(i as i32)
        };
        samples.push(match target {
            EtaTarget::F => eta_f_sample(f, x)?,
            EtaTarget::Fprime => eta_fprime_sample(f, x, big_m)?,
            EtaTarget::RhLower => rh_lower_sample(f.tables(), x, big_m)?,
        });
    }
    Ok(samples)
}
