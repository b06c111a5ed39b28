//! Render results as CSV, JSON, or markdown.
//!
//! CSV and JSON carry floats at full round-trip precision; markdown rounds
//! to 6 significant digits. All renderers are deterministic: the same
//! input yields byte-identical output.

use serde::Serialize;

use crate::blocks::FrequencyReport;
use crate::eta::{EtaSample, EtaTarget};
use crate::primes::GapStats;

/// Output syntax selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Md,
}

/// Format with 6 significant digits (the precision used in tables).
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Render a block- or leading-digit-frequency report.
pub fn render_frequency(report: &FrequencyReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("block,count,frequency\n");
            for row in &report.rows {
                out.push_str(&format!("{},{},{}\n", row.block, row.count, row.frequency));
            }
            out
        }
        OutputFormat::Json => json(report),
        OutputFormat::Md => {
            let mut out = String::from("| block | count | frequency |\n| --- | --- | --- |\n");
            for row in &report.rows {
                out.push_str(&format!(
                    "| {} | {} | {} |\n",
                    row.block,
                    row.count,
                    sig6(row.frequency)
                ));
            }
            out.push_str(&format!(
                "\nscanned: {}\ndenominator: {}\nreference: {}\nmax deviation: {}\n",
                report.n_digits,
                report.denominator,
                sig6(report.reference),
                sig6(report.max_deviation)
            ));
            out
        }
    }
}

#[derive(Serialize)]
struct EtaRun<'a> {
    target: EtaTarget,
    big_m: f64,
    samples: &'a [EtaSample],
}

/// Render a log-ratio sweep.
pub fn render_eta(
    samples: &[EtaSample],
    target: EtaTarget,
    big_m: f64,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("x,value,lower,upper,target\n");
            for s in samples {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.x,
                    s.value,
                    s.lower_bound,
                    s.upper_bound,
                    s.target.token()
                ));
            }
            out
        }
        OutputFormat::Json => json(&EtaRun {
            target,
            big_m,
            samples,
        }),
        OutputFormat::Md => {
            let mut out = String::from("| x | value | lower | upper |\n| --- | --- | --- | --- |\n");
            for s in samples {
                out.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    sig6(s.x),
                    sig6(s.value),
                    sig6(s.lower_bound),
                    sig6(s.upper_bound)
                ));
            }
            out.push_str(&format!(
                "\ntarget: {}\nbig M: {}\n",
                target.token(),
                sig6(big_m)
            ));
            out
        }
    }
}

#[derive(Serialize)]
struct GapRun<'a> {
    limit: u64,
    #[serde(flatten)]
    stats: &'a GapStats,
}

/// Render gap-ratio statistics.
pub fn render_gap_stats(stats: &GapStats, limit: u64, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => match &stats.ratio_series {
            Some(series) => {
                let mut out = String::from("m,p,gap,ratio\n");
                for r in series {
                    out.push_str(&format!("{},{},{},{}\n", r.m, r.p, r.gap, r.ratio));
                }
                out
            }
            None => format!(
                "limit,max_ratio,argmax_m\n{},{},{}\n",
                limit, stats.max_ratio, stats.argmax_m
            ),
        },
        OutputFormat::Json => json(&GapRun { limit, stats }),
        OutputFormat::Md => {
            let mut out = format!(
                "limit: {}\ngaps scanned: m = {}..={}\nmax ratio: {}\nat gap index: {}\n",
                limit,
                stats.m_min,
                stats.m_max,
                sig6(stats.max_ratio),
                stats.argmax_m
            );
            if let Some(series) = &stats.ratio_series {
                out.push_str("\n| m | p | gap | ratio |\n| --- | --- | --- | --- |\n");
                for r in series {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} |\n",
                        r.m,
                        r.p,
                        r.gap,
                        sig6(r.ratio)
                    ));
                }
            }
            out
        }
    }
}

/// Render a construction-check report; always JSON, since the nested
/// pass/fail structure has no natural tabular form.
pub fn render_check(report: &crate::svfun::CheckReport) -> String {
    json(report)
}

#[derive(Serialize)]
pub struct SieveSummary {
    pub limit: u64,
    pub primes: u64,
    pub largest_prime: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<String>,
}

/// Render a sieve summary.
pub fn render_sieve(summary: &SieveSummary, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!(
            "limit,primes,largest_prime\n{},{},{}\n",
            summary.limit, summary.primes, summary.largest_prime
        ),
        OutputFormat::Json => json(summary),
        OutputFormat::Md => {
            let mut out = format!(
                "limit: {}\nprimes: {}\nlargest prime: {}\n",
                summary.limit, summary.primes, summary.largest_prime
            );
            if let Some(cache) = &summary.cache {
                out.push_str(&format!("cache: {cache}\n"));
            }
            out
        }
    }
}
