//! Comparative statistics report: per-domain medians and means against the
//! noise baseline, signal-to-noise ratios, noise-subtracted signals, and
//! the ratio between two domains.
//!
//! Inputs come either from computed samples (pipeline mode) or from a
//! fixture of pre-computed summary values (for example, externally
//! published statistics). Fixtures may carry reported `S - N` cells; the
//! report always recomputes the difference of medians itself and echoes
//! the reported value alongside, flagged when the two disagree.

use serde::{Deserialize, Serialize};

use crate::stats::{
    median_of_pairwise_differences, relatedness_ratio, signal_minus_noise, signal_to_noise,
    DistributionSummary, NoiseModel, ProbabilitySample,
};
use crate::{Error, Result};

/// Agreement tolerance between a reported cell and its recomputed value,
/// relative to the recomputed value.
const REPORTED_MATCH_RTOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryValues {
    pub median: f64,
    pub mean: f64,
}

/// Pre-computed inputs for one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFixture {
    pub name: String,
    pub median: f64,
    pub mean: f64,
    /// Externally reported `S - N` value to echo, if any.
    #[serde(default)]
    pub reported_s_minus_n: Option<f64>,
}

/// Fixture form of the whole report input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFixture {
    pub noise: SummaryValues,
    pub domains: Vec<DomainFixture>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRow {
    pub name: String,
    pub median: f64,
    pub mean: f64,
    /// Ratio of medians against the noise baseline; absent when the noise
    /// median is zero.
    #[serde(default)]
    pub s_over_n: Option<f64>,
    /// Difference of medians against the noise baseline (primary reading).
    pub s_minus_n: f64,
    /// Median of all pairwise `signal - noise` differences; only
    /// computable from full samples.
    #[serde(default)]
    pub s_minus_n_pairwise: Option<f64>,
    /// Externally reported cell, echoed from the fixture.
    #[serde(default)]
    pub reported_s_minus_n: Option<f64>,
    /// Whether the reported cell agrees with the recomputed difference.
    #[serde(default)]
    pub reported_matches_computed: Option<bool>,
}

/// Ratio of noise-subtracted signals between the first two domains, under
/// both readings where available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub numerator: String,
    pub denominator: String,
    /// From the recomputed differences of medians; absent when the
    /// denominator is zero.
    #[serde(default)]
    pub from_computed: Option<f64>,
    /// From the reported cells, where both were supplied.
    #[serde(default)]
    pub from_reported: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub noise: SummaryValues,
    pub domains: Vec<DomainRow>,
    /// Present when the report covers at least two domains; computed for
    /// the first pair in input order (first / second).
    #[serde(default)]
    pub ratio: Option<RatioRow>,
}

fn noise_summary(values: &SummaryValues) -> DistributionSummary {
    DistributionSummary { median: values.median, mean: values.mean, count: 0, zero_fraction: 0.0 }
}

fn build_rows(
    noise: SummaryValues,
    domains: Vec<(DomainFixture, Option<f64>)>,
) -> Result<StatsReport> {
    if domains.is_empty() {
        return Err(Error::Config("the report needs at least one domain".into()));
    }
    let noise_dist = noise_summary(&noise);
    let mut rows = Vec::new();
    for (fixture, pairwise) in domains {
        let signal = DistributionSummary {
            median: fixture.median,
            mean: fixture.mean,
            count: 0,
            zero_fraction: 0.0,
        };
        let s_minus_n = signal_minus_noise(&signal, &noise_dist);
        let reported_matches_computed = fixture.reported_s_minus_n.map(|reported| {
            let scale = s_minus_n.abs().max(f64::MIN_POSITIVE);
            (reported - s_minus_n).abs() / scale <= REPORTED_MATCH_RTOL
        });
        rows.push(DomainRow {
            name: fixture.name,
            median: fixture.median,
            mean: fixture.mean,
            s_over_n: signal_to_noise(&signal, &noise_dist).ok(),
            s_minus_n,
            s_minus_n_pairwise: pairwise,
            reported_s_minus_n: fixture.reported_s_minus_n,
            reported_matches_computed,
        });
    }

    let ratio = if rows.len() >= 2 {
        let (a, b) = (&rows[0], &rows[1]);
        Some(RatioRow {
            numerator: a.name.clone(),
            denominator: b.name.clone(),
            from_computed: relatedness_ratio(a.s_minus_n, b.s_minus_n).ok(),
            from_reported: match (a.reported_s_minus_n, b.reported_s_minus_n) {
                (Some(x), Some(y)) => relatedness_ratio(x, y).ok(),
                _ => None,
            },
        })
    } else {
        None
    };

    Ok(StatsReport { noise, domains: rows, ratio })
}

/// Builds the report from pre-computed summary values.
pub fn report_from_fixture(fixture: &SummaryFixture) -> Result<StatsReport> {
    build_rows(
        fixture.noise,
        fixture.domains.iter().cloned().map(|d| (d, None)).collect(),
    )
}

/// Builds the report from full samples: one probability sample per domain
/// plus the noise model. Includes the pairwise-difference reading of
/// `S - N`.
pub fn report_from_samples(
    domains: &[(String, ProbabilitySample)],
    noise: &NoiseModel,
) -> Result<StatsReport> {
    let mut rows = Vec::new();
    for (name, sample) in domains {
        let summary = crate::stats::summarize(sample)?;
        let pairwise = median_of_pairwise_differences(sample, &noise.sample)?;
        rows.push((
            DomainFixture {
                name: name.clone(),
                median: summary.median,
                mean: summary.mean,
                reported_s_minus_n: None,
            },
            Some(pairwise),
        ));
    }
    build_rows(SummaryValues { median: noise.median_p0, mean: noise.mean_p0 }, rows)
}

impl StatsReport {
    /// Plain-text rendering with aligned columns.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        rows.push(vec![
            "group".into(),
            "median".into(),
            "mean".into(),
            "s_over_n".into(),
            "s_minus_n".into(),
            "s_minus_n_pairwise".into(),
            "reported_s_minus_n".into(),
        ]);
        let num = |v: f64| format!("{v:.6e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "-".into());
        rows.push(vec![
            "noise".into(),
            num(self.noise.median),
            num(self.noise.mean),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
        ]);
        for d in &self.domains {
            let mut reported = opt(d.reported_s_minus_n);
            if d.reported_matches_computed == Some(false) {
                reported.push_str(" (differs from computed)");
            }
            rows.push(vec![
                d.name.clone(),
                num(d.median),
                num(d.mean),
                d.s_over_n.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                num(d.s_minus_n),
                opt(d.s_minus_n_pairwise),
                reported,
            ]);
        }

        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| format!("{cell:<width$}", width = widths[c]))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        if let Some(r) = &self.ratio {
            out.push('\n');
            out.push_str(&format!("ratio {} / {}:", r.numerator, r.denominator));
            if let Some(v) = r.from_computed {
                out.push_str(&format!(" {v:.4} (computed)"));
            }
            if let Some(v) = r.from_reported {
                out.push_str(&format!(" {v:.4} (from reported cells)"));
            }
            out.push('\n');
        }
        out
    }
}
