//! Distribution statistics and the name-homonymy noise floor.
//!
//! Matching probabilities between areas that share no real community can
//! only come from distinct people with identical last name and initials.
//! Comparing every area of one domain against every area of an unrelated
//! domain therefore samples the homonymy noise; its median and mean form
//! the baseline the within-domain signal is compared against.
//!
//! Zeros are kept in every sample: pairs with very small author lists
//! yield exactly zero matches and form a delta-like spike at zero that is
//! part of the measured distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::ingest::AreaAuthorList;
use crate::overlap::{pair_overlap, OverlapMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    WithinDomain,
    CrossDomain,
}

/// Matching probabilities for a set of compared pairs, with the pair
/// labels kept parallel to the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySample {
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub pair_labels: Vec<(String, String)>,
}

/// Median, mean, count and the exact-zero fraction of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub median: f64,
    pub mean: f64,
    pub count: usize,
    pub zero_fraction: f64,
}

/// Homonymy baseline: the cross-domain probability distribution with its
/// median and mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub median_p0: f64,
    pub mean_p0: f64,
    pub sample: ProbabilitySample,
}

impl NoiseModel {
    /// Builds the model from a cross-domain sample; median and mean stay
    /// recomputable from the embedded sample.
    pub fn from_sample(sample: ProbabilitySample) -> Result<Self> {
        if sample.provenance != Provenance::CrossDomain {
            return Err(Error::Config("noise model requires a cross-domain sample".into()));
        }
        let summary = summarize(&sample)?;
        Ok(NoiseModel { median_p0: summary.median, mean_p0: summary.mean, sample })
    }
}

/// Applies the probability estimate to every cross pair between two
/// unrelated domains. All `|a| * |b|` values are kept, zeros included.
/// Sharing an area name across domains is a configuration error.
pub fn cross_noise_sample(
    domain_a: &[AreaAuthorList],
    domain_b: &[AreaAuthorList],
) -> Result<ProbabilitySample> {
    if domain_a.is_empty() || domain_b.is_empty() {
        return Err(Error::Config("both domains must contain at least one area".into()));
    }
    let names_a: BTreeSet<&str> = domain_a.iter().map(|l| l.area_name()).collect();
    for list in domain_b {
        if names_a.contains(list.area_name()) {
            return Err(Error::Config(format!(
                "area {:?} appears in both domains",
                list.area_name()
            )));
        }
    }

    let pairs: Vec<(usize, usize)> = (0..domain_a.len())
        .flat_map(|i| (0..domain_b.len()).map(move |j| (i, j)))
        .collect();
    let cells = pairs
        .into_par_iter()
        .map(|(i, j)| pair_overlap(&domain_a[i], &domain_b[j]))
        .collect::<Result<Vec<_>>>()?;

    Ok(ProbabilitySample {
        values: cells.iter().map(|c| c.p_hat).collect(),
        provenance: Provenance::CrossDomain,
        pair_labels: cells.into_iter().map(|c| (c.area_a, c.area_b)).collect(),
    })
}

/// Extracts the upper-triangle probabilities of a within-domain matrix.
pub fn within_sample(matrix: &OverlapMatrix) -> ProbabilitySample {
    ProbabilitySample {
        values: matrix.cells.iter().map(|c| c.p_hat).collect(),
        provenance: Provenance::WithinDomain,
        pair_labels: matrix.cells.iter().map(|c| (c.area_a.clone(), c.area_b.clone())).collect(),
    }
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        // mean of the two central order statistics
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Median (even counts: mean of the two central order statistics), mean,
/// count and exact-zero fraction. Empty samples are an error.
pub fn summarize(sample: &ProbabilitySample) -> Result<DistributionSummary> {
    if sample.values.is_empty() {
        return Err(Error::Undefined("cannot summarize an empty sample".into()));
    }
    let mut sorted = sample.values.clone();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len();
    let zeros = sorted.iter().filter(|v| **v == 0.0).count();
    Ok(DistributionSummary {
        median: median_of_sorted(&sorted),
        mean: sorted.iter().sum::<f64>() / count as f64,
        count,
        zero_fraction: zeros as f64 / count as f64,
    })
}

/// Ratio of the two medians, the signal-to-noise analog.
pub fn signal_to_noise(signal: &DistributionSummary, noise: &DistributionSummary) -> Result<f64> {
    if noise.median <= 0.0 {
        return Err(Error::Undefined(format!(
            "signal-to-noise is undefined for noise median {}",
            noise.median
        )));
    }
    Ok(signal.median / noise.median)
}

/// Difference of the two medians; may be negative, never clamped.
pub fn signal_minus_noise(signal: &DistributionSummary, noise: &DistributionSummary) -> f64 {
    signal.median - noise.median
}

/// Median of all pairwise differences between a signal and a noise sample
/// — the alternative reading of a "median of S - N". Costs
/// `|signal| * |noise|` and is only defined when both samples are
/// non-empty.
pub fn median_of_pairwise_differences(
    signal: &ProbabilitySample,
    noise: &ProbabilitySample,
) -> Result<f64> {
    if signal.values.is_empty() || noise.values.is_empty() {
        return Err(Error::Undefined("pairwise differences need non-empty samples".into()));
    }
    let mut diffs: Vec<f64> = signal
        .values
        .iter()
        .flat_map(|s| noise.values.iter().map(move |n| s - n))
        .collect();
    diffs.sort_by(f64::total_cmp);
    Ok(median_of_sorted(&diffs))
}

/// Ratio of two noise-subtracted signals.
pub fn relatedness_ratio(a_minus_n: f64, b_minus_n: f64) -> Result<f64> {
    if b_minus_n == 0.0 {
        return Err(Error::Undefined("relatedness ratio with a zero denominator".into()));
    }
    Ok(a_minus_n / b_minus_n)
}

/// Equal-width histogram with explicit under/overflow accounting.
///
/// Bins are left-closed right-open. With an explicit range, values at or
/// above the upper edge land in the overflow bin and values below the
/// lower edge in the underflow bin. With the default range `[0, max]` the
/// maximum itself belongs to the top bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "lo", "hi", "count"]).expect("in-memory write");
        w.write_record(["underflow", "", "", &self.underflow.to_string()]).expect("in-memory write");
        for (i, count) in self.counts.iter().enumerate() {
            w.write_record([
                "bin",
                &self.bin_edges[i].to_string(),
                &self.bin_edges[i + 1].to_string(),
                &count.to_string(),
            ])
            .expect("in-memory write");
        }
        w.write_record(["overflow", "", "", &self.overflow.to_string()]).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Bins a sample into `bin_count` equal-width bins over `range`
/// (default: `[0, max(sample)]`, top-inclusive). Empty samples and empty
/// ranges are errors.
pub fn histogram(
    sample: &ProbabilitySample,
    bin_count: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram> {
    if sample.values.is_empty() {
        return Err(Error::Undefined("cannot bin an empty sample".into()));
    }
    if bin_count == 0 {
        return Err(Error::Domain("at least one bin is required".into()));
    }
    let (lo, hi, top_inclusive) = match range {
        Some((lo, hi)) => {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::Domain(format!("empty histogram range [{lo}, {hi})")));
            }
            (lo, hi, false)
        }
        None => {
            let max = sample.values.iter().cloned().fold(f64::NAN, f64::max);
            if max > 0.0 {
                (0.0, max, true)
            } else {
                // all-zero sample: any unit range keeps the zeros in bin 0
                (0.0, 1.0, false)
            }
        }
    };

    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0u64; bin_count];
    let mut underflow = 0u64;
    let mut overflow = 0u64;
    for &v in &sample.values {
        if v < lo {
            underflow += 1;
        } else if v >= hi {
            if top_inclusive && v == hi {
                counts[bin_count - 1] += 1;
            } else {
                overflow += 1;
            }
        } else {
            let idx = (((v - lo) / width) as usize).min(bin_count - 1);
            counts[idx] += 1;
        }
    }
    let bin_edges = (0..=bin_count)
        .map(|i| if i == bin_count { hi } else { lo + i as f64 * width })
        .collect();
    Ok(Histogram { bin_edges, counts, underflow, overflow, total: sample.values.len() as u64 })
}

/// Which binomial bound to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalSide {
    /// Equal-tailed interval at the given confidence.
    TwoSided,
    /// Lower bound pinned at zero; all the error budget on the upper tail.
    UpperOnly,
}

/// Exact (Clopper-Pearson) binomial confidence interval for an observed
/// error count out of a number of spot-checked samples.
///
/// `errors_found = 0` gives a lower bound of exactly zero;
/// `errors_found = samples_checked` gives an upper bound of exactly one.
pub fn spotcheck_interval(
    errors_found: u64,
    samples_checked: u64,
    confidence: f64,
    side: IntervalSide,
) -> Result<(f64, f64)> {
    if samples_checked == 0 {
        return Err(Error::Domain("at least one checked sample is required".into()));
    }
    if errors_found > samples_checked {
        return Err(Error::Domain(format!(
            "{errors_found} errors cannot come from {samples_checked} samples"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence {confidence} outside (0, 1)")));
    }
    let alpha = 1.0 - confidence;
    let (lower_tail, upper_tail) = match side {
        IntervalSide::TwoSided => (alpha / 2.0, alpha / 2.0),
        IntervalSide::UpperOnly => (0.0, alpha),
    };
    let k = errors_found;
    let n = samples_checked;

    let lower = if k == 0 || lower_tail == 0.0 {
        0.0
    } else {
        // theta with P(X >= k; theta) = lower_tail, i.e.
        // P(X <= k-1; theta) = 1 - lower_tail
        bisect(|theta| binomial_cdf(k - 1, n, theta), 1.0 - lower_tail)
    };
    let upper = if k == n {
        1.0
    } else {
        // theta with P(X <= k; theta) = upper_tail
        bisect(|theta| binomial_cdf(k, n, theta), upper_tail)
    };
    Ok((lower, upper))
}

/// Solves `f(theta) = target` for `theta` in [0, 1]; `f` must be monotone
/// decreasing (binomial tail probabilities are).
fn bisect<F: Fn(f64) -> f64>(f: F, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn binomial_cdf(k: u64, n: u64, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 1.0;
    }
    if theta >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let ln_theta = theta.ln();
    let ln_one_minus = f64::ln_1p(-theta);
    let n_f = n as f64;
    let mut acc = 0.0;
    for i in 0..=k {
        let i_f = i as f64;
        let ln_choose = ln_gamma(n_f + 1.0) - ln_gamma(i_f + 1.0) - ln_gamma(n_f - i_f + 1.0);
        acc += (ln_choose + i_f * ln_theta + (n_f - i_f) * ln_one_minus).exp();
    }
    acc.min(1.0)
}

/// Lanczos approximation (g = 7, 9 coefficients), accurate to ~1e-13 for
/// positive arguments. Coefficients as published, beyond f64 precision.
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection; not hit by binomial arguments but kept total
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
