//! Monte Carlo simulation of the exact sequential matching process.
//!
//! The closed form `E(k) = n(1 - (1-p)^m)` ignores that the larger list
//! shrinks by one every time a match is found. The trial simulated here is
//! the process itself: each element of the smaller list in turn scans the
//! remaining elements of the larger list, every comparison matches
//! independently with probability `p`, and the first match consumes one
//! element of the larger list and moves on to the next small-list element
//! (single matches only). Comparing trial means against the closed form
//! quantifies the approximation error.
//!
//! [`simulate_trial_comparisons`] performs the per-comparison Bernoulli
//! process literally and is the reference. [`simulate_trial`] draws the
//! same match-count distribution through per-element and geometric
//! shortcuts (the per-element match probability is `1 - (1-p)^m_remaining`
//! and gaps between matches at fixed list size are geometric); the tests
//! check distributional equivalence of the two, and
//! [`exact_expected_matches`] gives a closed recursion for the process mean
//! as a non-statistical ground truth on small instances.
//!
//! Randomness is deterministic: trials are grouped into fixed chunks of
//! [`STREAM_CHUNK`], and chunk `c` of a run with seed `s` draws from an
//! independent stream seeded by `mix(s, c)`. Results are therefore
//! bit-identical for a given `(config, seed)` no matter how chunks are
//! scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;

use crate::{prob, Error, Result};

/// Trials per random stream; also the parallel work unit.
pub const STREAM_CHUNK: u64 = 8192;

/// Cap on `n * m` for the exact recursion.
pub const EXACT_RECURSION_GUARD: u64 = 10_000_000;

/// Above this per-element match probability a plain Bernoulli draw per
/// element is cheaper than a geometric skip.
const ELEMENTWISE_Q: f64 = 0.25;

const INV_2_53: f64 = 1.0 / 9007199254740992.0;

fn f64_closed_open(bits: u64) -> f64 {
    (bits >> 11) as f64 * INV_2_53 // [0, 1)
}

fn f64_open_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * INV_2_53 // (0, 1]
}

/// SplitMix64 finalizer; used to derive independent sub-seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_rng(seed: u64, chunk: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_add(chunk.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Simulation parameters. Construction orders the sizes so `n <= m` and
/// validates the probability and trial count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n: u64, m: u64, p: f64, trials: u64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        if trials == 0 {
            return Err(Error::Domain("at least one trial is required".into()));
        }
        Ok(McConfig { n: n.min(m), m: n.max(m), p, trials, seed })
    }
}

/// Aggregates of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McResult {
    pub mean_matches: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Closed-form expectation for the same `(n, m, p)`.
    pub analytic_expected: f64,
    /// `|mean - analytic| / analytic`; undefined when the analytic value
    /// is zero.
    pub relative_error: Option<f64>,
}

/// Precomputed per-cell state for the fast trial.
struct TrialSampler {
    n: u64,
    m: u64,
    q0: f64,
    /// `q` per remaining larger-list size; skipped for very large `m`
    /// where it is recomputed on demand instead.
    q_table: Option<Vec<f64>>,
    ln_one_minus_p: f64,
    /// Probability that a fresh trial produces no match at all.
    tail0: f64,
}

const MAX_Q_TABLE: u64 = 1 << 22;

impl TrialSampler {
    fn new(n: u64, m: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let (n, m) = (n.min(m), n.max(m));
        let ln_one_minus_p = f64::ln_1p(-p);
        let q_at = |j: u64| if j == 0 { 0.0 } else { -f64::exp_m1(j as f64 * ln_one_minus_p) };
        let q_table = if m < MAX_Q_TABLE {
            Some((0..=m).map(q_at).collect())
        } else {
            None
        };
        let q0 = q_at(m);
        let tail0 = if q0 >= 1.0 { 0.0 } else { (n as f64 * f64::ln_1p(-q0)).exp() };
        Ok(TrialSampler { n, m, q0, q_table, ln_one_minus_p, tail0 })
    }

    #[inline]
    fn q_at(&self, m_rem: u64) -> f64 {
        match &self.q_table {
            Some(t) => t[m_rem as usize],
            None => {
                if m_rem == 0 {
                    0.0
                } else {
                    -f64::exp_m1(m_rem as f64 * self.ln_one_minus_p)
                }
            }
        }
    }

    fn trial<R: RngCore>(&self, rng: &mut R) -> u64 {
        let n = self.n;
        let mut m_rem = self.m;
        let mut q = self.q0;
        let mut matches = 0u64;
        let mut i = 0u64;
        while i < n && m_rem > 0 {
            if q >= ELEMENTWISE_Q {
                let u = f64_closed_open(rng.next_u64());
                i += 1;
                if u < q {
                    matches += 1;
                    m_rem -= 1;
                    q = self.q_at(m_rem);
                }
            } else {
                if q <= 0.0 {
                    break;
                }
                let u = f64_open_closed(rng.next_u64());
                let rem = n - i;
                let ln_one_minus_q = f64::ln_1p(-q);
                let tail = if i == 0 && m_rem == self.m {
                    self.tail0
                } else {
                    (rem as f64 * ln_one_minus_q).exp()
                };
                if u < tail {
                    break; // no match among the remaining elements
                }
                let skip = (u.ln() / ln_one_minus_q).floor() + 1.0;
                if skip > rem as f64 {
                    break;
                }
                i += skip as u64;
                matches += 1;
                m_rem -= 1;
                q = self.q_at(m_rem);
            }
        }
        matches
    }
}

/// One trial of the sequential matching process, via the equivalent
/// per-element / geometric sampling. Returns the match count in
/// `[0, min(n, m)]`.
///
/// This allocates per call; for many trials over one `(n, m, p)` use
/// [`mc_expected_matches`].
pub fn simulate_trial<R: RngCore>(n: u64, m: u64, p: f64, rng: &mut R) -> Result<u64> {
    Ok(TrialSampler::new(n, m, p)?.trial(rng))
}

/// One trial of the sequential matching process, drawing every single
/// comparison as its own Bernoulli variable. This is the reference
/// implementation the fast path is tested against; cost is `O(n * m)`
/// draws.
pub fn simulate_trial_comparisons<R: RngCore>(n: u64, m: u64, p: f64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let (n, m) = (n.min(m), n.max(m));
    let mut m_rem = m;
    let mut matches = 0u64;
    for _ in 0..n {
        if m_rem == 0 {
            break;
        }
        for _ in 0..m_rem {
            if f64_closed_open(rng.next_u64()) < p {
                matches += 1;
                m_rem -= 1;
                break;
            }
        }
    }
    Ok(matches)
}

/// Runs `config.trials` independent trials and reports the mean match
/// count, its standard error, the closed-form expectation and the relative
/// error between the two. Bit-identical for identical configs, regardless
/// of thread count.
pub fn mc_expected_matches(config: &McConfig) -> Result<McResult> {
    let sampler = TrialSampler::new(config.n, config.m, config.p)?;
    let trials = config.trials;
    let chunks = trials.div_ceil(STREAM_CHUNK);

    // integer moments: associative reduction, deterministic under any schedule
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(config.seed, chunk);
            let lo = chunk * STREAM_CHUNK;
            let hi = (lo + STREAM_CHUNK).min(trials);
            let mut s = 0u64;
            let mut s2 = 0u128;
            for _ in lo..hi {
                let k = sampler.trial(&mut rng);
                s += k;
                s2 += (k as u128) * (k as u128);
            }
            (s, s2)
        })
        .reduce(|| (0u64, 0u128), |a, b| (a.0 + b.0, a.1 + b.1));

    let t = trials as f64;
    let mean = sum as f64 / t;
    let variance = if trials > 1 {
        ((sum_sq as f64) - t * mean * mean).max(0.0) / (t - 1.0)
    } else {
        0.0
    };
    let analytic = prob::expected_matches(config.n, config.m, config.p)?;
    Ok(McResult {
        mean_matches: mean,
        std_error: (variance / t).sqrt(),
        trials,
        analytic_expected: analytic,
        relative_error: if analytic > 0.0 { Some((mean - analytic).abs() / analytic) } else { None },
    })
}

/// Exact expectation of the sequential matching process by dynamic
/// programming over `E(i, j) = q_j (1 + E(i-1, j-1)) + (1 - q_j) E(i-1, j)`
/// with `q_j = 1 - (1-p)^j`. Guarded to `n * m <=` [`EXACT_RECURSION_GUARD`];
/// larger instances must use [`mc_expected_matches`].
pub fn exact_expected_matches(n: u64, m: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let (n, m) = (n.min(m), n.max(m));
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    if n.saturating_mul(m) > EXACT_RECURSION_GUARD {
        return Err(Error::Capacity(format!(
            "exact recursion needs n*m <= {EXACT_RECURSION_GUARD}, got {n}*{m}; use the Monte Carlo estimate"
        )));
    }
    let ln_one_minus_p = f64::ln_1p(-p);
    let q: Vec<f64> = (0..=m)
        .map(|j| if j == 0 { 0.0 } else { -f64::exp_m1(j as f64 * ln_one_minus_p) })
        .collect();
    let mut prev = vec![0.0f64; m as usize + 1];
    let mut cur = vec![0.0f64; m as usize + 1];
    for _ in 1..=n {
        for j in 1..=m as usize {
            cur[j] = q[j] * (1.0 + prev[j - 1]) + (1.0 - q[j]) * prev[j];
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m as usize])
}

/// How many trials to run per grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrialPolicy {
    /// The same trial count for every cell.
    Fixed(u64),
    /// Pick the cell's trial count so the relative standard error of the
    /// mean stays below `target`. Uses the Poisson bound `var <= mean`,
    /// which holds for this process, so `trials = 1 / (target^2 * mean)`.
    TargetRelSe { target: f64, floor: u64, cap: u64 },
}

impl TrialPolicy {
    /// Policy meeting a 1%-of-mean standard error bound with margin.
    pub fn default_grid() -> Self {
        TrialPolicy::TargetRelSe { target: 0.009, floor: 2000, cap: 4_000_000_000 }
    }

    fn trials_for(&self, analytic_mean: f64) -> u64 {
        match *self {
            TrialPolicy::Fixed(t) => t.max(1),
            TrialPolicy::TargetRelSe { target, floor, cap } => {
                if analytic_mean <= 0.0 {
                    return floor.max(1);
                }
                let t = (1.0 / (target * target * analytic_mean)).ceil();
                (t as u64).clamp(floor.max(1), cap)
            }
        }
    }
}

/// One cell of the error-surface report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    /// Exact recursion value; `None` where the size guard forbids it.
    pub exact: Option<f64>,
    /// `|analytic - mc_mean| / analytic`; `None` when analytic is zero.
    pub rel_err_mc: Option<f64>,
    pub rel_err_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub cells: usize,
    pub total_trials: u64,
    pub max_rel_err_mc: Option<f64>,
    pub worst_mc_cell: Option<(u64, u64, f64)>,
    pub max_rel_err_exact: Option<f64>,
    pub worst_exact_cell: Option<(u64, u64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    pub summary: GridSummary,
}

impl GridReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "m", "p", "analytic", "mc_mean", "mc_stderr", "trials", "exact", "rel_err_mc", "rel_err_exact"])
            .expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                c.n.to_string(),
                c.m.to_string(),
                c.p.to_string(),
                c.analytic.to_string(),
                c.mc_mean.to_string(),
                c.mc_stderr.to_string(),
                c.trials.to_string(),
                opt(c.exact),
                opt(c.rel_err_mc),
                opt(c.rel_err_exact),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Sweeps every `(n, m, p)` combination with `n <= m`, comparing the
/// closed form against the simulated process (and against the exact
/// recursion where the guard allows). Cell `i` runs under the derived seed
/// `mix(seed, i)`, so the report is deterministic and cells may run in
/// parallel.
pub fn validate_grid(
    n_values: &[u64],
    m_values: &[u64],
    p_values: &[f64],
    policy: &TrialPolicy,
    seed: u64,
) -> Result<GridReport> {
    if n_values.is_empty() || m_values.is_empty() || p_values.is_empty() {
        return Err(Error::Config("grid value lists must be non-empty".into()));
    }
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
    }

    let mut combos = Vec::new();
    for &n in n_values {
        for &m in m_values {
            if n <= m {
                combos.push((n, m));
            }
        }
    }

    let specs: Vec<(u64, u64, f64)> = combos
        .iter()
        .flat_map(|&(n, m)| p_values.iter().map(move |&p| (n, m, p)))
        .collect();

    let cells = specs
        .par_iter()
        .enumerate()
        .map(|(idx, &(n, m, p))| -> Result<GridCell> {
            let analytic = prob::expected_matches(n, m, p)?;
            let trials = policy.trials_for(analytic);
            let config = McConfig::new(n, m, p, trials, derive_seed(seed, idx as u64))?;
            let mc = mc_expected_matches(&config)?;
            let exact = match exact_expected_matches(n, m, p) {
                Ok(v) => Some(v),
                Err(Error::Capacity(_)) => None,
                Err(e) => return Err(e),
            };
            let rel = |v: f64| if analytic > 0.0 { Some((analytic - v).abs() / analytic) } else { None };
            Ok(GridCell {
                n,
                m,
                p,
                analytic,
                mc_mean: mc.mean_matches,
                mc_stderr: mc.std_error,
                trials,
                exact,
                rel_err_mc: rel(mc.mean_matches),
                rel_err_exact: exact.and_then(rel),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = GridSummary {
        cells: cells.len(),
        total_trials: cells.iter().map(|c| c.trials).sum(),
        max_rel_err_mc: None,
        worst_mc_cell: None,
        max_rel_err_exact: None,
        worst_exact_cell: None,
    };
    for c in &cells {
        if let Some(e) = c.rel_err_mc {
            if summary.max_rel_err_mc.is_none_or(|cur| e > cur) {
                summary.max_rel_err_mc = Some(e);
                summary.worst_mc_cell = Some((c.n, c.m, c.p));
            }
        }
        if let Some(e) = c.rel_err_exact {
            if summary.max_rel_err_exact.is_none_or(|cur| e > cur) {
                summary.max_rel_err_exact = Some(e);
                summary.worst_exact_cell = Some((c.n, c.m, c.p));
            }
        }
    }
    Ok(GridReport { cells, summary })
}
