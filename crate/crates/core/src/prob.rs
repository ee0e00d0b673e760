//! Size-adjusted matching probabilities between author lists.
//!
//! Given two deduplicated lists with `n` and `m` entries (`n <= m`) and a
//! per-comparison matching probability `p`, the expected number of common
//! entries is approximated by
//!
//! ```text
//! E(k) = n * (1 - (1 - p)^m)
//! ```
//!
//! and inverting that expression for an observed common count `k` gives the
//! probability estimate
//!
//! ```text
//! p = 1 - (1 - k/n)^(1/m)
//! ```
//!
//! Both are evaluated through `ln_1p`/`exp_m1` so that probabilities of the
//! order of 1e-6 and exponents of the order of 1e-5 keep full precision;
//! the naive `powf` forms lose everything past the first digit there.
//!
//! The formulas are not symmetric in `n` and `m`: they assume `n <= m`.
//! Both functions re-order their size arguments so callers cannot
//! accidentally bias a whole comparison matrix by passing sizes backwards.

use crate::{Error, Result};

fn ordered(a: u64, b: u64) -> (u64, u64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Expected number of common entries between lists of sizes `n` and `m`
/// when each comparison matches with probability `p`.
///
/// Returns a value in `[0, min(n, m)]`. `p` outside `[0, 1]` is a domain
/// error.
pub fn expected_matches(n: u64, m: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let (n, m) = ordered(n, m);
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    // 1 - (1-p)^m == -expm1(m * ln(1-p))
    Ok(-(n as f64) * f64::exp_m1(m as f64 * f64::ln_1p(-p)))
}

/// Per-comparison matching probability estimated from an observed common
/// count `k` between lists of sizes `n` and `m`.
///
/// `k` is real-valued: the pipeline passes integer set-intersection counts,
/// but the un-rounded path is kept open so that the inversion against
/// [`expected_matches`] is exact. Sizes are re-ordered internally so the
/// smaller list plays the role of `n`. `k` must lie in `[0, min(n, m)]`;
/// a larger `k` is impossible under set semantics and signals corrupted
/// input. Zero-size lists make the estimate undefined.
pub fn estimate_p(k: f64, n: u64, m: u64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::Undefined(format!(
            "matching probability is undefined for list sizes {n} and {m}"
        )));
    }
    let (n, m) = ordered(n, m);
    if !k.is_finite() || k < 0.0 || k > n as f64 {
        return Err(Error::Domain(format!(
            "common count {k} outside [0, {n}] for list sizes {n} <= {m}"
        )));
    }
    // 1 - (1 - k/n)^(1/m) == -expm1(ln(1 - k/n) / m)
    Ok(-f64::exp_m1(f64::ln_1p(-k / n as f64) / m as f64))
}
