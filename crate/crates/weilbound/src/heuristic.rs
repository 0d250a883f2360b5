//! Density heuristics: the log log estimate for Σ 1/p over a prime range,
//! the exact reciprocal sum at desk scale, and expected splits of n samples
//! against a threshold under a uniform-fractional-part model.

use crate::arith;
use crate::error::{Error, Result};
use crate::primes;

/// Exact summation is capped here; past it the log log estimate stands in.
pub const SUM_DESK_BOUND: u64 = 10_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicEstimate {
    pub lo: u64,
    pub hi: u64,
    pub loglog_value: f64,
    pub reciprocal_sum: Option<f64>,
}

/// ln ln(hi) − ln ln(lo), the expected value of Σ 1/p over primes in
/// (lo, hi). Needs ln(lo) > 1, hence lo ≥ 3.
pub fn loglog_estimate(lo: u64, hi: u64) -> Result<f64> {
    if lo < 3 {
        return Err(Error::LogDomain(lo));
    }
    if lo >= hi {
        return Err(Error::BadRange(lo, hi));
    }
    Ok((hi as f64).ln().ln() - (lo as f64).ln().ln())
}

/// Σ 1/p over primes p with lo < p < hi, by segmented sieve in fixed
/// ascending segments so the floating-point total is reproducible to the
/// summation order. Accuracy ±10⁻⁹.
pub fn reciprocal_prime_sum(lo: u64, hi: u64) -> Result<f64> {
    if hi > SUM_DESK_BOUND {
        return Err(Error::SumBoundTooLarge(hi, SUM_DESK_BOUND));
    }
    if lo > hi {
        return Err(Error::BadRange(lo, hi));
    }
    if hi - lo <= 1 {
        return Ok(0.0);
    }
    let (first, last) = (lo + 1, hi - 1);
    if last < 2 {
        return Ok(0.0);
    }
    let base = primes::sieve_primes(arith::isqrt_u64(last).max(3));
    const SEGMENT: u64 = 1 << 20;
    let mut sum = 0.0f64;
    let mut cursor = first.max(2);
    while cursor <= last {
        let end = last.min(cursor + (SEGMENT - 1));
        let chunk = primes::segmented_primes(cursor, end, &base).expect("base covers √last");
        for &p in &chunk.primes {
            sum += 1.0 / p as f64;
        }
        cursor = end + 1;
    }
    Ok(sum)
}

/// Expected (above, below) counts when n fractional parts compared against
/// the threshold are modeled as uniform on (0, 1).
pub fn expected_split(n: u64, threshold: f64) -> Result<(f64, f64)> {
    if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
        return Err(Error::BadThreshold(threshold));
    }
    let n = n as f64;
    Ok((n * (1.0 - threshold), n * threshold))
}

/// The log log value, optionally paired with the exact reciprocal sum.
pub fn estimate(lo: u64, hi: u64, exact_sum: bool) -> Result<HeuristicEstimate> {
    let loglog_value = loglog_estimate(lo, hi)?;
    let reciprocal_sum = if exact_sum {
        Some(reciprocal_prime_sum(lo, hi)?)
    } else {
        None
    };
    Ok(HeuristicEstimate {
        lo,
        hi,
        loglog_value,
        reciprocal_sum,
    })
}
