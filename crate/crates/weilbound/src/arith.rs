//! Exact integer kernels: floor square roots at machine and arbitrary
//! precision, the Hasse quantity m = ⌊2√q⌋, and exact comparisons of the
//! fractional part {2√q} against two algebraic thresholds. No floating
//! point participates in any result.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polysieve::PolyFamily;

/// Which side of a threshold the fractional part {2√q} falls on.
///
/// There is no `Equal` case: for non-square q the fractional part is a
/// quadratic irrational, while the thresholds are irrationals of degree 2
/// and 3 over Q that do not lie in Q(√q), so coincidence is impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdSide {
    Above,
    Below,
}

impl std::fmt::Display for ThresholdSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdSide::Above => write!(f, "above"),
            ThresholdSide::Below => write!(f, "below"),
        }
    }
}

/// ⌊√n⌋ for 64-bit n.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // The f64 seed is within a few ulps of the true root; walk to the floor.
    let mut r = (n as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

/// ⌊√n⌋ for 128-bit n.
pub fn isqrt_u128(n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return isqrt_u64(n as u64) as u128;
    }
    // Seed from the top 64 bits: with n = t·2^shift + rest (shift even),
    // (isqrt(t)+1)·2^(shift/2) strictly exceeds √n, so guarded Newton
    // descends monotonically onto the floor.
    let bits = 128 - n.leading_zeros();
    let shift = (bits - 64 + 1) & !1;
    let t = (n >> shift) as u64;
    let mut x = ((isqrt_u64(t) as u128) + 1) << (shift / 2);
    loop {
        let y = (x + n / x) >> 1;
        if y >= x {
            break;
        }
        x = y;
    }
    debug_assert!(x * x <= n && (x + 1).checked_mul(x + 1).is_none_or(|s| s > n));
    x
}

/// ⌊√n⌋ for arbitrary-precision n.
pub fn isqrt(n: &BigUint) -> BigUint {
    let bits = n.bits();
    if bits <= 64 {
        return BigUint::from(isqrt_u64(n.to_u64().unwrap()));
    }
    if bits <= 128 {
        return BigUint::from(isqrt_u128(n.to_u128().unwrap()));
    }
    let shift = (bits - 64 + 1) & !1;
    let t = (n >> shift).to_u64().unwrap();
    let mut x = BigUint::from(isqrt_u64(t) + 1) << (shift / 2);
    loop {
        let y = (&x + n / &x) >> 1;
        if y >= x {
            break;
        }
        x = y;
    }
    debug_assert!(&x * &x <= *n);
    debug_assert!({
        let x1 = &x + 1u32;
        &x1 * &x1 > *n
    });
    x
}

/// Whether n is a perfect square.
pub fn is_perfect_square(n: &BigUint) -> bool {
    let r = isqrt(n);
    &r * &r == *n
}

/// The Hasse quantity m = ⌊2√q⌋, computed exactly as ⌊√(4q)⌋.
pub fn hasse_m(q: &BigUint) -> Result<BigUint> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(isqrt(&(q << 2u32)))
}

/// Exact comparison of {2√q} against (√5−1)/2 for non-square q.
///
/// With m = ⌊2√q⌋ and B = 2m−1, the condition {2√q} > (√5−1)/2 rearranges
/// to √(16q) > B + √5; both sides are positive, and squaring twice while
/// tracking the intermediate sign reduces it to the integer predicate
/// D > 0 ∧ D² > 20B² with D = 16q − B² − 5. Equality D² = 20B² would make
/// √5 rational, so the predicate is total on non-squares.
pub fn frac_gt_golden(q: &BigUint) -> Result<ThresholdSide> {
    let m = hasse_m(q)?;
    if is_perfect_square(q) {
        return Err(Error::PerfectSquare(q.clone()));
    }
    let b = (&m << 1u32) - 1u32;
    let b2 = &b * &b;
    let lhs = q << 4u32;
    let rhs = &b2 + 5u32;
    if lhs <= rhs {
        return Ok(ThresholdSide::Below);
    }
    let d = &lhs - &rhs;
    let d2 = &d * &d;
    let bound = 20u32 * &b2;
    debug_assert_ne!(d2, bound);
    Ok(if d2 > bound {
        ThresholdSide::Above
    } else {
        ThresholdSide::Below
    })
}

/// Exact comparison of {2√q} against τ = 1 − 4cos²(3π/7) for non-square q.
///
/// τ = 2cos(π/7) − 1: 4cos²(3π/7) = 2 + 2cos(6π/7) = 2 − 2cos(π/7).
/// Substituting c = (t+1)/2 into 8c³ − 4c² − 4c + 1 = 0, the minimal
/// polynomial of cos(π/7), shows τ is the unique root of t³ + 2t² − t − 1
/// in (0, 1); τ ≈ 0.8019377358.
///
/// Both quantities are bracketed between consecutive integer multiples of
/// 10^−d: {2√q} via a scaled integer square root, τ via bisection on the
/// scaled cubic. Starting at d = 30, d doubles until the brackets are
/// disjoint; termination is guaranteed because equality is impossible
/// (τ has degree 3 over Q and {2√q} degree 2).
pub fn frac_ge_tau(q: &BigUint) -> Result<ThresholdSide> {
    let m = hasse_m(q)?;
    if is_perfect_square(q) {
        return Err(Error::PerfectSquare(q.clone()));
    }
    let mut digits = 30u32;
    loop {
        let t = tau_floor_scaled(digits);
        let s = BigUint::from(10u32).pow(digits);
        // ⌊{2√q}·10^d⌋ = ⌊√(4q·10^2d)⌋ − m·10^d
        let f = isqrt(&((q << 2u32) * (&s * &s))) - &m * &s;
        if f > t {
            return Ok(ThresholdSide::Above);
        }
        if f < t {
            return Ok(ThresholdSide::Below);
        }
        digits *= 2;
    }
}

/// ⌊τ·10^d⌋, cached per digit count.
///
/// Bisection on the integer-scaled cubic: with S = 10^d, the sign of
/// N(x) = x³ + 2Sx² − S²x − S³ at x matches the sign of the cubic at x/S,
/// and N(x) < 0 ⟺ x²(x + 2S) < S²(x + S). N is negative on [0, τS) and
/// positive on (τS, S], so the final bracket (lo, lo+1) satisfies
/// lo/S < τ < (lo+1)/S.
fn tau_floor_scaled(digits: u32) -> BigUint {
    static CACHE: OnceLock<Mutex<HashMap<u32, BigUint>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&digits) {
        return hit.clone();
    }
    let s = BigUint::from(10u32).pow(digits);
    let s2 = &s * &s;
    let mut lo = BigUint::zero();
    let mut hi = s.clone();
    while &hi - &lo > BigUint::from(1u32) {
        let mid = (&lo + &hi) >> 1u32;
        let left = &mid * &mid * (&mid + (&s << 1u32));
        let right = &s2 * (&mid + &s);
        debug_assert_ne!(left, right);
        if left < right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    cache.lock().unwrap().insert(digits, lo.clone());
    lo
}

/// τ as a double, for heuristic (inexact) consumers only.
pub fn tau_approx() -> f64 {
    let cubic = |t: f64| t * t * t + 2.0 * t * t - t - 1.0;
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// (√5−1)/2 as a double, for heuristic (inexact) consumers only.
pub fn golden_fraction_approx() -> f64 {
    (5.0f64.sqrt() - 1.0) / 2.0
}

/// The non-negative x with family(x) = q, if q is representable.
///
/// For x² + c: x = ⌊√(q−c)⌋ checked exactly. For x² + x + c: completing
/// the square gives (2x+1)² = 4q − 4c + 1, so the discriminant must be an
/// odd perfect square. x = 0 is admitted; callers applying a side condition
/// such as r ≤ x enforce it themselves.
pub fn solve_quadratic_rep(q: &BigUint, family: PolyFamily) -> Option<BigUint> {
    let (b, c) = family.coeffs();
    let c = BigUint::from(c);
    if b == 0 {
        if *q < c {
            return None;
        }
        let d = q - &c;
        let x = isqrt(&d);
        return (&x * &x == d).then_some(x);
    }
    let four_q = q << 2u32;
    let sub = (&c << 2u32) - 1u32;
    if four_q < sub {
        return None;
    }
    let disc = four_q - sub;
    let s = isqrt(&disc);
    if &s * &s != disc || (&s % 2u32) != BigUint::from(1u32) {
        return None;
    }
    Some((s - 1u32) >> 1u32)
}
