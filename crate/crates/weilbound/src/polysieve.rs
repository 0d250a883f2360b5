//! Counting primes of quadratic-polynomial form by a three-stage sieve:
//! stage 1 sieves primes to bound^(1/4), stage 2 extends to bound^(1/2)
//! keeping only primes that can divide the family's values and pairing each
//! with its polynomial roots, stage 3 marks x values at those roots so that
//! unmarked survivors have prime values. The module also exhausts proper
//! prime powers of each form.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith::{isqrt_u64, solve_quadratic_rep};
use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, mulmod_u64, powmod_u64, segmented_primes, sieve_primes};

/// Monic quadratic x² + bx + c tracked by the sieve and the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyFamily {
    /// x² + 1
    X2P1,
    /// x² + x + 1
    X2PXP1,
    /// x² + x + 2 (always even, so only powers of 2 arise; never sieved)
    X2PXP2,
    /// x² + 2
    X2P2,
    /// x² + x + 3
    X2PXP3,
}

impl PolyFamily {
    /// The families with odd values, the only ones worth sieving.
    pub const SIEVABLE: [PolyFamily; 4] = [
        PolyFamily::X2P1,
        PolyFamily::X2PXP1,
        PolyFamily::X2P2,
        PolyFamily::X2PXP3,
    ];

    /// Coefficients (b, c) of x² + bx + c.
    pub fn coeffs(self) -> (u64, u64) {
        match self {
            PolyFamily::X2P1 => (0, 1),
            PolyFamily::X2PXP1 => (1, 1),
            PolyFamily::X2PXP2 => (1, 2),
            PolyFamily::X2P2 => (0, 2),
            PolyFamily::X2PXP3 => (1, 3),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PolyFamily::X2P1 => "x2+1",
            PolyFamily::X2PXP1 => "x2+x+1",
            PolyFamily::X2PXP2 => "x2+x+2",
            PolyFamily::X2P2 => "x2+2",
            PolyFamily::X2PXP3 => "x2+x+3",
        }
    }

    pub fn parse(s: &str) -> Option<PolyFamily> {
        match s {
            "x2+1" => Some(PolyFamily::X2P1),
            "x2+x+1" => Some(PolyFamily::X2PXP1),
            "x2+x+2" => Some(PolyFamily::X2PXP2),
            "x2+2" => Some(PolyFamily::X2P2),
            "x2+x+3" => Some(PolyFamily::X2PXP3),
            _ => None,
        }
    }

    /// poly(x); callers keep values within u64.
    pub fn eval(self, x: u64) -> u64 {
        let (b, c) = self.coeffs();
        x * x + b * x + c
    }

    fn eval_u128(self, x: u64) -> u128 {
        let (b, c) = self.coeffs();
        let x = x as u128;
        x * x + b as u128 * x + c as u128
    }

    pub fn eval_big(self, x: &BigUint) -> BigUint {
        let (b, c) = self.coeffs();
        x * x + b * x + c
    }
}

impl std::fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One table cell: the number of x ≥ 1 with poly(x) prime and ≤ bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub family: PolyFamily,
    pub bound: u64,
    pub count: u64,
}

fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let e = powmod_u64(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        debug_assert_eq!(e, p - 1);
        -1
    }
}

/// Square root of a quadratic residue n modulo an odd prime p.
fn tonelli_shanks(n: u64, p: u64) -> u64 {
    let n = n % p;
    if n == 0 {
        return 0;
    }
    debug_assert_eq!(legendre(n, p), 1);
    if p % 4 == 3 {
        return powmod_u64(n, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod_u64(z, q, p);
    let mut t = powmod_u64(n, q, p);
    let mut r = powmod_u64(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut probe = t;
        while probe != 1 {
            probe = mulmod_u64(probe, probe, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..m - i - 1 {
            b = mulmod_u64(b, b, p);
        }
        m = i;
        c = mulmod_u64(b, b, p);
        t = mulmod_u64(t, c, p);
        r = mulmod_u64(r, b, p);
    }
    r
}

/// All residues r mod p with poly(r) ≡ 0, ascending (0, 1, or 2 of them).
/// p must be an odd prime; the sieve handles p = 2 by parity. For x²+x+1
/// the roots are the primitive cube roots of unity, found by powering a
/// non-cube; the other families go through a modular square root of the
/// discriminant.
pub fn poly_roots_mod_p(family: PolyFamily, p: u64) -> Result<Vec<u64>> {
    if p == 2 {
        return Err(Error::EvenModulus);
    }
    debug_assert!(is_prime_u64(p));
    if family == PolyFamily::X2PXP1 {
        if p == 3 {
            return Ok(vec![1]);
        }
        if p % 3 != 1 {
            return Ok(Vec::new());
        }
        let mut g = 2;
        let h = loop {
            let h = powmod_u64(g, (p - 1) / 3, p);
            if h != 1 {
                break h;
            }
            g += 1;
        };
        let mut roots = vec![h, mulmod_u64(h, h, p)];
        roots.sort_unstable();
        return Ok(roots);
    }
    let (b, c) = family.coeffs();
    if b == 0 {
        // x² ≡ −c
        let a = (p - c % p) % p;
        if a == 0 {
            return Ok(vec![0]);
        }
        match legendre(a, p) {
            -1 => Ok(Vec::new()),
            _ => {
                let s = tonelli_shanks(a, p);
                let mut roots = vec![s, p - s];
                roots.sort_unstable();
                roots.dedup();
                Ok(roots)
            }
        }
    } else {
        // b = 1: discriminant 1 − 4c; x = (−1 ± s) / 2
        let d = (p - (4 * c - 1) % p) % p;
        let inv2 = p.div_ceil(2);
        if d == 0 {
            return Ok(vec![mulmod_u64(p - 1, inv2, p)]);
        }
        match legendre(d, p) {
            -1 => Ok(Vec::new()),
            _ => {
                let s = tonelli_shanks(d, p);
                let r1 = mulmod_u64(p - 1 + s, inv2, p);
                let r2 = mulmod_u64(
                    ((2 * p as u128 - 1 - s as u128) % p as u128) as u64,
                    inv2,
                    p,
                );
                let mut roots = vec![r1, r2];
                roots.sort_unstable();
                roots.dedup();
                Ok(roots)
            }
        }
    }
}

/// Whether an odd prime p can divide a value of the family: the standard
/// residue conditions p ≡ 1 (mod 4) for x²+1, p ≡ 1 (mod 3) for x²+x+1,
/// (−2|p) = 1 for x²+2, (−11|p) = 1 for x²+x+3.
fn divides_some_value(family: PolyFamily, p: u64) -> bool {
    match family {
        PolyFamily::X2P1 => p % 4 == 1,
        PolyFamily::X2PXP1 => p % 3 == 1,
        PolyFamily::X2P2 => p % 8 == 1 || p % 8 == 3,
        PolyFamily::X2PXP3 => legendre((p - 11 % p) % p, p) == 1,
        PolyFamily::X2PXP2 => unreachable!("never sieved"),
    }
}

/// Stage 2: every prime p ≤ t that divides some value, with its roots.
fn sieving_entries(family: PolyFamily, t: u64) -> Result<Vec<(u64, Vec<u64>)>> {
    let base = sieve_primes(isqrt_u64(t));
    let all = segmented_primes(2, t, &base)?;
    let mut entries = Vec::new();
    for &p in &all.primes {
        let roots = match (family, p) {
            (PolyFamily::X2P1, 2) => vec![1],
            (PolyFamily::X2P2, 2) => vec![0],
            // odd-valued families are never divisible by 2
            (PolyFamily::X2PXP1, 2) | (PolyFamily::X2PXP3, 2) => continue,
            (PolyFamily::X2PXP1, 3) | (PolyFamily::X2PXP3, 11) => poly_roots_mod_p(family, p)?,
            _ => {
                if !divides_some_value(family, p) {
                    continue;
                }
                poly_roots_mod_p(family, p)?
            }
        };
        if !roots.is_empty() {
            entries.push((p, roots));
        }
    }
    Ok(entries)
}

/// Largest x ≥ 1 with poly(x) ≤ cap, or 0 if there is none.
fn largest_x_within(family: PolyFamily, cap: u64) -> u64 {
    if family.eval_u128(1) > cap as u128 {
        return 0;
    }
    let mut x = isqrt_u64(cap).max(1);
    while family.eval_u128(x) > cap as u128 {
        x -= 1;
    }
    while family.eval_u128(x + 1) <= cap as u128 {
        x += 1;
    }
    x
}

const BLOCK_SPAN: u64 = 1 << 22;

/// Unmarked x in [lo, hi]: those whose value no listed prime divides.
fn block_survivors(entries: &[(u64, Vec<u64>)], lo: u64, hi: u64) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let mut bits = vec![0u64; len.div_ceil(64)];
    for (p, roots) in entries {
        for &r in roots {
            let mut x = lo + (r + p - lo % p) % p;
            while x <= hi {
                let i = (x - lo) as usize;
                bits[i >> 6] |= 1 << (i & 63);
                x += p;
            }
        }
    }
    (0..len)
        .filter(|&i| bits[i >> 6] >> (i & 63) & 1 == 0)
        .map(|i| lo + i as u64)
        .collect()
}

/// Ascending x ≥ 1 with poly(x) prime and ≤ bound. The zone where
/// poly(x) ≤ √bound is tested directly (there the value may equal a sieving
/// prime); beyond it a marked x has a proper factor ≤ √bound and an unmarked
/// one is prime.
fn prime_x_values(family: PolyFamily, bound: u64) -> Result<Vec<u64>> {
    if family == PolyFamily::X2PXP2 {
        return Err(Error::UnsupportedFamily);
    }
    if bound < 10 {
        return Err(Error::BoundTooSmall(bound, 10));
    }
    let t = isqrt_u64(bound);
    let entries = sieving_entries(family, t)?;
    let x_max = largest_x_within(family, bound);
    let x_small = largest_x_within(family, t);
    let mut out: Vec<u64> = (1..=x_small)
        .filter(|&x| is_prime_u64(family.eval(x)))
        .collect();
    let zone_lo = x_small + 1;
    if zone_lo <= x_max {
        let blocks: Vec<(u64, u64)> = (zone_lo..=x_max)
            .step_by(BLOCK_SPAN as usize)
            .map(|lo| (lo, lo.saturating_add(BLOCK_SPAN - 1).min(x_max)))
            .collect();
        let chunks: Vec<Vec<u64>> = blocks
            .par_iter()
            .map(|&(lo, hi)| block_survivors(&entries, lo, hi))
            .collect();
        for chunk in chunks {
            out.extend(chunk);
        }
    }
    Ok(out)
}

/// Number of x ≥ 1 with poly(x) prime and poly(x) ≤ bound.
pub fn triple_sieve_count(family: PolyFamily, bound: u64) -> Result<CountRow> {
    let xs = prime_x_values(family, bound)?;
    Ok(CountRow {
        family,
        bound,
        count: xs.len() as u64,
    })
}

/// Writes the qualifying x values ascending, one per line, and returns how
/// many were written (always equal to the triple_sieve_count figure).
pub fn emit_prime_x_values(family: PolyFamily, bound: u64, sink: &mut dyn Write) -> Result<u64> {
    let xs = prime_x_values(family, bound)?;
    for x in &xs {
        writeln!(sink, "{x}")?;
    }
    Ok(xs.len() as u64)
}

/// All (x, p, e) with poly(x) = p^e ≤ bound, e ≥ 2, p prime, and c ≤ x
/// (the constant term must not exceed x), ascending in p^e. For x²+1 this
/// is empty with no scan: x²+1 is never a proper power.
pub fn poly_prime_powers(family: PolyFamily, bound: u64) -> Result<Vec<(u64, u64, u32)>> {
    if bound < 8 {
        return Err(Error::BoundTooSmall(bound, 8));
    }
    if family == PolyFamily::X2P1 {
        return Ok(Vec::new());
    }
    let (_, c) = family.coeffs();
    let primes = sieve_primes(isqrt_u64(bound));
    let mut hits: Vec<(u128, u64, u64, u32)> = Vec::new();
    for &p in &primes.primes {
        let mut q = p as u128 * p as u128;
        let mut e = 2u32;
        while q <= bound as u128 {
            if let Some(x) = solve_quadratic_rep(&BigUint::from(q), family) {
                if x >= BigUint::from(c) {
                    hits.push((q, x.to_u64().expect("x ≤ √bound"), p, e));
                }
            }
            q *= p as u128;
            e += 1;
        }
    }
    hits.sort_unstable();
    Ok(hits.into_iter().map(|(_, x, p, e)| (x, p, e)).collect())
}
