//! Prime generation and primality testing: a simple sieve of Eratosthenes,
//! a segmented sieve for windows far from the origin, factorization-wheel
//! residue enumeration, deterministic Miller-Rabin below 2^64, and
//! Baillie-PSW above it.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::is_perfect_square;
use crate::error::{Error, Result};

/// Ascending primes up to `bound`, inclusive.
#[derive(Debug, Clone)]
pub struct PrimeList {
    pub primes: Vec<u64>,
    pub bound: u64,
}

/// Residue classes coprime to a wheel modulus.
#[derive(Debug, Clone)]
pub struct WheelPartition {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

/// The primorial 2·3·5·7·11·13·17 used by the range search.
pub const WHEEL_MODULUS: u64 = 510_510;

/// Sieve of Eratosthenes up to `bound` inclusive. Bounds below 2 yield an
/// empty list. Memory is one byte per candidate; intended for bounds up to
/// roughly 10^8.
pub fn sieve_primes(bound: u64) -> PrimeList {
    if bound < 2 {
        return PrimeList {
            primes: Vec::new(),
            bound,
        };
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut p = 2usize;
    while p * p <= n {
        if !composite[p] {
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
        p += 1;
    }
    let primes = (2..=n)
        .filter(|&i| !composite[i])
        .map(|i| i as u64)
        .collect();
    PrimeList { primes, bound }
}

/// Primes in [lo, hi] inclusive, sieved in cache-sized chunks by the base
/// list. The base must cover √hi.
pub fn segmented_primes(lo: u64, hi: u64, base: &PrimeList) -> Result<PrimeList> {
    if lo > hi {
        return Err(Error::BadRange(lo, hi));
    }
    let need = crate::arith::isqrt_u64(hi);
    if base.bound < need {
        return Err(Error::BaseTooSmall(base.bound, need));
    }
    const CHUNK: u64 = 1 << 20;
    let mut primes = Vec::new();
    let mut chunk_lo = lo.max(2);
    while chunk_lo <= hi {
        let chunk_hi = chunk_lo.saturating_add(CHUNK - 1).min(hi);
        let len = (chunk_hi - chunk_lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in base.primes.iter().take_while(|&&p| p <= need) {
            if p * p > chunk_hi {
                break;
            }
            let first = (p * p).max(chunk_lo.div_ceil(p) * p);
            let mut m = first;
            while m <= chunk_hi {
                composite[(m - chunk_lo) as usize] = true;
                match m.checked_add(p) {
                    Some(next) => m = next,
                    None => break,
                }
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                primes.push(chunk_lo + i as u64);
            }
        }
        chunk_lo = chunk_hi + 1;
        if chunk_hi == u64::MAX {
            break;
        }
    }
    Ok(PrimeList { primes, bound: hi })
}

/// Residues in [1, modulus] coprime to the modulus, ascending.
pub fn wheel_residues(modulus: u64) -> WheelPartition {
    let residues = (1..=modulus)
        .filter(|&r| num_integer::gcd(r, modulus) == 1)
        .collect();
    WheelPartition { modulus, residues }
}

pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for 64-bit n: Miller-Rabin with the witness set
/// {2,…,37}, which is known exact well beyond 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = powmod_u64(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Verdict of the arbitrary-precision test: exact below 2^64, Baillie-PSW
/// (no known counterexamples, none below 2^64) above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    ProbablePrime,
}

/// Primality verdict for arbitrary n.
pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    // Above 2^64: Baillie-PSW = trial division, base-2 Miller-Rabin, then a
    // strong Lucas test with Selfridge parameters.
    const SMALL: [u32; 25] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
        97,
    ];
    for &p in &SMALL {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    if !miller_rabin_base2(n) {
        return Primality::Composite;
    }
    // The Selfridge parameter search diverges on perfect squares.
    if is_perfect_square(n) {
        return Primality::Composite;
    }
    if !strong_lucas_selfridge(n) {
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

/// Whether n is prime (or a Baillie-PSW probable prime above 2^64).
pub fn is_prime(n: &BigUint) -> bool {
    primality(n) != Primality::Composite
}

fn miller_rabin_base2(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(2u32).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut a = a.mod_floor(&BigInt::from(n.clone()));
    let mut n = BigInt::from(n.clone());
    let mut result = 1i32;
    while !a.is_zero() {
        let two_mod = n.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        while a.is_even() {
            a >>= 1;
            if two_mod == 3 || two_mod == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)).to_u8() == Some(3)
            && n.mod_floor(&BigInt::from(4)).to_u8() == Some(3)
        {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice:
/// D is the first of 5, −7, 9, −11, … with (D/n) = −1, P = 1, Q = (1−D)/4.
fn strong_lucas_selfridge(n: &BigUint) -> bool {
    let n_int = BigInt::from(n.clone());
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => {
                // A shared factor with D means n is composite whenever
                // n > |D|, which holds for every caller here.
                return false;
            }
            _ => {}
        }
        d = if d.is_positive() {
            -(&d + BigInt::from(2))
        } else {
            -(&d - BigInt::from(2))
        };
    }
    let q = (BigInt::one() - &d) / 4;

    // n + 1 = k·2^s with k odd; compute U_k, V_k by a binary ladder, then
    // square V s−1 more times looking for a zero.
    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap();
    let k = &n_plus_1 >> s;

    let to_residue = |x: &BigInt| -> BigInt { x.mod_floor(&n_int) };
    let halve = |x: BigInt| -> BigInt {
        // exact division by 2 mod odd n
        if x.is_even() {
            x >> 1
        } else {
            (x + &n_int) >> 1
        }
    };

    let mut u = BigInt::one();
    let mut v = BigInt::one();
    let mut qk = to_residue(&q);
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        // (U, V) at index m becomes index 2m
        let u2 = to_residue(&(&u * &v));
        let v2 = to_residue(&(&v * &v - 2 * &qk));
        qk = to_residue(&(&qk * &qk));
        if k.bit(i) {
            // advance to 2m + 1 (P = 1)
            let u_next = halve(to_residue(&(&u2 + &v2)));
            let v_next = halve(to_residue(&(&d * &u2 + &v2)));
            u = u_next;
            v = v_next;
            qk = to_residue(&(&qk * &q));
        } else {
            u = u2;
            v = v2;
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = to_residue(&(&v * &v - 2 * &qk));
        if v.is_zero() {
            return true;
        }
        qk = to_residue(&(&qk * &qk));
    }
    false
}
