//! The genus-1 criterion: a prime power q = p^e with e odd admits no
//! elliptic curve with q + ⌊2√q⌋ + 1 points exactly when p divides ⌊2√q⌋.
//! This module hosts the predicate, the enumeration of all such q below a
//! bound, a checkpointed range search for fixed e, and an independent
//! cross-check that reads the answer off the base-p digits of 2√p.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::classify;
use crate::error::{Error, Result};
use crate::primes::{self, PrimeList, WHEEL_MODULUS};

/// A validated prime power q = p^e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    pub q: BigUint,
}

impl PrimePower {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !primes::is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ExponentTooSmall(0, 1));
        }
        Ok(PrimePower {
            p,
            e,
            q: BigUint::from(p).pow(e),
        })
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

/// A Deuring-Waterhouse number together with its Hasse midpoint offset and
/// both defect classifications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DWRecord {
    pub pp: PrimePower,
    pub m: BigUint,
    /// Always 1 or 2: divisibility makes q special.
    pub genus2_defect: u8,
    /// Always 2 or 3 for the same reason.
    pub genus3_mrd: u8,
}

/// Whether p divides ⌊2√(p^e)⌋, for any p ≥ 2.
///
/// For e ≥ 3 the answer is read off the reduced radicand: with
/// M = ⌊2√(p^{e−2})⌋ the nested-floor identity gives ⌊⌊2√(p^e)⌋/p⌋ = M, so
/// divisibility holds exactly when ⌊2√(p^e)⌋ = pM, i.e. when
/// p·(4p^{e−2} − M²) ≤ 2M. That keeps the hot path in u128 arithmetic; an
/// operand too wide for u128 falls back to big-integer square roots.
pub fn hasse_m_divisible(p: u64, e: u32) -> bool {
    if e == 0 {
        return p == 2;
    }
    if e == 1 {
        return arith::isqrt_u128(4 * p as u128).is_multiple_of(p as u128);
    }
    if let Some(radicand) = (p as u128)
        .checked_pow(e - 2)
        .and_then(|t| t.checked_mul(4))
    {
        let m = arith::isqrt_u128(radicand);
        let d = radicand - m * m;
        if let Some(pd) = (p as u128).checked_mul(d) {
            return pd <= 2 * m;
        }
    }
    let q4 = BigUint::from(p).pow(e) << 2u32;
    (arith::isqrt(&q4) % p).is_zero()
}

/// The Deuring-Waterhouse predicate: e odd and p ∣ ⌊2√(p^e)⌋.
///
/// For e = 1 the divisibility holds only for p ∈ {2, 3}, and over a prime
/// field every admissible point count occurs anyway; e = 3 never satisfies
/// it. The smallest exponent of interest is therefore 5, where enumeration
/// and search begin.
pub fn is_dw(p: u64, e: u32) -> Result<bool> {
    if !primes::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::ExponentTooSmall(0, 1));
    }
    Ok(e % 2 == 1 && hasse_m_divisible(p, e))
}

/// Whether p^5 is a Deuring-Waterhouse number.
pub fn is_serre_prime(p: u64) -> Result<bool> {
    is_dw(p, 5)
}

/// All Deuring-Waterhouse numbers q < bound with e ≥ 5, ascending by q.
pub fn enumerate_dw(bound: &BigUint) -> Vec<DWRecord> {
    if *bound <= BigUint::from(128u32) {
        return Vec::new();
    }
    let pmax = u64::try_from((bound - 1u32).nth_root(5)).unwrap_or(u64::MAX);
    let mut found: Vec<(BigUint, u64, u32)> = Vec::new();
    let mut visit = |p: u64| {
        let p_sq = BigUint::from(p) * p;
        let mut q = BigUint::from(p).pow(5);
        let mut e = 5u32;
        while q < *bound {
            if hasse_m_divisible(p, e) {
                found.push((q.clone(), p, e));
            }
            q *= &p_sq;
            e += 2;
        }
    };
    const CHUNK: u64 = 1 << 20;
    if pmax <= CHUNK {
        for &p in &primes::sieve_primes(pmax).primes {
            visit(p);
        }
    } else {
        let base = primes::sieve_primes(arith::isqrt_u64(pmax));
        for &p in &base.primes {
            visit(p);
        }
        let mut lo = base.bound + 1;
        while lo <= pmax {
            let hi = pmax.min(lo + (CHUNK - 1));
            let chunk = primes::segmented_primes(lo, hi, &base).expect("base covers √pmax");
            for &p in &chunk.primes {
                visit(p);
            }
            lo = hi + 1;
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
        .into_iter()
        .map(|(q, p, e)| {
            let pp = PrimePower { p, e, q };
            let m = arith::hasse_m(&pp.q).expect("q ≥ 128");
            let genus2_defect = classify::genus2_defect(&pp).defect;
            let genus3_mrd = classify::genus3_mrd(&pp).expect("e odd").mrd;
            DWRecord {
                pp,
                m,
                genus2_defect,
                genus3_mrd,
            }
        })
        .collect()
}

/// Width of one search segment: eight full wheel revolutions.
pub const SEARCH_SPAN: u64 = 8 * WHEEL_MODULUS;

/// On-disk search state. `completed_segments` holds absolute segment
/// indices k, each covering [k·SEARCH_SPAN, (k+1)·SEARCH_SPAN); small
/// primes below the wheel's factors are never recorded here, they are
/// re-derived at assembly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchCheckpoint {
    pub range_lo: u64,
    pub range_hi: u64,
    pub exponent: u32,
    pub completed_segments: Vec<u64>,
    pub hits: Vec<CheckpointHit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHit {
    pub p: u64,
    pub e: u32,
}

struct SearchState {
    done: BTreeSet<u64>,
    hits: Vec<CheckpointHit>,
}

fn load_checkpoint(
    path: &Path,
    lo: u64,
    hi: u64,
    e: u32,
    first_block: u64,
    last_block: u64,
) -> Result<SearchState> {
    let text = fs::read_to_string(path)?;
    let cp: SearchCheckpoint =
        serde_json::from_str(&text).map_err(|err| Error::CheckpointFormat(err.to_string()))?;
    if cp.range_lo != lo || cp.range_hi != hi || cp.exponent != e {
        return Err(Error::CheckpointMismatch {
            found_lo: cp.range_lo,
            found_hi: cp.range_hi,
            found_exp: cp.exponent,
            want_lo: lo,
            want_hi: hi,
            want_exp: e,
        });
    }
    for &seg in &cp.completed_segments {
        if seg < first_block || seg > last_block {
            return Err(Error::CheckpointFormat(format!(
                "segment {seg} lies outside the range's segment partition"
            )));
        }
    }
    for hit in &cp.hits {
        if hit.e != e || !is_dw(hit.p, hit.e).unwrap_or(false) {
            return Err(Error::CheckpointFormat(format!(
                "recorded hit {}^{} fails the divisibility predicate",
                hit.p, hit.e
            )));
        }
    }
    Ok(SearchState {
        done: cp.completed_segments.into_iter().collect(),
        hits: cp.hits,
    })
}

fn save_checkpoint(path: &Path, lo: u64, hi: u64, e: u32, state: &SearchState) -> Result<()> {
    let mut hits = state.hits.clone();
    hits.sort_by_key(|h| h.p);
    let cp = SearchCheckpoint {
        range_lo: lo,
        range_hi: hi,
        exponent: e,
        completed_segments: state.done.iter().copied().collect(),
        hits,
    };
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(
        &tmp,
        serde_json::to_vec(&cp).expect("checkpoint serializes"),
    )?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// One segment's hits: sieve the wheel positions with the base primes,
/// apply the divisibility test to survivors, and confirm primality last.
fn scan_block(k: u64, lo: u64, hi: u64, e: u32, base: &PrimeList, residues: &[u64]) -> Vec<u64> {
    let block_lo = k * SEARCH_SPAN;
    let w_lo = block_lo.max(lo);
    let w_hi = block_lo.saturating_add(SEARCH_SPAN).min(hi);
    let mut marked = vec![0u8; SEARCH_SPAN as usize];
    for &b in &base.primes {
        if b <= 17 {
            continue;
        }
        let aligned = block_lo.div_ceil(b).saturating_mul(b);
        let mut x = aligned.max(b * b);
        while x < w_hi {
            marked[(x - block_lo) as usize] = 1;
            match x.checked_add(b) {
                Some(next) => x = next,
                None => break,
            }
        }
    }
    let mut found = Vec::new();
    for j in 0..8u64 {
        let turn = j * WHEEL_MODULUS;
        for &r in residues {
            let x = match block_lo.checked_add(turn + r) {
                Some(x) => x,
                None => continue,
            };
            if x < w_lo || x >= w_hi || x == 1 {
                continue;
            }
            if marked[(x - block_lo) as usize] != 0 {
                continue;
            }
            if !hasse_m_divisible(x, e) {
                continue;
            }
            if primes::is_prime_u64(x) {
                found.push(x);
            }
        }
    }
    found
}

/// All primes p in [lo, hi) with is_dw(p, e), ascending, independent of the
/// parallelism degree. With a checkpoint path the search resumes past
/// segments already recorded there and records each segment as it
/// completes, so an interrupted run never rescans finished work.
pub fn search_serre_range(
    lo: u64,
    hi: u64,
    e: u32,
    parallelism: usize,
    checkpoint: Option<&Path>,
) -> Result<Vec<PrimePower>> {
    if e.is_multiple_of(2) {
        return Err(Error::EvenExponent(e));
    }
    if e < 5 {
        return Err(Error::ExponentTooSmall(e, 5));
    }
    if lo >= hi {
        return Err(Error::BadRange(lo, hi));
    }
    let first_block = lo / SEARCH_SPAN;
    let last_block = (hi - 1) / SEARCH_SPAN;
    let state = match checkpoint {
        Some(path) if path.exists() => load_checkpoint(path, lo, hi, e, first_block, last_block)?,
        _ => SearchState {
            done: BTreeSet::new(),
            hits: Vec::new(),
        },
    };
    let pending: Vec<u64> = (first_block..=last_block)
        .filter(|k| !state.done.contains(k))
        .collect();
    let base = primes::sieve_primes(arith::isqrt_u64(hi - 1).clamp(3, 1_000_000));
    let wheel = primes::wheel_residues(WHEEL_MODULUS);
    let state = Mutex::new(state);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        use rayon::prelude::*;
        pending.par_iter().try_for_each(|&k| -> Result<()> {
            let found = scan_block(k, lo, hi, e, &base, &wheel.residues);
            let mut guard = state.lock().expect("search state");
            guard.done.insert(k);
            guard
                .hits
                .extend(found.into_iter().map(|p| CheckpointHit { p, e }));
            if let Some(path) = checkpoint {
                save_checkpoint(path, lo, hi, e, &guard)?;
            }
            Ok(())
        })
    })?;
    let state = state.into_inner().expect("search state");
    let mut ps: Vec<u64> = state.hits.iter().map(|h| h.p).collect();
    for small in [2u64, 3, 5, 7, 11, 13, 17] {
        if small >= lo && small < hi && hasse_m_divisible(small, e) {
            ps.push(small);
        }
    }
    ps.sort_unstable();
    ps.into_iter().map(|p| PrimePower::new(p, e)).collect()
}

/// The odd exponents e ≤ e_max with is_dw(p, e), read off the base-p digits
/// of ⌊2√(p^E)⌋ for the largest odd E ≤ e_max: digit i vanishes exactly
/// when p divides ⌊2√(p^{E−2i})⌋. An independent oracle for the predicate.
pub fn dw_exponents_by_digits(p: u64, e_max: u32) -> Result<Vec<u32>> {
    if !primes::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if e_max < 5 {
        return Err(Error::ExponentTooSmall(e_max, 5));
    }
    let e_top = if e_max.is_multiple_of(2) {
        e_max - 1
    } else {
        e_max
    };
    let digits_wanted = (e_top - 1) / 2 - 1;
    let mut x = arith::isqrt(&(BigUint::from(p).pow(e_top) << 2u32));
    let p_big = BigUint::from(p);
    let mut out = Vec::new();
    for i in 0..digits_wanted {
        let (quot, rem) = x.div_rem(&p_big);
        if rem.is_zero() {
            out.push(e_top - 2 * i);
        }
        x = quot;
    }
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn predicate_examples() {
        assert!(is_dw(7, 5).unwrap());
        assert!(is_dw(2, 7).unwrap());
        assert!(!is_dw(2, 9).unwrap());
        assert!(!is_dw(2, 13).unwrap());
        assert!(!is_dw(7, 6).unwrap());
        assert!(matches!(is_dw(4, 5), Err(Error::NotPrime(4))));
        assert!(matches!(is_dw(7, 0), Err(Error::ExponentTooSmall(0, 1))));
    }

    #[test]
    fn serre_prime_examples() {
        assert!(is_serre_prime(7).unwrap());
        assert!(!is_serre_prime(5).unwrap());
        assert!(!is_serre_prime(11).unwrap());
        assert!(is_serre_prime(6).is_err());
    }

    #[test]
    fn low_exponents() {
        let mut e1 = Vec::new();
        for &p in &primes::sieve_primes(100_000).primes {
            if hasse_m_divisible(p, 1) {
                e1.push(p);
            }
            assert!(!hasse_m_divisible(p, 3), "p = {p}");
        }
        assert_eq!(e1, vec![2, 3]);
    }

    #[test]
    fn divisibility_matches_wide_arithmetic() {
        for &p in &primes::sieve_primes(2_000).primes {
            for e in [1u32, 3, 5, 7, 9, 11] {
                let q4 = BigUint::from(p).pow(e) << 2u32;
                let wide = (arith::isqrt(&q4) % p).is_zero();
                assert_eq!(hasse_m_divisible(p, e), wide, "p = {p}, e = {e}");
            }
        }
    }

    proptest! {
        #[test]
        fn divisibility_trick_agrees(x in 2u64..(1 << 40), e in prop::sample::select(vec![1u32, 3, 5, 7, 9])) {
            let q4 = BigUint::from(x).pow(e) << 2u32;
            let wide = (arith::isqrt(&q4) % x).is_zero();
            prop_assert_eq!(hasse_m_divisible(x, e), wide);
        }
    }

    fn pairs(records: &[DWRecord]) -> Vec<(u64, u32)> {
        records.iter().map(|r| (r.pp.p, r.pp.e)).collect()
    }

    #[test]
    fn enumeration_prefix() {
        let records = enumerate_dw(&BigUint::from(20_000u64));
        assert_eq!(pairs(&records), vec![(2, 7), (2, 11), (3, 7), (7, 5)]);
        assert!(enumerate_dw(&BigUint::from(128u64)).is_empty());
        assert_eq!(pairs(&enumerate_dw(&BigUint::from(129u64))), vec![(2, 7)]);
    }

    #[test]
    fn enumeration_to_ten_million() {
        let records = enumerate_dw(&BigUint::from(10_000_000u64));
        assert_eq!(
            pairs(&records),
            vec![
                (2, 7),
                (2, 11),
                (3, 7),
                (7, 5),
                (2, 15),
                (2, 17),
                (2, 19),
                (5, 9),
                (2, 21),
                (2, 23),
            ]
        );
        for window in records.windows(2) {
            assert!(window[0].pp.q < window[1].pp.q);
        }
        let first = &records[0];
        assert_eq!(first.m, BigUint::from(22u32));
        assert_eq!(first.genus2_defect, 1);
        assert_eq!(first.genus3_mrd, 3);
        for r in &records {
            assert!(matches!(r.genus2_defect, 1 | 2));
            assert!(matches!(r.genus3_mrd, 2 | 3));
            assert_eq!(arith::hasse_m(&r.pp.q).unwrap(), r.m);
        }
    }

    #[test]
    fn search_matches_known_lists() {
        let hits = search_serre_range(2, 10_000, 7, 1, None).unwrap();
        assert_eq!(hits.iter().map(|h| h.p).collect::<Vec<_>>(), vec![2, 3]);
        let hits = search_serre_range(100, 1_000_000, 9, 2, None).unwrap();
        assert_eq!(
            hits.iter().map(|h| h.p).collect::<Vec<_>>(),
            vec![113, 239, 43_783]
        );
        for h in &hits {
            assert_eq!(h.e, 9);
        }
    }

    #[test]
    fn search_rejects_bad_arguments() {
        assert!(matches!(
            search_serre_range(2, 100, 6, 1, None),
            Err(Error::EvenExponent(6))
        ));
        assert!(matches!(
            search_serre_range(2, 100, 3, 1, None),
            Err(Error::ExponentTooSmall(3, 5))
        ));
        assert!(matches!(
            search_serre_range(100, 100, 5, 1, None),
            Err(Error::BadRange(100, 100))
        ));
    }

    #[test]
    fn search_parallelism_is_invisible() {
        let one = search_serre_range(2, 8_200_000, 7, 1, None).unwrap();
        let two = search_serre_range(2, 8_200_000, 7, 2, None).unwrap();
        assert_eq!(one, two);
        assert_eq!(
            one.iter().map(|h| h.p).collect::<Vec<_>>(),
            vec![2, 3, 747_343]
        );
    }

    #[test]
    fn checkpoint_lifecycle() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("serre.json");
        let first = search_serre_range(2, 9_000_000, 9, 1, Some(&path)).unwrap();
        assert_eq!(
            first.iter().map(|h| h.p).collect::<Vec<_>>(),
            vec![5, 113, 239, 43_783]
        );
        let text = fs::read_to_string(&path).unwrap();
        let cp: SearchCheckpoint = serde_json::from_str(&text).unwrap();
        assert_eq!(cp.range_hi, 9_000_000);
        assert_eq!(cp.exponent, 9);
        assert_eq!(cp.completed_segments, vec![0, 1, 2]);
        // small primes are assembled, never checkpointed
        assert_eq!(
            cp.hits.iter().map(|h| h.p).collect::<Vec<_>>(),
            vec![113, 239, 43_783]
        );
        // a finished checkpoint short-circuits the scan entirely
        let again = search_serre_range(2, 9_000_000, 9, 1, Some(&path)).unwrap();
        assert_eq!(first, again);
    }

    #[test]
    fn checkpoint_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("serre.json");
        search_serre_range(2, 100_000, 9, 1, Some(&path)).unwrap();
        assert!(matches!(
            search_serre_range(2, 100_000, 7, 1, Some(&path)),
            Err(Error::CheckpointMismatch {
                found_exp: 9,
                want_exp: 7,
                ..
            })
        ));
        assert!(matches!(
            search_serre_range(2, 200_000, 9, 1, Some(&path)),
            Err(Error::CheckpointMismatch { .. })
        ));
        fs::write(&path, "{ not json").unwrap();
        assert!(matches!(
            search_serre_range(2, 100_000, 9, 1, Some(&path)),
            Err(Error::CheckpointFormat(_))
        ));
        let forged = SearchCheckpoint {
            range_lo: 2,
            range_hi: 100_000,
            exponent: 9,
            completed_segments: vec![0],
            hits: vec![CheckpointHit { p: 11, e: 9 }],
        };
        fs::write(&path, serde_json::to_vec(&forged).unwrap()).unwrap();
        assert!(matches!(
            search_serre_range(2, 100_000, 9, 1, Some(&path)),
            Err(Error::CheckpointFormat(_))
        ));
    }

    #[test]
    fn digit_expansion_examples() {
        assert_eq!(
            dw_exponents_by_digits(2, 20).unwrap(),
            vec![7, 11, 15, 17, 19]
        );
        assert_eq!(dw_exponents_by_digits(3, 15).unwrap(), vec![7, 15]);
        assert_eq!(dw_exponents_by_digits(7, 5).unwrap(), vec![5]);
        assert!(matches!(
            dw_exponents_by_digits(6, 10),
            Err(Error::NotPrime(6))
        ));
        assert!(matches!(
            dw_exponents_by_digits(7, 4),
            Err(Error::ExponentTooSmall(4, 5))
        ));
    }

    #[test]
    fn digit_expansion_matches_predicate() {
        for p in [2u64, 3, 5] {
            let by_digits = dw_exponents_by_digits(p, 41).unwrap();
            let direct: Vec<u32> = (5..=41)
                .step_by(2)
                .filter(|&e| is_dw(p, e).unwrap())
                .collect();
            assert_eq!(by_digits, direct, "p = {p}");
        }
    }

    #[test]
    fn prime_power_validation() {
        let pp = PrimePower::new(7, 5).unwrap();
        assert_eq!(pp.to_string(), "7^5");
        assert_eq!(pp.q, BigUint::from(16_807u64));
        assert!(matches!(PrimePower::new(4, 2), Err(Error::NotPrime(4))));
        assert!(matches!(
            PrimePower::new(7, 0),
            Err(Error::ExponentTooSmall(0, 1))
        ));
    }
}
