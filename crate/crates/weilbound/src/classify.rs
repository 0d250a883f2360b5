//! Genus-2 defect classification and genus-3 minimal relative defect for
//! prime powers q = p^e.
//!
//! Genus 2: q is special when it is not a square and either p divides
//! m = ⌊2√q⌋ or q is represented by x²+1, x²+x+1, or x²+x+2. A special q
//! has defect 1 when {2√q} exceeds (√5−1)/2 and defect 2 otherwise; squares
//! have defect 0 apart from q = 9 (defect 2) and q = 4 (defect 3).
//!
//! Genus 3: the minimal relative defect is 0 unless q = x²+r (r ∈ {1,2},
//! r ≤ x, giving 2), q = x²+x+r (r ∈ {1,3}, r ≤ x, giving 3), or p | m
//! (giving 2 when {2√q} ≥ 1−4cos²(3π/7) and 3 otherwise). When several
//! conditions hold the smallest value wins.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{self, ThresholdSide};
use crate::dw::{is_dw, PrimePower};
use crate::error::{Error, Result};
use crate::polysieve::PolyFamily;

/// Why a genus-2 defect was assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genus2Reason {
    /// Non-square q that is not special, or a square other than 4 and 9.
    Nonspecial,
    /// q = 4 or q = 9, the two square exceptions.
    SquareException,
    /// p divides ⌊2√q⌋.
    SpecialDividesM,
    /// q is a value of the named polynomial.
    SpecialPolyRep(PolyFamily),
}

impl Genus2Reason {
    pub fn label(self) -> &'static str {
        match self {
            Genus2Reason::Nonspecial => "nonspecial",
            Genus2Reason::SquareException => "square_exception",
            Genus2Reason::SpecialDividesM => "divides_m",
            Genus2Reason::SpecialPolyRep(PolyFamily::X2P1) => "rep_x2+1",
            Genus2Reason::SpecialPolyRep(PolyFamily::X2PXP1) => "rep_x2+x+1",
            Genus2Reason::SpecialPolyRep(PolyFamily::X2PXP2) => "rep_x2+x+2",
            Genus2Reason::SpecialPolyRep(_) => unreachable!("not a genus-2 rep family"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Genus2Result {
    pub defect: u8,
    pub reason: Genus2Reason,
    /// Side of (√5−1)/2, present exactly when q is special.
    pub threshold_side: Option<ThresholdSide>,
}

/// Why a genus-3 minimal relative defect was assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genus3Reason {
    None,
    /// q = x² + r with r ≤ x.
    X2R(u8),
    /// q = x² + x + r with r ≤ x.
    X2XR(u8),
    /// p divides ⌊2√q⌋; the side of 1−4cos²(3π/7) sets the value.
    DividesM(ThresholdSide),
}

impl Genus3Reason {
    pub fn label(self) -> &'static str {
        match self {
            Genus3Reason::None => "none",
            Genus3Reason::X2R(1) => "rep_x2+1",
            Genus3Reason::X2R(2) => "rep_x2+2",
            Genus3Reason::X2XR(1) => "rep_x2+x+1",
            Genus3Reason::X2XR(3) => "rep_x2+x+3",
            Genus3Reason::DividesM(ThresholdSide::Above) => "divides_m_above",
            Genus3Reason::DividesM(ThresholdSide::Below) => "divides_m_below",
            Genus3Reason::X2R(_) | Genus3Reason::X2XR(_) => unreachable!("r out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Genus3Result {
    pub mrd: u8,
    pub reason: Genus3Reason,
}

/// Aggregate splits over a Deuring-Waterhouse list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifySummary {
    pub defect1: u64,
    pub defect2: u64,
    pub mrd2: u64,
    pub mrd3: u64,
}

fn p_divides_m(pp: &PrimePower) -> bool {
    let m = arith::hasse_m(&pp.q).expect("q = p^e ≥ 2");
    (m % pp.p).is_zero()
}

/// The reason q is special, if it is. Squares are never special. The
/// divisibility condition is reported ahead of representability when both
/// hold; representability is checked directly, not against a table.
pub fn genus2_special(pp: &PrimePower) -> Option<Genus2Reason> {
    if pp.e.is_multiple_of(2) {
        return None;
    }
    if p_divides_m(pp) {
        return Some(Genus2Reason::SpecialDividesM);
    }
    for family in [PolyFamily::X2P1, PolyFamily::X2PXP1, PolyFamily::X2PXP2] {
        if arith::solve_quadratic_rep(&pp.q, family).is_some() {
            return Some(Genus2Reason::SpecialPolyRep(family));
        }
    }
    None
}

/// Genus-2 defect of q.
pub fn genus2_defect(pp: &PrimePower) -> Genus2Result {
    if pp.e.is_multiple_of(2) {
        let defect = if pp.p == 2 && pp.e == 2 {
            3
        } else if pp.p == 3 && pp.e == 2 {
            2
        } else {
            0
        };
        let reason = if defect == 0 {
            Genus2Reason::Nonspecial
        } else {
            Genus2Reason::SquareException
        };
        return Genus2Result {
            defect,
            reason,
            threshold_side: None,
        };
    }
    match genus2_special(pp) {
        None => Genus2Result {
            defect: 0,
            reason: Genus2Reason::Nonspecial,
            threshold_side: None,
        },
        Some(reason) => {
            let side = arith::frac_gt_golden(&pp.q).expect("odd e makes q non-square");
            let defect = match side {
                ThresholdSide::Above => 1,
                ThresholdSide::Below => 2,
            };
            Genus2Result {
                defect,
                reason,
                threshold_side: Some(side),
            }
        }
    }
}

/// Genus-3 minimal relative defect of a non-square q. Square q (even e) is
/// rejected: its value is not covered here.
pub fn genus3_mrd(pp: &PrimePower) -> Result<Genus3Result> {
    if pp.e.is_multiple_of(2) {
        return Err(Error::EvenExponent(pp.e));
    }
    let mut candidates: Vec<(u8, Genus3Reason)> = Vec::new();
    let conditions = [
        (PolyFamily::X2P1, 1u8, 2u8),
        (PolyFamily::X2P2, 2, 2),
        (PolyFamily::X2PXP1, 1, 3),
        (PolyFamily::X2PXP3, 3, 3),
    ];
    for (family, r, a) in conditions {
        if let Some(x) = arith::solve_quadratic_rep(&pp.q, family) {
            if x >= BigUint::from(r) {
                let reason = match family {
                    PolyFamily::X2P1 | PolyFamily::X2P2 => Genus3Reason::X2R(r),
                    _ => Genus3Reason::X2XR(r),
                };
                candidates.push((a, reason));
            }
        }
    }
    if p_divides_m(pp) {
        let side = arith::frac_ge_tau(&pp.q).expect("odd e makes q non-square");
        let a = match side {
            ThresholdSide::Above => 2,
            ThresholdSide::Below => 3,
        };
        candidates.push((a, Genus3Reason::DividesM(side)));
    }
    Ok(match candidates.into_iter().min_by_key(|&(a, _)| a) {
        None => Genus3Result {
            mrd: 0,
            reason: Genus3Reason::None,
        },
        Some((a, reason)) => Genus3Result { mrd: a, reason },
    })
}

/// Splits of genus-2 defect and genus-3 minimal relative defect over a list
/// that must consist of Deuring-Waterhouse pairs; the first entry that is
/// not one is reported by index.
pub fn classify_dw_list(records: &[PrimePower]) -> Result<ClassifySummary> {
    for (index, pp) in records.iter().enumerate() {
        let ok = is_dw(pp.p, pp.e).unwrap_or(false);
        if !ok {
            return Err(Error::NotDeuringWaterhouse {
                index,
                p: pp.p,
                e: pp.e,
            });
        }
    }
    let pairs: Vec<(u8, u8)> = records
        .par_iter()
        .map(|pp| {
            let g2 = genus2_defect(pp);
            let g3 = genus3_mrd(pp).expect("DW exponents are odd");
            (g2.defect, g3.mrd)
        })
        .collect();
    let mut summary = ClassifySummary::default();
    for (defect, mrd) in pairs {
        match defect {
            1 => summary.defect1 += 1,
            2 => summary.defect2 += 1,
            _ => unreachable!("DW numbers are special"),
        }
        match mrd {
            2 => summary.mrd2 += 1,
            3 => summary.mrd3 += 1,
            _ => unreachable!("the divisibility condition applies"),
        }
    }
    Ok(summary)
}
