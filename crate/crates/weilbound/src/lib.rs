//! Computations around the Hasse-Weil bound over finite fields: when does the
//! genus-g maximum q + g⌊2√q⌋ + 1 fail to be attained, and by how much?
//!
//! The crate provides:
//!
//! - exact integer kernels (floor square roots, the Hasse quantity
//!   m = ⌊2√q⌋, and exact comparisons of {2√q} against two algebraic
//!   thresholds) in [`arith`];
//! - prime generation and primality testing (simple, segmented, and wheel
//!   sieves; deterministic Miller-Rabin below 2^64, Baillie-PSW above) in
//!   [`primes`];
//! - the genus-1 divisibility criterion: Serre primes, Deuring-Waterhouse
//!   numbers, range searches with checkpointing, and a base-p digit predictor
//!   in [`dw`];
//! - a three-stage sieve counting primes of quadratic-polynomial form,
//!   together with root finding mod p and prime-power searches, in
//!   [`polysieve`];
//! - genus-2 defect and genus-3 minimal-relative-defect classification in
//!   [`classify`];
//! - log-log density heuristics in [`heuristic`].
//!
//! The `weilbound` binary exposes all of it on the command line.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod dw;
pub mod error;
pub mod fixture;
pub mod heuristic;
pub mod polysieve;
pub mod primes;

pub use error::{Error, Result};
