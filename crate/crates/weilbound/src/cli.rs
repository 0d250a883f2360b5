//! Command-line front end. Every subcommand writes to the supplied stream
//! so output is testable in-process; bounds are parsed to exact integers
//! (scientific notation included), never through floating point.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::arith;
use crate::classify;
use crate::dw;
use crate::error::{Error, Result};
use crate::fixture;
use crate::heuristic;
use crate::polysieve::{self, PolyFamily};
use crate::primes;

#[derive(Debug, Parser)]
#[command(
    name = "weilbound",
    about = "Hasse-Weil bound defects: Serre primes, Deuring-Waterhouse numbers, genus-2/3 classification, and quadratic-form prime counts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search [min, max) for primes p with p^exp a Deuring-Waterhouse number
    Serre {
        #[arg(long, default_value = "2")]
        min: String,
        #[arg(long)]
        max: String,
        #[arg(long, default_value_t = 5)]
        exp: u32,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// List all Deuring-Waterhouse numbers below a bound
    DwEnum {
        #[arg(long)]
        bound: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count x ≥ 1 with poly(x) prime and poly(x) ≤ bound
    Polysieve {
        #[arg(long)]
        family: String,
        #[arg(long)]
        bound: String,
        /// Also write the x values themselves, one per line
        #[arg(long)]
        emit_x: Option<PathBuf>,
    },
    /// Classify prime powers read from a file ("p e" or decimal q lines) or
    /// a single --q value
    Classify {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        q: Option<String>,
    },
    /// Log log estimate and optional exact reciprocal sum over (from, to)
    Heuristic {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        exact_sum: bool,
        /// Also print the expected above/below split of this many samples
        #[arg(long)]
        split_n: Option<u64>,
        /// Threshold for the split; defaults to (√5−1)/2
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Prime-count table rows for each decade bound up to max-bound
    Tables {
        #[arg(long)]
        table: u8,
        #[arg(long)]
        max_bound: String,
    },
    /// Re-verify the shipped 146-entry list (or a replacement file)
    VerifyFixture {
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

/// Exact integer bound: plain decimal digits, or digits 'e' digits read as
/// mantissa·10^exponent.
pub fn parse_bound(text: &str) -> Result<BigUint> {
    let s = text.trim();
    let bad = |why: &str| Error::BadBound(text.to_string(), why.to_string());
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, x)) => (m, Some(x)),
        None => (s, None),
    };
    if mantissa.is_empty() || !mantissa.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(
            "expected decimal digits, optionally followed by e<digits>",
        ));
    }
    let mut value = mantissa.parse::<BigUint>().expect("digits");
    if let Some(exponent) = exponent {
        if exponent.is_empty() || !exponent.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("exponent must be a nonnegative integer"));
        }
        let exponent: u32 = exponent.parse().map_err(|_| bad("exponent out of range"))?;
        value *= BigUint::from(10u32).pow(exponent);
    }
    Ok(value)
}

fn parse_bound_u64(text: &str) -> Result<u64> {
    u64::try_from(&parse_bound(text)?)
        .map_err(|_| Error::BadBound(text.to_string(), "exceeds the 64-bit range".to_string()))
}

fn env_threads() -> Option<usize> {
    std::env::var("WEILBOUND_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}

/// Explicit flag beats WEILBOUND_THREADS beats the machine's parallelism.
fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(env_threads)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

fn resolve_family(name: &str) -> Result<PolyFamily> {
    match PolyFamily::parse(name) {
        Some(PolyFamily::X2PXP2) => Err(Error::UnsupportedFamily),
        Some(family) => Ok(family),
        None => Err(Error::BadBound(
            name.to_string(),
            "unknown polynomial family".to_string(),
        )),
    }
}

/// q itself, factored as p^e with a 64-bit prime base.
pub fn factor_prime_power(q: &BigUint) -> Result<dw::PrimePower> {
    if *q < BigUint::from(2u32) {
        return Err(Error::NotPrimePower(q.clone()));
    }
    let bits = q.bits() as u32;
    for e in (2..bits).rev() {
        let root = q.nth_root(e);
        if root.pow(e) == *q {
            return match u64::try_from(&root) {
                Ok(p) if primes::is_prime_u64(p) => Ok(dw::PrimePower { p, e, q: q.clone() }),
                _ => Err(Error::NotPrimePower(q.clone())),
            };
        }
    }
    match u64::try_from(q) {
        Ok(p) if primes::is_prime_u64(p) => Ok(dw::PrimePower {
            p,
            e: 1,
            q: q.clone(),
        }),
        _ => Err(Error::NotPrimePower(q.clone())),
    }
}

const CLASSIFY_HEADER: &str = "q,p,e,genus2_defect,genus2_reason,genus3_mrd,genus3_reason";

/// One classify row. Genus 3 is a non-square notion, so even exponents
/// leave those two fields empty.
fn classify_row(pp: &dw::PrimePower) -> Result<String> {
    let g2 = classify::genus2_defect(pp);
    let (mrd, reason) = if pp.e.is_multiple_of(2) {
        (String::new(), String::new())
    } else {
        let g3 = classify::genus3_mrd(pp)?;
        (g3.mrd.to_string(), g3.reason.label().to_string())
    };
    Ok(format!(
        "{},{},{},{},{},{},{}",
        pp.q,
        pp.p,
        pp.e,
        g2.defect,
        g2.reason.label(),
        mrd,
        reason
    ))
}

fn parse_classify_line(body: &str, line: usize) -> Result<dw::PrimePower> {
    let wrap = |message: String| Error::FixtureParse { line, message };
    let tokens: Vec<&str> = body.split_whitespace().collect();
    match tokens.as_slice() {
        [q] => {
            let q = parse_bound(q).map_err(|err| wrap(err.to_string()))?;
            factor_prime_power(&q).map_err(|err| wrap(err.to_string()))
        }
        [p, e] => {
            let p = p.parse::<u64>().map_err(|err| wrap(err.to_string()))?;
            let e = e.parse::<u32>().map_err(|err| wrap(err.to_string()))?;
            dw::PrimePower::new(p, e).map_err(|err| wrap(err.to_string()))
        }
        _ => Err(wrap(format!(
            "expected \"p e\" or a single q, got {body:?}"
        ))),
    }
}

fn jsonl_record(
    record: &dw::DWRecord,
    g2: &classify::Genus2Result,
    g3: &classify::Genus3Result,
) -> String {
    format!(
        "{{\"q\":\"{}\",\"p\":{},\"e\":{},\"m\":\"{}\",\"genus2_defect\":{},\"genus2_reason\":\"{}\",\"genus3_mrd\":{},\"genus3_reason\":\"{}\"}}",
        record.pp.q,
        record.pp.p,
        record.pp.e,
        record.m,
        g2.defect,
        g2.reason.label(),
        g3.mrd,
        g3.reason.label()
    )
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(n) = env_threads() {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match cli.command {
        Command::Serre {
            min,
            max,
            exp,
            threads,
            checkpoint,
        } => {
            let lo = parse_bound_u64(&min)?;
            let hi = parse_bound_u64(&max)?;
            let threads = resolve_threads(threads);
            let hits = dw::search_serre_range(lo, hi, exp, threads, checkpoint.as_deref())?;
            for hit in hits {
                writeln!(out, "{}", hit.p)?;
            }
        }
        Command::DwEnum { bound, format } => {
            let bound = parse_bound(&bound)?;
            let records = dw::enumerate_dw(&bound);
            match format {
                Format::Text => {
                    for record in records {
                        writeln!(out, "{}", record.pp)?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "{CLASSIFY_HEADER}")?;
                    for record in records {
                        writeln!(out, "{}", classify_row(&record.pp)?)?;
                    }
                }
                Format::Jsonl => {
                    for record in records {
                        let g2 = classify::genus2_defect(&record.pp);
                        let g3 = classify::genus3_mrd(&record.pp)?;
                        writeln!(out, "{}", jsonl_record(&record, &g2, &g3))?;
                    }
                }
            }
        }
        Command::Polysieve {
            family,
            bound,
            emit_x,
        } => {
            let family = resolve_family(&family)?;
            let bound = parse_bound_u64(&bound)?;
            let count = match emit_x {
                Some(path) => {
                    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
                    let count = polysieve::emit_prime_x_values(family, bound, &mut file)?;
                    file.flush()?;
                    count
                }
                None => polysieve::triple_sieve_count(family, bound)?.count,
            };
            writeln!(out, "family,bound,count")?;
            writeln!(out, "{},{},{}", family.label(), bound, count)?;
        }
        Command::Classify { input, q } => {
            let rows: Vec<dw::PrimePower> = match (input, q) {
                (Some(path), None) => {
                    let text = fs::read_to_string(path)?;
                    let mut rows = Vec::new();
                    for (idx, raw) in text.lines().enumerate() {
                        let body = raw.trim();
                        if body.is_empty() || body.starts_with('#') {
                            continue;
                        }
                        rows.push(parse_classify_line(body, idx + 1)?);
                    }
                    rows
                }
                (None, Some(value)) => vec![parse_classify_line(value.trim(), 1)?],
                _ => {
                    return Err(Error::BadBound(
                        "classify".to_string(),
                        "exactly one of --input or --q is required".to_string(),
                    ))
                }
            };
            writeln!(out, "{CLASSIFY_HEADER}")?;
            for pp in &rows {
                writeln!(out, "{}", classify_row(pp)?)?;
            }
        }
        Command::Heuristic {
            from,
            to,
            exact_sum,
            split_n,
            threshold,
        } => {
            let lo = parse_bound_u64(&from)?;
            let hi = parse_bound_u64(&to)?;
            let estimate = heuristic::estimate(lo, hi, exact_sum)?;
            writeln!(out, "loglog_estimate={:.6}", estimate.loglog_value)?;
            if let Some(sum) = estimate.reciprocal_sum {
                writeln!(out, "reciprocal_sum={sum:.9}")?;
            }
            if let Some(n) = split_n {
                let threshold = threshold.unwrap_or_else(arith::golden_fraction_approx);
                let (above, below) = heuristic::expected_split(n, threshold)?;
                writeln!(out, "expected_above={above:.1}")?;
                writeln!(out, "expected_below={below:.1}")?;
            }
        }
        Command::Tables { table, max_bound } => {
            let families: [PolyFamily; 2] = match table {
                1 => [PolyFamily::X2PXP1, PolyFamily::X2P1],
                2 => [PolyFamily::X2P2, PolyFamily::X2PXP3],
                other => return Err(Error::UnknownTable(other)),
            };
            let max_bound = parse_bound_u64(&max_bound)?;
            if max_bound < 10 {
                return Err(Error::BoundTooSmall(max_bound, 10));
            }
            writeln!(out, "family,bound,count")?;
            let mut bound = 10u64;
            loop {
                for family in families {
                    let row = polysieve::triple_sieve_count(family, bound)?;
                    writeln!(out, "{},{},{}", family.label(), row.bound, row.count)?;
                }
                match bound.checked_mul(10) {
                    Some(next) if next <= max_bound => bound = next,
                    _ => break,
                }
            }
        }
        Command::VerifyFixture { fixture: path } => {
            let text = match path {
                Some(path) => fs::read_to_string(path)?,
                None => fixture::FIXTURE_TEXT.to_string(),
            };
            let (entries, errors) = fixture::parse_fixture(&text);
            if !errors.is_empty() {
                for err in &errors {
                    writeln!(out, "{err}")?;
                }
                let n = errors.len();
                return Err(errors
                    .into_iter()
                    .next()
                    .unwrap_or(Error::FixtureRejected(n)));
            }
            if entries.is_empty() {
                writeln!(out, "0 verified")?;
                return Err(Error::EmptyFixture);
            }
            let report = fixture::verify_entries(&entries);
            if report.rejections.is_empty() {
                let summary = report.summary.expect("clean report");
                writeln!(
                    out,
                    "{} verified; defect1={} defect2={} mrd2={}",
                    report.verified, summary.defect1, summary.defect2, summary.mrd2
                )?;
            } else {
                for rejected in &report.rejections {
                    writeln!(out, "rejected: {rejected}")?;
                }
                writeln!(out, "{} verified", report.verified)?;
                return Err(Error::FixtureRejected(report.rejections.len()));
            }
        }
    }
    Ok(())
}
