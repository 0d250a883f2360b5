use num_bigint::BigUint;

/// Crate-wide error type. Variants are grouped into configuration errors
/// (rejected inputs, exit code 2 at the CLI) and computation errors
/// (exit code 1).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("q must be at least 1")]
    ZeroInput,

    #[error("q = {0} is a perfect square; fractional-part comparison is undefined")]
    PerfectSquare(BigUint),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("exponent {0} must be odd")]
    EvenExponent(u32),

    #[error("exponent {0} is below the supported minimum {1}")]
    ExponentTooSmall(u32, u32),

    #[error("empty or inverted range [{0}, {1})")]
    BadRange(u64, u64),

    #[error("x^2+x+2 is always even and is never sieved")]
    UnsupportedFamily,

    #[error("root finding modulo 2 is handled by the sieve's parity logic")]
    EvenModulus,

    #[error("bound {0} is below the supported minimum {1}")]
    BoundTooSmall(u64, u64),

    #[error("base prime list reaches {0} but the range requires coverage to {1}")]
    BaseTooSmall(u64, u64),

    #[error("bound {0} exceeds the exact-summation limit {1}; use the log-log estimate instead")]
    SumBoundTooLarge(u64, u64),

    #[error("lower bound {0} must exceed e so that log log is defined")]
    LogDomain(u64),

    #[error("threshold {0} must lie strictly between 0 and 1")]
    BadThreshold(f64),

    #[error("{0} is not a prime power with a 64-bit base")]
    NotPrimePower(BigUint),

    #[error("invalid argument {0:?}: {1}")]
    BadBound(String, String),

    #[error("checkpoint mismatch: file covers [{found_lo}, {found_hi}) exponent {found_exp}, run wants [{want_lo}, {want_hi}) exponent {want_exp}")]
    CheckpointMismatch {
        found_lo: u64,
        found_hi: u64,
        found_exp: u32,
        want_lo: u64,
        want_hi: u64,
        want_exp: u32,
    },

    #[error("malformed checkpoint: {0}")]
    CheckpointFormat(String),

    #[error("fixture line {line}: {message}")]
    FixtureParse { line: usize, message: String },

    #[error("entry {index} ({p}^{e}) is not a Deuring-Waterhouse pair")]
    NotDeuringWaterhouse { index: usize, p: u64, e: u32 },

    #[error("{0} fixture entries failed verification")]
    FixtureRejected(usize),

    #[error("fixture contains no entries")]
    EmptyFixture,

    #[error("unknown table {0}; expected 1 or 2")]
    UnknownTable(u8),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code the CLI maps this error to: 2 for rejected configuration,
    /// 1 for failures while computing or doing I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ZeroInput
            | Error::PerfectSquare(_)
            | Error::NotPrime(_)
            | Error::EvenExponent(_)
            | Error::ExponentTooSmall(..)
            | Error::BadRange(..)
            | Error::UnsupportedFamily
            | Error::EvenModulus
            | Error::BoundTooSmall(..)
            | Error::BaseTooSmall(..)
            | Error::SumBoundTooLarge(..)
            | Error::LogDomain(_)
            | Error::BadThreshold(_)
            | Error::BadBound(..)
            | Error::UnknownTable(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
