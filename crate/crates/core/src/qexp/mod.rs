//! Truncated q-series engine.
//!
//! Half-integral weight expansions are stored on 24-scaled indices: the
//! coefficient of `q^{n/24}` lives at integer index `n`, and a series keeps
//! only the residue class of `n` modulo 24 that carries its support.

mod eta;
mod kernel;
pub(crate) mod ntt;
mod series;

pub use eta::{eta_expansion, eta_quotient_expansion, partition_numbers, EtaQuotient};
pub use series::{canonical_start, GradedSeries, IntegerSeries, SeriesJson, SPARSE_RATIO};

use thiserror::Error;

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QexpError {
    #[error("precision underflow: need index {needed}, have {available}")]
    PrecisionUnderflow { needed: i64, available: i64 },
    #[error("eta quotient has leading exponent {leading}/24 <= 0 (pass allow_poles to expand it)")]
    PoleAtInfinity { leading: i64 },
    #[error("series live over different coefficient rings")]
    RingMismatch,
    #[error("residue classes differ: {0} vs {1}")]
    ResidueMismatch(i64, i64),
    #[error("U_m needs gcd(m, 24) = 1, got m = {0}")]
    NotCoprimeTo24(u64),
    #[error("index {n} is not in the support class {residue} mod 24")]
    OffClass { n: i64, residue: i64 },
    #[error("index {n} lies beyond the precision {prec}")]
    BeyondPrecision { n: i64, prec: i64 },
    #[error("invalid eta quotient: {0}")]
    InvalidEta(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}
