//! Extended-range reals, certified enclosures and level-index values.

mod decimal;
mod elem;
mod enclosure;
mod ext;
mod level;

pub use decimal::{from_decimal, to_decimal};
pub use elem::{exp_dir, exp_up_wide, ln_dir, logabs_one_minus_exp, sigmoid_hi, softplus, tiny_bound, LN2, LOG2_E};
pub use enclosure::{Cmp, Enclosure, Verdict};
pub use ext::{Dir, ExtReal};
pub use level::LevelReal;

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XnumError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("indeterminate comparison")]
    IndeterminateComparison,
    #[error("exact zero argument")]
    ExactZero,
    #[error("range exceeded: {0}")]
    RangeExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Process-wide precision settings, fixed on first use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    /// Significand bits of `ExtReal` (reported, fixed at 53).
    pub work_bits: u32,
    /// Precision used by reference evaluations in tests and re-checks.
    pub oracle_bits: u32,
    /// `exp` refuses arguments whose binary exponent exceeds this.
    pub max_exp_bits: u64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { work_bits: 53, oracle_bits: 200, max_exp_bits: 4096 }
    }
}

static PRECISION: OnceLock<Precision> = OnceLock::new();

/// Installs the precision settings. Fails if they were already fixed.
pub fn set_precision(p: Precision) -> Result<(), Precision> {
    if p.work_bits != 53 {
        return Err(p);
    }
    PRECISION.set(p)
}

pub fn precision() -> &'static Precision {
    PRECISION.get_or_init(Precision::default)
}
