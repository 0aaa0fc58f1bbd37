//! `h`-fold sumsets over `[0, X]`, window-basis verification, the counting
//! bounds every basis obeys, and eigenvalue dilution through supersequences.

mod counting;
mod dilution;

pub use counting::{check_counting_inequality, eigenvalue_report, CountingCheck, EigenvalueReport};
pub use dilution::{
    dilute_eigenvalue, spectrum_interval_report, synthetic_seed, BetaOutcome, DilutionOutcome,
    SpectrumLine, SpectrumReport, SpectrumSample,
};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmap::Bitmap;
use crate::growth::GrowthError;
use crate::sequences::{SequenceError, SequencePrefix};
use crate::sets::SortedSet;
use crate::supersequence::SupersequenceError;

/// Default bound on the sumset bit-vector length.
pub const DEFAULT_MEMORY_CAP_BITS: u64 = 1 << 30;

/// Most entries listed in [`CoverageReport::missing`].
pub const MISSING_REPORT_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("order h must be at least 1")]
    InvalidOrder,
    #[error("X must be at least 1")]
    InvalidRange,
    #[error("sumset over [0, {x_max}] needs {bits} bits, above the cap of {cap}")]
    Capacity { x_max: u64, bits: u64, cap: u64 },
    #[error("report does not describe a window basis of order {h} on [0, {x_max}]")]
    NotWindowBasis { h: u32, x_max: u64 },
    #[error("report is for order {report_h} but order {h} was requested")]
    OrderMismatch { h: u32, report_h: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Supersequence(#[from] SupersequenceError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

impl BasisError {
    pub fn is_precondition(&self) -> bool {
        match self {
            BasisError::NotWindowBasis { .. } | BasisError::Precondition(_) => true,
            BasisError::Supersequence(e) => e.is_precondition(),
            _ => false,
        }
    }
}

/// Coverage of `[0, X]` by `h𝒜`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CoverageReport {
    pub h: u32,
    pub x_max: u64,
    /// The first [`MISSING_REPORT_LIMIT`] integers of `[0, X]` outside `h𝒜`.
    pub missing: Vec<u64>,
    pub missing_count: u64,
    pub largest_missing: Option<u64>,
    /// Smallest `m` with `[m, X] ⊆ h𝒜`.
    pub n0_window: Option<u64>,
    /// `n0_window` exists and `X − n0_window ≥ X/2`.
    pub is_window_basis: bool,
}

impl CoverageReport {
    pub fn from_sumset(h: u32, sumset: &Bitmap) -> CoverageReport {
        let x_max = sumset.len() as u64 - 1;
        let missing: Vec<u64> = sumset
            .iter_zeros()
            .take(MISSING_REPORT_LIMIT)
            .map(|i| i as u64)
            .collect();
        let missing_count = sumset.len() as u64 - sumset.count_ones() as u64;
        let largest_missing = sumset.last_zero().map(|i| i as u64);
        let n0_window = match largest_missing {
            None => Some(0),
            Some(m) if m < x_max => Some(m + 1),
            Some(_) => None,
        };
        let is_window_basis = n0_window.is_some_and(|n0| 2 * (x_max - n0) >= x_max);
        CoverageReport {
            h,
            x_max,
            missing,
            missing_count,
            largest_missing,
            n0_window,
            is_window_basis,
        }
    }
}

/// `h𝒜 ∩ [0, X]` as a bit-vector of length `X + 1`; values above `X` are ignored.
pub fn iterated_sumset(a: &SequencePrefix, h: u32, x_max: u64) -> Result<Bitmap, BasisError> {
    iterated_sumset_with_cap(a, h, x_max, DEFAULT_MEMORY_CAP_BITS)
}

pub fn iterated_sumset_with_cap(
    a: &SequencePrefix,
    h: u32,
    x_max: u64,
    cap_bits: u64,
) -> Result<Bitmap, BasisError> {
    if h == 0 {
        return Err(BasisError::InvalidOrder);
    }
    if x_max == 0 {
        return Err(BasisError::InvalidRange);
    }
    let bits = x_max + 1;
    if bits > cap_bits {
        return Err(BasisError::Capacity {
            x_max,
            bits,
            cap: cap_bits,
        });
    }
    let members = SortedSet::from_prefix_upto(a, x_max);
    let shifts: Vec<usize> = members.members().iter().map(|&m| m as usize).collect();
    let base = Bitmap::from_indices(bits as usize, shifts.iter().copied());
    let mut acc = base;
    for _ in 1..h {
        acc = acc.shift_or(&shifts);
    }
    Ok(acc)
}

pub fn verify_basis(a: &SequencePrefix, h: u32, x_max: u64) -> Result<CoverageReport, BasisError> {
    Ok(CoverageReport::from_sumset(
        h,
        &iterated_sumset(a, h, x_max)?,
    ))
}
