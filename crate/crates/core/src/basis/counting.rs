use num_bigint::BigUint;
use num_traits::Pow;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{BasisError, CoverageReport};
use crate::numeric::{binomial, factorial};
use crate::sequences::SequencePrefix;
use crate::sets::{IntegerSet, SortedSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CountingCheck {
    pub holds: bool,
    pub points_checked: usize,
    /// Smallest checked `x` at which either inequality fails.
    pub first_failure: Option<u64>,
}

/// Checks `x − n₀ < C(𝒜(0,x)+h−1, h) ≤ (𝒜(0,x)+h−1)^h / h!` for every
/// `x ∈ [n₀, X]`, exactly. The left side grows with `x` while the count is
/// constant between members, so the right ends of those runs (`a − 1` for
/// members `a`, and `X`) are the only points that can fail.
pub fn check_counting_inequality(
    a: &SequencePrefix,
    h: u32,
    report: &CoverageReport,
) -> Result<CountingCheck, BasisError> {
    let n0 = window_start(h, report)?;
    let x_max = report.x_max;
    let members = SortedSet::from_prefix_upto(a, x_max);
    let mut points: Vec<u64> = members
        .members()
        .iter()
        .filter_map(|&m| m.checked_sub(1))
        .filter(|&x| x >= n0)
        .collect();
    points.push(n0);
    points.push(x_max);
    points.sort_unstable();
    points.dedup();

    let h_fact = factorial(h);
    let mut first_failure = None;
    for &x in &points {
        let m = members.count_in(0, x);
        let top = m + h as u64 - 1;
        let c = binomial(top, h);
        let left = BigUint::from(x - n0) < c;
        let right = &c * &h_fact <= Pow::pow(BigUint::from(top), h);
        if !(left && right) {
            first_failure = Some(x);
            break;
        }
    }
    Ok(CountingCheck {
        holds: first_failure.is_none(),
        points_checked: points.len(),
        first_failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct EigenvalueReport {
    pub h: u32,
    /// Mean of `a_n/n^h` over the tail `[⌊N/2⌋, N]` of the distinct members up to `X`.
    pub alpha_hat: f64,
    /// `1/h!`.
    pub bound: f64,
    pub terms: usize,
    pub ineq1_ok: bool,
    /// `h!·(a_n − n₀) < (n+h−1)^h` for every member `a_n ≤ X`.
    pub ineq2_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq2_first_failure: Option<usize>,
}

pub fn eigenvalue_report(
    a: &SequencePrefix,
    h: u32,
    report: &CoverageReport,
) -> Result<EigenvalueReport, BasisError> {
    let n0 = window_start(h, report)?;
    let ineq1_ok = check_counting_inequality(a, h, report)?.holds;
    let members = SortedSet::from_prefix_upto(a, report.x_max);
    let vals = members.members();
    let h_fact = factorial(h);

    let mut ineq2_first_failure = None;
    for (i, &v) in vals.iter().enumerate() {
        let n = i as u64 + 1;
        if v > n0 && BigUint::from(v - n0) * &h_fact >= Pow::pow(BigUint::from(n + h as u64 - 1), h)
        {
            ineq2_first_failure = Some(i + 1);
            break;
        }
    }

    let terms = vals.len();
    let start = (terms / 2).max(1);
    let alpha_hat = if terms == 0 {
        0.0
    } else {
        let tail = &vals[start - 1..];
        let sum: f64 = tail
            .iter()
            .enumerate()
            .map(|(j, &v)| v as f64 / ((start + j) as f64).powi(h as i32))
            .sum();
        sum / tail.len() as f64
    };
    Ok(EigenvalueReport {
        h,
        alpha_hat,
        bound: 1.0 / ieee(&h_fact),
        terms,
        ineq1_ok,
        ineq2_ok: ineq2_first_failure.is_none(),
        ineq2_first_failure,
    })
}

fn ieee(n: &BigUint) -> f64 {
    num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY)
}

fn window_start(h: u32, report: &CoverageReport) -> Result<u64, BasisError> {
    if report.h != h {
        return Err(BasisError::OrderMismatch {
            h,
            report_h: report.h,
        });
    }
    match report.n0_window {
        Some(n0) if report.is_window_basis => Ok(n0),
        _ => Err(BasisError::NotWindowBasis {
            h,
            x_max: report.x_max,
        }),
    }
}
