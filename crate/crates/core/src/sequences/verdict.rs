use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{SequenceError, SequencePrefix};
use crate::growth::GrowthFunction;
use crate::numeric::ratio_to_growth;

/// Minimum prefix length accepted by [`asymptotic_verdict`].
pub const MIN_VERDICT_LEN: usize = 10;

/// Finite-scale statement "`a_n / f(n)` stays within `ε` of 1 on the tail".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AsymptoticVerdict {
    pub epsilon: f64,
    /// Smallest `N₀` with `|a_n/f(n) − 1| ≤ ε` for every `n ∈ [N₀, N]`;
    /// `N + 1` when even `a_N` misses.
    pub threshold_index: usize,
    /// First index of the tail window `[⌊N/2⌋, N]`.
    pub window_start: usize,
    pub window_end: usize,
    /// `max |a_n/f(n) − 1|` over the tail window.
    pub sup_deviation: f64,
    pub holds: bool,
    /// Clusters of `a_n/f(n)` over `[⌈√N⌉, N]`, reported when the verdict fails.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub limit_points: Vec<LimitPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LimitPoint {
    pub mean: f64,
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

pub fn asymptotic_verdict(
    a: &SequencePrefix,
    f: &GrowthFunction,
    epsilon: f64,
) -> Result<AsymptoticVerdict, SequenceError> {
    let n = a.len();
    if n < MIN_VERDICT_LEN {
        return Err(SequenceError::TooShort {
            len: n,
            min: MIN_VERDICT_LEN,
        });
    }
    let ratios = a
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| ratio_to_growth(v, f, (i + 1) as f64))
        .collect::<Result<Vec<f64>, _>>()?;
    let dev = |r: f64| (r - 1.0).abs();

    let trailing_ok = ratios
        .iter()
        .rev()
        .take_while(|&&r| dev(r) <= epsilon)
        .count();
    let threshold_index = n + 1 - trailing_ok;

    let window_start = (n / 2).max(1);
    let sup_deviation = ratios[window_start - 1..]
        .iter()
        .map(|&r| dev(r))
        .fold(0.0, f64::max);
    let holds = sup_deviation <= epsilon;

    let limit_points = if holds {
        Vec::new()
    } else {
        let from = ((n as f64).sqrt().ceil() as usize).max(1);
        cluster(&ratios[from - 1..], epsilon)
    };

    Ok(AsymptoticVerdict {
        epsilon,
        threshold_index,
        window_start,
        window_end: n,
        sup_deviation,
        holds,
        limit_points,
    })
}

/// Groups sorted ratios into runs whose consecutive gaps are at most `gap`.
fn cluster(ratios: &[f64], gap: f64) -> Vec<LimitPoint> {
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<LimitPoint> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            let run = &sorted[start..i];
            out.push(LimitPoint {
                mean: run.iter().sum::<f64>() / run.len() as f64,
                count: run.len(),
                min: run[0],
                max: run[run.len() - 1],
            });
            start = i;
        }
    }
    out
}
