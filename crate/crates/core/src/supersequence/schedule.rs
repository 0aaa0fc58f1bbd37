use std::collections::HashSet;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{SupersequenceError, Violation, MAX_WORKING_VALUE};
use crate::growth::{inverse_compose, GrowthError, GrowthFunction};
use crate::numeric::snapped_floor;
use crate::sequences::density_estimate_of_set;
use crate::sets::IntegerSet;

/// Relative slack for the `g ≤ f` and unit-spacing checks.
const CHECK_SLACK: f64 = 1e-9;

/// `n_k = ⌊g⁻¹f(k)⌋` for `k = 1..=k_max`, after checking `g ≤ f` and
/// `g⁻¹f(x+1) − g⁻¹f(x) ≥ 1` on the integer grid.
pub fn index_schedule(
    f: &GrowthFunction,
    g: &GrowthFunction,
    k_max: usize,
) -> Result<Vec<u64>, SupersequenceError> {
    schedule_within(f, g, k_max, u64::MAX, true)
}

/// The schedule truncated to indices `n_k ≤ n_max`.
pub(crate) fn schedule_within(
    f: &GrowthFunction,
    g: &GrowthFunction,
    k_max: usize,
    n_max: u64,
    check: bool,
) -> Result<Vec<u64>, SupersequenceError> {
    let mut out: Vec<u64> = Vec::new();
    let mut prev_t: Option<f64> = None;
    for k in 1..=k_max as u64 {
        let x = k as f64;
        if check {
            let (gv, fv) = (g.eval(x)?, f.eval(x)?);
            if gv > fv * (1.0 + CHECK_SLACK) {
                return Err(Violation::GAboveF { x: k, g: gv, f: fv }.into());
            }
        }
        let t = inverse_compose(g, f, x)?;
        if let Some(p) = prev_t {
            if check && t - p < 1.0 - CHECK_SLACK * t.max(1.0) {
                return Err(Violation::Spacing {
                    x: k - 1,
                    gap: t - p,
                }
                .into());
            }
        }
        prev_t = Some(t);
        let n = snapped_floor(t);
        if n < 1.0 {
            return Err(Violation::GAboveF {
                x: k,
                g: g.eval(x)?,
                f: f.eval(x)?,
            }
            .into());
        }
        if n > n_max as f64 {
            break;
        }
        let n = n as u64;
        if let Some(&last) = out.last() {
            if n <= last {
                return Err(SupersequenceError::NonStrictSchedule {
                    k: k as usize - 1,
                    n_k: last,
                    next: n,
                });
            }
        }
        out.push(n);
    }
    Ok(out)
}

/// Tier thresholds `N_1 < N_2 < …`: index `n` is in tier `t` when
/// `N_t ≤ n < N_{t+1}`, and indices before `N_1` are in tier 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SelectionSchedule {
    thresholds: Vec<u64>,
    first_threshold_value: f64,
}

impl SelectionSchedule {
    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn tier_of(&self, n: u64) -> u64 {
        self.thresholds.partition_point(|&t| t <= n) as u64
    }

    /// Candidate interval for index `n`: `[(1−1/t)g(n), (1+1/t)g(n)]` in tier
    /// `t ≥ 1`, `[0, 2g(N_1)]` in tier 0.
    pub fn interval(&self, g: &GrowthFunction, n: u64) -> Result<(u64, u64), GrowthError> {
        let t = self.tier_of(n);
        if t == 0 {
            return Ok((0, (2.0 * self.first_threshold_value).floor() as u64));
        }
        Ok(tier_interval(g.eval(n as f64)?, t))
    }
}

fn tier_interval(gn: f64, t: u64) -> (u64, u64) {
    let w = 1.0 / t as f64;
    (
        ((1.0 - w) * gn).ceil() as u64,
        ((1.0 + w) * gn).floor() as u64,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ComplementSelection {
    pub schedule: SelectionSchedule,
    pub indices: Vec<u64>,
    /// `values[i]` is the element chosen for `indices[i]`.
    pub values: Vec<u64>,
}

/// Chooses distinct `c_n ∈ S` for every `n ∈ 1..=n_max`.
pub fn select_from_complement(
    set: &impl IntegerSet,
    g: &GrowthFunction,
    n_max: u64,
    density_gate: Option<f64>,
) -> Result<ComplementSelection, SupersequenceError> {
    let indices: Vec<u64> = (1..=n_max).collect();
    select_from_complement_at(set, g, n_max, &indices, density_gate)
}

/// Chooses distinct `c_n ∈ S` for each of `indices` (increasing, within
/// `1..=n_max`), picking the smallest unused element of the tier interval.
pub fn select_from_complement_at(
    set: &impl IntegerSet,
    g: &GrowthFunction,
    n_max: u64,
    indices: &[u64],
    density_gate: Option<f64>,
) -> Result<ComplementSelection, SupersequenceError> {
    let top = 2.0 * g.eval(n_max as f64)?;
    if !(top <= MAX_WORKING_VALUE as f64) {
        return Err(SupersequenceError::Capacity {
            needed: top,
            cap: MAX_WORKING_VALUE,
        });
    }
    if let Some(gate) = density_gate {
        let d = density_estimate_of_set(set, top as u64);
        if d.lower < gate {
            return Err(Violation::DensityGate {
                lower: d.lower,
                gate,
                x_max: d.x_max,
            }
            .into());
        }
    }
    let schedule = tier_schedule(set, g, n_max)?;

    let mut used: HashSet<u64> = HashSet::with_capacity(indices.len());
    // Every member of the set in [1, frontier) is already used.
    let mut frontier = 1u64;
    let mut values = Vec::with_capacity(indices.len());
    for &n in indices {
        let (lo, hi) = schedule.interval(g, n)?;
        let mut c = lo.max(1);
        if c <= frontier {
            c = frontier;
        }
        while c <= hi && (used.contains(&c) || !set.contains(c)) {
            c += 1;
        }
        if c > hi {
            return Err(SupersequenceError::Exhausted {
                n,
                t: schedule.tier_of(n),
                lo,
                hi,
            });
        }
        used.insert(c);
        while used.contains(&frontier) || !set.contains(frontier) {
            if frontier > hi {
                break;
            }
            frontier += 1;
        }
        values.push(c);
    }
    Ok(ComplementSelection {
        schedule,
        indices: indices.to_vec(),
        values,
    })
}

/// Advances at most one tier per index, to `t + 1` once `g(n)/n > t + 1` and
/// the interval at `t + 1` holds at least `g(n)/(t+1)` elements. The
/// current tier's condition is re-checked at every later index.
fn tier_schedule(
    set: &impl IntegerSet,
    g: &GrowthFunction,
    n_max: u64,
) -> Result<SelectionSchedule, SupersequenceError> {
    let count_at = |gn: f64, t: u64| {
        let (lo, hi) = tier_interval(gn, t);
        set.count_in(lo, hi)
    };
    let mut thresholds = Vec::new();
    let mut first_threshold_value = 0.0;
    let mut t = 0u64;
    for n in 1..=n_max {
        let gn = g.eval(n as f64)?;
        let ratio = gn / n as f64;
        let next = t + 1;
        if ratio > next as f64 && count_at(gn, next) as f64 >= gn / next as f64 {
            if thresholds.is_empty() {
                first_threshold_value = gn;
            }
            thresholds.push(n);
            t = next;
        }
        if t >= 1 {
            let count = count_at(gn, t);
            let needed = gn / t as f64;
            if !(ratio > t as f64) || (count as f64) < needed {
                return Err(Violation::TierCondition {
                    n,
                    t,
                    growth_ratio: ratio,
                    count,
                    needed,
                }
                .into());
            }
        }
    }
    if thresholds.is_empty() {
        return Err(Violation::NoTier { n_max }.into());
    }
    Ok(SelectionSchedule {
        thresholds,
        first_threshold_value,
    })
}
