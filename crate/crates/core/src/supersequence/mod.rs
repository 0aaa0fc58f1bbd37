//! Supersequences with prescribed growth.
//!
//! Given `A ∼ f` and a stable, superlinear `g ≤ f`, [`build_supersequence`]
//! embeds `a_k` at index `n_k = ⌊g⁻¹f(k)⌋`, fills every other index `n` with
//! an element of `ℕ₀ ∖ 𝒜` chosen from `[(1−1/t)g(n), (1+1/t)g(n)]`, and sorts.
//! [`adversarial_construction`] builds inputs for exponential `g` where no
//! such supersequence exists.

mod adversarial;
mod schedule;

pub use adversarial::{adversarial_construction, AdversarialResult, DEFAULT_GAMMA};
pub use schedule::{
    index_schedule, select_from_complement, select_from_complement_at, ComplementSelection,
    SelectionSchedule,
};

use std::collections::HashSet;

use num_bigint::BigUint;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{probe_stability, GrowthError, GrowthFunction};
use crate::sequences::{asymptotic_verdict, AsymptoticVerdict, SequenceError, SequencePrefix};
use crate::sets::{Complement, SortedSet};

/// Largest working value; beyond 2^53 interval endpoints stop being exact doubles.
pub const MAX_WORKING_VALUE: u64 = 1 << 53;

/// A hypothesis of the construction that fails on the given input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema, Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    #[error("A is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("g is not asymptotically stable: tail sup of g(x+{delta})/g(x) is {tail_sup_ratio}, above 1 + {tolerance}")]
    Unstable {
        delta: f64,
        tail_sup_ratio: f64,
        tolerance: f64,
    },
    #[error("g is not superlinear: g(x)/x stops increasing at x = {x}")]
    NotSuperlinear { x: u64 },
    #[error("A is not asymptotic to f: tail sup deviation {sup_deviation} exceeds {epsilon}")]
    InputNotAsymptotic { sup_deviation: f64, epsilon: f64 },
    #[error("g({x}) = {g} exceeds f({x}) = {f}")]
    GAboveF { x: u64, g: f64, f: f64 },
    #[error("spacing g⁻¹f({x}+1) − g⁻¹f({x}) = {gap} is below 1")]
    Spacing { x: u64, gap: f64 },
    #[error("complement density {lower} on [0, {x_max}] is below the gate {gate}")]
    DensityGate { lower: f64, gate: f64, x_max: u64 },
    #[error("g(n)/n never exceeds 1 on 1..={n_max}")]
    NoTier { n_max: u64 },
    #[error("tier {t} condition fails at n = {n}: g(n)/n = {growth_ratio}, count {count}, needed g(n)/t = {needed}")]
    TierCondition {
        n: u64,
        t: u64,
        growth_ratio: f64,
        count: u64,
        needed: f64,
    },
    #[error("m_k must be strictly increasing and at least 1; fails at k = {k}")]
    BadIndices { k: usize },
    #[error("no exponential growth along m at k = {k}: {which} ratio {ratio} is below {required}")]
    NoExponentialGrowth {
        k: usize,
        which: String,
        ratio: f64,
        required: f64,
    },
    #[error("thinning fails at k = {k}: g(m_(k+1)+1/2) − g(m_k+1/2) = {gap} < 1")]
    Thinning { k: usize, gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SupersequenceError {
    #[error("precondition failed: {0}")]
    Precondition(Violation),
    #[error("index schedule is not strictly increasing at k = {k}: n_k = {n_k}, n_(k+1) = {next}")]
    NonStrictSchedule { k: usize, n_k: u64, next: u64 },
    #[error("selection exhausted at n = {n} (tier {t}): no unused element in [{lo}, {hi}]")]
    Exhausted { n: u64, t: u64, lo: u64, hi: u64 },
    #[error("value {value} was chosen twice or lies in A")]
    Collision { value: String },
    #[error("working range reaches {needed}, above the cap {cap}")]
    Capacity { needed: f64, cap: u64 },
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

impl SupersequenceError {
    /// Hypothesis failures, as opposed to malformed input or internal faults.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            SupersequenceError::Precondition(_)
                | SupersequenceError::NonStrictSchedule { .. }
                | SupersequenceError::Exhausted { .. }
        )
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            SupersequenceError::Precondition(v) => Some(v),
            _ => None,
        }
    }
}

impl From<Violation> for SupersequenceError {
    fn from(v: Violation) -> Self {
        SupersequenceError::Precondition(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SupersequenceConfig {
    /// Tolerance of the `A ∼ f` check.
    pub input_epsilon: f64,
    /// Tolerance of the reported `B ∼ g` verdict.
    pub verdict_epsilon: f64,
    pub stability_delta: f64,
    pub stability_grid_max: f64,
    pub stability_tolerance: f64,
    /// Minimum lower density of the complement on the working range.
    pub density_gate: f64,
    /// When false, only structural checks run (used to demonstrate what
    /// happens when the hypotheses fail).
    pub check_preconditions: bool,
}

impl Default for SupersequenceConfig {
    fn default() -> Self {
        SupersequenceConfig {
            input_epsilon: 0.05,
            verdict_epsilon: 0.05,
            stability_delta: 1.0,
            stability_grid_max: 1e6,
            stability_tolerance: 0.01,
            density_gate: 0.9,
            check_preconditions: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SupersequenceResult {
    #[serde(rename = "B")]
    pub b: SequencePrefix,
    /// `n_k` (1-based) with `b_{n_k} = a_k`.
    pub embedding: Vec<usize>,
    pub filler_count: usize,
    pub verdict: AsymptoticVerdict,
}

pub fn build_supersequence(
    a: &SequencePrefix,
    f: &GrowthFunction,
    g: &GrowthFunction,
    n_max: usize,
    config: &SupersequenceConfig,
) -> Result<SupersequenceResult, SupersequenceError> {
    if let Some(index) = a.first_non_increase() {
        return Err(Violation::NotIncreasing { index }.into());
    }
    let n_max_u = n_max as u64;
    if config.check_preconditions {
        let s = probe_stability(
            g,
            config.stability_delta,
            config.stability_grid_max,
            config.stability_tolerance,
        )?;
        if !s.stable {
            return Err(Violation::Unstable {
                delta: s.delta,
                tail_sup_ratio: s.tail_sup_ratio,
                tolerance: s.tolerance,
            }
            .into());
        }
        check_superlinear(g, n_max_u)?;
        let v = asymptotic_verdict(a, f, config.input_epsilon)?;
        if !v.holds {
            return Err(Violation::InputNotAsymptotic {
                sup_deviation: v.sup_deviation,
                epsilon: v.epsilon,
            }
            .into());
        }
    }

    let embedding_idx =
        schedule::schedule_within(f, g, a.len(), n_max_u, config.check_preconditions)?;
    let embedded: HashSet<u64> = embedding_idx.iter().copied().collect();
    let fillers: Vec<u64> = (1..=n_max_u).filter(|n| !embedded.contains(n)).collect();

    let mut chosen: Vec<u64> = Vec::new();
    if !fillers.is_empty() {
        let top = 2.0 * g.eval(n_max as f64)?;
        if !(top <= MAX_WORKING_VALUE as f64) {
            return Err(SupersequenceError::Capacity {
                needed: top,
                cap: MAX_WORKING_VALUE,
            });
        }
        let a_set = SortedSet::from_prefix_upto(a, top as u64 + 1);
        let complement = Complement::new(&a_set);
        let gate = config.check_preconditions.then_some(config.density_gate);
        let sel = select_from_complement_at(&complement, g, n_max_u, &fillers, gate)?;
        for &c in &sel.values {
            if a_set.members().binary_search(&c).is_ok() {
                return Err(SupersequenceError::Collision {
                    value: c.to_string(),
                });
            }
        }
        chosen = sel.values;
    }

    // Indices in B' are 1..=n_max; a_k sits at n_k, fillers elsewhere.
    let mut primed: Vec<(BigUint, Option<usize>)> = Vec::with_capacity(n_max);
    primed.extend(
        embedding_idx
            .iter()
            .enumerate()
            .map(|(k, _)| (a.values()[k].clone(), Some(k))),
    );
    primed.extend(chosen.iter().map(|&c| (BigUint::from(c), None)));
    primed.sort_by(|x, y| x.0.cmp(&y.0));
    if let Some(w) = primed.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(SupersequenceError::Collision {
            value: w[0].0.to_string(),
        });
    }

    let mut embedding = vec![0usize; embedding_idx.len()];
    for (pos, (_, origin)) in primed.iter().enumerate() {
        if let Some(k) = origin {
            embedding[*k] = pos + 1;
        }
    }
    let b = SequencePrefix::new(primed.into_iter().map(|(v, _)| v).collect())?;
    let verdict = asymptotic_verdict(&b, g, config.verdict_epsilon)?;
    Ok(SupersequenceResult {
        b,
        embedding,
        filler_count: chosen.len(),
        verdict,
    })
}

/// `g(n)/n` strictly increasing over `1..=n_max`, checked in log space.
fn check_superlinear(g: &GrowthFunction, n_max: u64) -> Result<(), SupersequenceError> {
    let start = g.domain_start().ceil().max(1.0) as u64;
    let mut prev = f64::NEG_INFINITY;
    for x in start..=n_max.max(start + 1) {
        let xf = x as f64;
        let cur = g.ln_eval(xf)? - xf.ln();
        if cur <= prev {
            return Err(Violation::NotSuperlinear { x }.into());
        }
        prev = cur;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(a: f64, h: f64) -> GrowthFunction {
        GrowthFunction::power(a, h).unwrap()
    }

    #[test]
    fn doubled_squares_into_squares() {
        let n = 10_000;
        let a = SequencePrefix::from_u64s((1..=(n as u64) / 2).map(|k| 2 * k * k)).unwrap();
        let r = build_supersequence(
            &a,
            &power(2.0, 2.0),
            &power(1.0, 2.0),
            n,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.b.len(), n);
        assert!(r.b.is_strictly_increasing());
        for (k, &pos) in r.embedding.iter().enumerate() {
            assert_eq!(r.b.term(pos), Some(&a.values()[k]));
        }
        assert!(r.embedding.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.filler_count + r.embedding.len(), n);
        assert!(r.verdict.holds, "{:?}", r.verdict);
    }

    #[test]
    fn equal_growth_keeps_a() {
        let a = SequencePrefix::from_u64s((1..=200u64).map(|k| k * k)).unwrap();
        let f = power(1.0, 2.0);
        let r = build_supersequence(&a, &f, &f, 200, &Default::default()).unwrap();
        assert_eq!(r.b, a);
        assert_eq!(r.filler_count, 0);
        assert_eq!(r.embedding, (1..=200).collect::<Vec<_>>());
    }

    #[test]
    fn exponential_target_is_unstable() {
        let a =
            SequencePrefix::new((1..=40u32).map(|k| BigUint::from(3u32).pow(k)).collect()).unwrap();
        let err = build_supersequence(
            &a,
            &GrowthFunction::exponential(3.0).unwrap(),
            &GrowthFunction::exponential(2.0).unwrap(),
            60,
            &Default::default(),
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                SupersequenceError::Precondition(Violation::Unstable { .. })
            ),
            "{err}"
        );
        assert!(err.is_precondition());
    }

    #[test]
    fn linear_target_is_not_superlinear() {
        let a = SequencePrefix::from_u64s((1..=100u64).map(|k| 2 * k)).unwrap();
        let err = build_supersequence(
            &a,
            &power(2.0, 1.0),
            &power(1.0, 1.0),
            100,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SupersequenceError::Precondition(Violation::NotSuperlinear { .. })
        ));
    }

    #[test]
    fn input_must_track_f() {
        let a = SequencePrefix::from_u64s((1..=100u64).map(|k| 3 * k * k)).unwrap();
        let err = build_supersequence(
            &a,
            &power(2.0, 2.0),
            &power(1.0, 2.0),
            100,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SupersequenceError::Precondition(Violation::InputNotAsymptotic { .. })
        ));
    }

    #[test]
    fn unsorted_input_rejected() {
        let a = SequencePrefix::from_u64s([4, 2, 8, 9, 10, 11, 12, 13, 14, 15]).unwrap();
        let f = power(1.0, 2.0);
        let err = build_supersequence(&a, &f, &f, 10, &Default::default()).unwrap_err();
        assert_eq!(
            err,
            SupersequenceError::Precondition(Violation::NotIncreasing { index: 2 })
        );
    }
}
