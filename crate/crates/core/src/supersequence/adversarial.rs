use num_bigint::BigUint;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{SupersequenceError, Violation};
use crate::growth::{interpolate_above, GrowthError, GrowthFunction, Knot};
use crate::numeric::floor_to_biguint;
use crate::sequences::SequencePrefix;

/// Default margin: both growth ratios along `m` must be at least `1 + γ`.
pub const DEFAULT_GAMMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AdversarialResult {
    pub f: GrowthFunction,
    #[serde(rename = "A")]
    pub a: SequencePrefix,
    pub gamma: f64,
    /// `min_k g(m_k+½)/g(m_k)`.
    pub min_lower_ratio: f64,
    /// `min_k g(m_k+1)/g(m_k+½)`.
    pub min_upper_ratio: f64,
    /// `min_k min_n |f(k)/g(n) − 1|`.
    pub witness: f64,
    pub witness_k: usize,
    /// `γ/(1+γ)`, what the margins alone guarantee for the witness.
    pub guaranteed_lower_bound: f64,
}

/// Builds `f` through the knots `(k, g(m_k+½))` and `A = {⌊f(k)⌋}`, for which
/// no `g(n)` comes close to any `f(k)`.
pub fn adversarial_construction(
    g: &GrowthFunction,
    m: &[u64],
    gamma: f64,
) -> Result<AdversarialResult, SupersequenceError> {
    if !(gamma > 0.0) {
        return Err(GrowthError::Invalid(format!("gamma must be positive, got {gamma}")).into());
    }
    let required = 1.0 + gamma;
    let first = g.domain_start().ceil().max(1.0) as u64;
    let mut knots: Vec<Knot> = Vec::with_capacity(m.len());
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for (i, &mk) in m.iter().enumerate() {
        let k = i + 1;
        if mk < first || (i > 0 && mk <= m[i - 1]) {
            return Err(Violation::BadIndices { k }.into());
        }
        let x = mk as f64;
        let lower = g.ln_ratio(x, 0.5)?.exp();
        let upper = g.ln_ratio(x + 0.5, 0.5)?.exp();
        if lower < required {
            return Err(Violation::NoExponentialGrowth {
                k,
                which: "g(m_k+1/2)/g(m_k)".into(),
                ratio: lower,
                required,
            }
            .into());
        }
        if upper < required {
            return Err(Violation::NoExponentialGrowth {
                k,
                which: "g(m_k+1)/g(m_k+1/2)".into(),
                ratio: upper,
                required,
            }
            .into());
        }
        min_lower = min_lower.min(lower);
        min_upper = min_upper.min(upper);
        let lambda = g.eval(x + 0.5)?;
        if let Some(&(_, prev)) = knots.last() {
            if lambda - prev < 1.0 {
                return Err(Violation::Thinning {
                    k: k - 1,
                    gap: lambda - prev,
                }
                .into());
            }
        }
        knots.push((k as u64, lambda));
    }
    if knots.is_empty() {
        return Err(Violation::BadIndices { k: 1 }.into());
    }

    let f = interpolate_above(g, &knots)?;
    let values: Vec<BigUint> = knots
        .iter()
        .map(|&(_, l)| floor_to_biguint(l).expect("finite positive knot value"))
        .collect();
    let a = SequencePrefix::new(values)?;
    if let Some(index) = a.first_non_increase() {
        return Err(Violation::NotIncreasing { index }.into());
    }

    let mut witness = f64::INFINITY;
    let mut witness_k = 1;
    for &(k, lambda) in &knots {
        let d = nearest_deviation(g, lambda, first)?;
        if d < witness {
            witness = d;
            witness_k = k as usize;
        }
    }
    Ok(AdversarialResult {
        f,
        a,
        gamma,
        min_lower_ratio: min_lower,
        min_upper_ratio: min_upper,
        witness,
        witness_k,
        guaranteed_lower_bound: gamma / (1.0 + gamma),
    })
}

/// `min_n |y/g(n) − 1|` over integers `n ≥ first`. By monotonicity only the
/// integers bracketing `g⁻¹(y)` matter; one extra on each side absorbs
/// rounding in the inverse.
fn nearest_deviation(g: &GrowthFunction, y: f64, first: u64) -> Result<f64, SupersequenceError> {
    let x = g.inverse(y)?;
    let base = x.floor() as u64;
    let ln_y = y.ln();
    let mut best = f64::INFINITY;
    for n in base.saturating_sub(1).max(first)..=base + 2 {
        let d = ((ln_y - g.ln_eval(n as f64)?).exp() - 1.0).abs();
        best = best.min(d);
    }
    Ok(best)
}
