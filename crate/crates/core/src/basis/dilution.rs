use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{iterated_sumset, BasisError, CoverageReport};
use crate::growth::GrowthFunction;
use crate::numeric::factorial;
use crate::sequences::SequencePrefix;
use crate::supersequence::{build_supersequence, SupersequenceConfig, SupersequenceResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DilutionOutcome {
    pub h: u32,
    pub alpha: f64,
    pub beta: f64,
    pub supersequence: SupersequenceResult,
    pub coverage_a: CoverageReport,
    pub coverage_b: CoverageReport,
    /// `h𝒜 ⊆ h𝓑` on `[0, X]`, bit for bit.
    pub sumset_contains: bool,
    /// Mean of `n_k/k` over the tail half of the embedding.
    pub mean_spacing: f64,
    /// `(α/β)^{1/h}`.
    pub expected_spacing: f64,
}

impl DilutionOutcome {
    pub fn succeeded(&self) -> bool {
        self.supersequence.verdict.holds && self.sumset_contains
    }
}

/// `{0, 1, …, pad} ∪ {round(α·k^h) : 1 ≤ k ≤ terms}`, sorted and deduplicated.
/// Without a pad only the power values are used.
pub fn synthetic_seed(
    alpha: f64,
    h: u32,
    terms: u64,
    pad: Option<u64>,
) -> Result<SequencePrefix, BasisError> {
    if !(alpha > 0.0 && alpha.is_finite()) || h == 0 {
        return Err(BasisError::Precondition(format!(
            "need alpha > 0 and h ≥ 1, got {alpha}, {h}"
        )));
    }
    let mut vals: Vec<u64> = pad.map(|p| (0..=p).collect()).unwrap_or_default();
    for k in 1..=terms {
        let v = (alpha * (k as f64).powi(h as i32)).round();
        if !(v < (1u64 << 53) as f64) {
            return Err(BasisError::Precondition(format!(
                "round(α·{k}^{h}) exceeds 2^53"
            )));
        }
        vals.push(v as u64);
    }
    vals.sort_unstable();
    vals.dedup();
    Ok(SequencePrefix::from_u64s(vals)?)
}

/// Embeds `A ∼ α·x^h` into `B ∼ β·x^h` and compares the `h`-fold sumsets on `[0, X]`.
pub fn dilute_eigenvalue(
    a: &SequencePrefix,
    h: u32,
    alpha: f64,
    beta: f64,
    n_max: usize,
    x_max: u64,
    config: &SupersequenceConfig,
) -> Result<DilutionOutcome, BasisError> {
    if h == 0 {
        return Err(BasisError::InvalidOrder);
    }
    if !(beta > 0.0 && beta < alpha && alpha.is_finite()) {
        return Err(BasisError::Precondition(format!(
            "need 0 < beta < alpha, got beta = {beta}, alpha = {alpha}"
        )));
    }
    let hf = h as f64;
    let f = GrowthFunction::power(alpha, hf)?;
    let g = GrowthFunction::power(beta, hf)?;
    let result = build_supersequence(a, &f, &g, n_max, config)?;

    let sum_a = iterated_sumset(a, h, x_max)?;
    let sum_b = iterated_sumset(&result.b, h, x_max)?;
    let sumset_contains = sum_a.is_subset_of(&sum_b);

    let k_total = result.embedding.len();
    let start = (k_total / 2).max(1);
    let mean_spacing = if k_total == 0 {
        0.0
    } else {
        let tail = &result.embedding[start - 1..];
        tail.iter()
            .enumerate()
            .map(|(j, &n)| n as f64 / (start + j) as f64)
            .sum::<f64>()
            / tail.len() as f64
    };

    Ok(DilutionOutcome {
        h,
        alpha,
        beta,
        coverage_a: CoverageReport::from_sumset(h, &sum_a),
        coverage_b: CoverageReport::from_sumset(h, &sum_b),
        supersequence: result,
        sumset_contains,
        mean_spacing,
        expected_spacing: (alpha / beta).powf(1.0 / hf),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BetaOutcome {
    pub beta: f64,
    pub succeeded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Dilution results for one `α` against a grid of `β < α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub outcomes: Vec<BetaOutcome>,
}

impl SpectrumSample {
    pub fn record(beta: f64, outcome: &Result<DilutionOutcome, BasisError>) -> BetaOutcome {
        match outcome {
            Ok(o) => BetaOutcome {
                beta,
                succeeded: o.succeeded(),
                detail: (!o.succeeded()).then(|| {
                    format!(
                        "verdict holds: {}, sumset contained: {}",
                        o.supersequence.verdict.holds, o.sumset_contains
                    )
                }),
            },
            Err(e) => BetaOutcome {
                beta,
                succeeded: false,
                detail: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SpectrumLine {
    pub alpha: f64,
    pub tested: usize,
    pub succeeded: usize,
    /// Every tested `β < α` succeeded.
    pub downward_closed: bool,
    pub above_ceiling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SpectrumReport {
    pub h: u32,
    /// `1/h!`.
    pub ceiling: f64,
    pub lines: Vec<SpectrumLine>,
    pub downward_closed: bool,
}

pub fn spectrum_interval_report(h: u32, samples: &[SpectrumSample]) -> SpectrumReport {
    let ceiling = 1.0 / num_traits::ToPrimitive::to_f64(&factorial(h)).unwrap_or(f64::INFINITY);
    let lines: Vec<SpectrumLine> = samples
        .iter()
        .map(|s| {
            let below: Vec<&BetaOutcome> = s.outcomes.iter().filter(|o| o.beta < s.alpha).collect();
            let succeeded = below.iter().filter(|o| o.succeeded).count();
            SpectrumLine {
                alpha: s.alpha,
                tested: below.len(),
                succeeded,
                downward_closed: succeeded == below.len(),
                above_ceiling: s.alpha > ceiling,
            }
        })
        .collect();
    let downward_closed = lines.iter().all(|l| l.downward_closed);
    SpectrumReport {
        h,
        ceiling,
        lines,
        downward_closed,
    }
}
