//! Growth functions: positive, strictly increasing, unbounded functions on
//! `[domain_start, ∞)`.
//!
//! Four kinds are supported: `α·x^h`, `b^x`, `e^{c√x}` and piecewise
//! interpolations lying strictly above another growth function. All
//! arithmetic is `f64`; every kind also exposes [`GrowthFunction::ln_eval`]
//! so ratios can be formed in log space when `eval` would overflow.

use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative precision targeted by the bisection inverse of interpolated functions.
pub const BISECTION_PRECISION: f64 = 1e-12;
/// Iteration cap of the bisection inverse.
pub const BISECTION_MAX_ITER: usize = 200;
/// Ratio between consecutive points of the stability sampling grid.
pub const STABILITY_GRID_RATIO: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    #[error("y = {y} lies outside the range [{lo}, {hi}]")]
    Range { y: f64, lo: f64, hi: f64 },
    #[error("bisection did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("invalid growth function: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A knot `(k, λ_k)` of an interpolated growth function.
pub type Knot = (u64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind")]
pub enum GrowthKind {
    /// `alpha · x^h`
    #[serde(rename = "power")]
    Power { alpha: f64, h: f64 },
    /// `base^x`
    #[serde(rename = "exp")]
    Exponential { base: f64 },
    /// `exp(c · √x)`
    #[serde(rename = "expsqrt")]
    ExpSqrt { c: f64 },
    /// Passes through every knot and stays strictly above `base`.
    #[serde(rename = "interp")]
    Interpolated {
        base: Box<GrowthFunction>,
        knots: Vec<Knot>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "RawGrowthFunction")]
pub struct GrowthFunction {
    #[serde(flatten)]
    kind: GrowthKind,
    #[serde(
        default = "default_domain_start",
        skip_serializing_if = "is_default_start"
    )]
    domain_start: f64,
}

#[derive(Deserialize)]
struct RawGrowthFunction {
    #[serde(flatten)]
    kind: GrowthKind,
    #[serde(default = "default_domain_start")]
    domain_start: f64,
}

impl TryFrom<RawGrowthFunction> for GrowthFunction {
    type Error = GrowthError;

    fn try_from(raw: RawGrowthFunction) -> Result<Self, Self::Error> {
        match raw.kind {
            GrowthKind::Interpolated { base, knots } => interpolate_above(&base, &knots),
            kind => GrowthFunction::with_domain_start(kind, raw.domain_start),
        }
    }
}

fn default_domain_start() -> f64 {
    1.0
}

fn is_default_start(x: &f64) -> bool {
    *x == 1.0
}

impl GrowthFunction {
    pub fn power(alpha: f64, h: f64) -> Result<Self, GrowthError> {
        Self::with_domain_start(GrowthKind::Power { alpha, h }, 1.0)
    }

    pub fn exponential(base: f64) -> Result<Self, GrowthError> {
        Self::with_domain_start(GrowthKind::Exponential { base }, 1.0)
    }

    pub fn exp_sqrt(c: f64) -> Result<Self, GrowthError> {
        Self::with_domain_start(GrowthKind::ExpSqrt { c }, 1.0)
    }

    /// Builds a closed-form growth function with a custom domain start.
    /// Interpolated functions must go through [`interpolate_above`].
    pub fn with_domain_start(kind: GrowthKind, domain_start: f64) -> Result<Self, GrowthError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match &kind {
            GrowthKind::Power { alpha, h } => {
                if !positive(*alpha) || !positive(*h) {
                    return Err(GrowthError::Invalid(format!(
                        "power needs alpha > 0 and h > 0, got alpha={alpha}, h={h}"
                    )));
                }
            }
            GrowthKind::Exponential { base } => {
                if !(base.is_finite() && *base > 1.0) {
                    return Err(GrowthError::Invalid(format!(
                        "exp needs base > 1, got {base}"
                    )));
                }
            }
            GrowthKind::ExpSqrt { c } => {
                if !positive(*c) {
                    return Err(GrowthError::Invalid(format!(
                        "expsqrt needs c > 0, got {c}"
                    )));
                }
            }
            GrowthKind::Interpolated { .. } => {
                return Err(GrowthError::Invalid(
                    "interpolated functions are built by interpolate_above".into(),
                ));
            }
        }
        if !positive(domain_start) {
            return Err(GrowthError::Invalid(format!(
                "domain_start must be positive, got {domain_start}"
            )));
        }
        Ok(GrowthFunction { kind, domain_start })
    }

    pub fn kind(&self) -> &GrowthKind {
        &self.kind
    }

    pub fn domain_start(&self) -> f64 {
        self.domain_start
    }

    /// Right end of the domain: the last knot for interpolated functions,
    /// `+∞` otherwise.
    pub fn domain_end(&self) -> f64 {
        match &self.kind {
            GrowthKind::Interpolated { knots, .. } => knots[knots.len() - 1].0 as f64,
            _ => f64::INFINITY,
        }
    }

    fn check_domain(&self, x: f64) -> Result<(), GrowthError> {
        if x >= self.domain_start && x <= self.domain_end() {
            Ok(())
        } else {
            Err(GrowthError::Domain {
                x,
                lo: self.domain_start,
                hi: self.domain_end(),
            })
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, GrowthError> {
        self.check_domain(x)?;
        Ok(match &self.kind {
            GrowthKind::Power { alpha, h } => alpha * x.powf(*h),
            GrowthKind::Exponential { base } => base.powf(x),
            GrowthKind::ExpSqrt { c } => (c * x.sqrt()).exp(),
            GrowthKind::Interpolated { base, knots } => eval_interpolated(base, knots, x)?,
        })
    }

    /// Natural logarithm of `eval(x)`, finite even where `eval` overflows.
    pub fn ln_eval(&self, x: f64) -> Result<f64, GrowthError> {
        self.check_domain(x)?;
        Ok(match &self.kind {
            GrowthKind::Power { alpha, h } => alpha.ln() + h * x.ln(),
            GrowthKind::Exponential { base } => x * base.ln(),
            GrowthKind::ExpSqrt { c } => c * x.sqrt(),
            GrowthKind::Interpolated { base, knots } => eval_interpolated(base, knots, x)?.ln(),
        })
    }

    /// The `x` with `eval(x) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64, GrowthError> {
        let lo = self.eval(self.domain_start)?;
        let hi = match &self.kind {
            GrowthKind::Interpolated { knots, .. } => knots[knots.len() - 1].1,
            _ => f64::INFINITY,
        };
        // Values an ulp or so outside the range are rounding noise and clamp
        // to the nearest endpoint.
        let slack = 1e-12 * lo.abs().max(y.abs());
        if !(y >= lo - slack && y <= hi + slack) {
            return Err(GrowthError::Range { y, lo, hi });
        }
        let x = match &self.kind {
            GrowthKind::Power { alpha, h } => (y / alpha).powf(1.0 / h),
            GrowthKind::Exponential { base } => y.ln() / base.ln(),
            GrowthKind::ExpSqrt { c } => {
                let r = y.ln() / c;
                r * r
            }
            GrowthKind::Interpolated { .. } => return self.bisect(y.clamp(lo, hi)),
        };
        Ok(x.max(self.domain_start))
    }

    fn bisect(&self, y: f64) -> Result<f64, GrowthError> {
        let mut lo = self.domain_start;
        let mut hi = self.domain_end();
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= BISECTION_PRECISION * hi {
                return Ok(mid);
            }
            if self.eval(mid)? < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(GrowthError::NonConvergence {
            iterations: BISECTION_MAX_ITER,
        })
    }

    /// `ln(f(x + shift) / f(x))`.
    pub(crate) fn ln_ratio(&self, x: f64, shift: f64) -> Result<f64, GrowthError> {
        Ok(self.ln_eval(x + shift)? - self.ln_eval(x)?)
    }
}

fn eval_interpolated(base: &GrowthFunction, knots: &[Knot], x: f64) -> Result<f64, GrowthError> {
    // First knot with k >= x.
    let i = knots.partition_point(|&(k, _)| (k as f64) < x);
    let (k1, l1) = knots[i];
    if k1 as f64 == x {
        return Ok(l1);
    }
    let (k0, l0) = knots[i - 1];
    let mu = (l0 - base.eval(k0 as f64)?).min(l1 - base.eval(k1 as f64)?);
    let lifted = base.eval(x)? + mu;
    let chord = l0 + (l1 - l0) * (x - k0 as f64) / (k1 - k0) as f64;
    Ok(lifted.max(chord))
}

/// `g⁻¹(f(x))`. Power pairs with a shared exponent use the closed form
/// `(α/β)^{1/h}·x`.
pub fn inverse_compose(g: &GrowthFunction, f: &GrowthFunction, x: f64) -> Result<f64, GrowthError> {
    if let (GrowthKind::Power { alpha: beta, h: hg }, GrowthKind::Power { alpha, h: hf }) =
        (&g.kind, &f.kind)
    {
        if hg == hf {
            f.check_domain(x)?;
            let scale = if alpha == beta {
                1.0
            } else {
                (alpha / beta).powf(1.0 / hf)
            };
            return Ok(scale * x);
        }
    }
    g.inverse(f.eval(x)?)
}

/// Builds the interpolation `f` with `f(k) = λ_k` at every knot and
/// `f(x) > g(x)` in between. On `[k_i, k_{i+1}]`,
/// `f = max(g + μ_i, chord)` with `μ_i = min(λ_i − g(k_i), λ_{i+1} − g(k_{i+1}))`.
pub fn interpolate_above(
    g: &GrowthFunction,
    knots: &[Knot],
) -> Result<GrowthFunction, GrowthError> {
    if knots.is_empty() {
        return Err(GrowthError::Precondition(
            "at least one knot is required".into(),
        ));
    }
    for (i, &(k, lambda)) in knots.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(GrowthError::Precondition(format!(
                "knot {k} has non-finite value {lambda}"
            )));
        }
        if i > 0 {
            let (pk, pl) = knots[i - 1];
            if k <= pk || lambda <= pl {
                return Err(GrowthError::Precondition(format!(
                    "knots must increase strictly in both coordinates: ({pk}, {pl}) then ({k}, {lambda})"
                )));
            }
        }
        let below = g.eval(k as f64).map_err(|_| {
            GrowthError::Precondition(format!("knot {k} lies outside the base domain"))
        })?;
        if lambda <= below {
            return Err(GrowthError::Precondition(format!(
                "λ_{k} = {lambda} does not exceed g({k}) = {below}"
            )));
        }
    }
    Ok(GrowthFunction {
        domain_start: knots[0].0 as f64,
        kind: GrowthKind::Interpolated {
            base: Box::new(g.clone()),
            knots: knots.to_vec(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StabilityVerdict {
    pub delta: f64,
    pub grid_max: f64,
    pub tolerance: f64,
    /// Maximum of `f(x+δ)/f(x)` over the whole grid.
    pub sup_ratio: f64,
    /// Maximum over the tail window `[grid_max/2, grid_max]`.
    pub tail_sup_ratio: f64,
    pub trend: Vec<(f64, f64)>,
    pub stable: bool,
}

/// Samples `f(x+δ)/f(x)` on a geometric grid with `x + δ ≤ grid_max` and
/// declares `f` stable when the tail-window supremum is at most `1 + tolerance`.
pub fn probe_stability(
    f: &GrowthFunction,
    delta: f64,
    grid_max: f64,
    tolerance: f64,
) -> Result<StabilityVerdict, GrowthError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(GrowthError::Precondition(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(GrowthError::Precondition(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if !(grid_max >= 10.0 * delta) || grid_max - delta < f.domain_start {
        return Err(GrowthError::Precondition(format!(
            "grid_max = {grid_max} must be at least 10·delta and leave room past the domain start"
        )));
    }
    let last = grid_max - delta;
    let mut grid = Vec::new();
    let mut x = f.domain_start;
    while x < last {
        grid.push(x);
        x *= STABILITY_GRID_RATIO;
    }
    grid.push(last);

    let tail_start = grid_max / 2.0;
    let mut trend = Vec::with_capacity(grid.len());
    let mut sup_ratio = 1.0f64;
    let mut tail_sup_ratio = 1.0f64;
    for x in grid {
        // Rounding can push the log difference of a constant ratio a hair
        // below zero; monotonicity pins the ratio at >= 1.
        let ratio = f.ln_ratio(x, delta)?.exp().max(1.0);
        sup_ratio = sup_ratio.max(ratio);
        if x >= tail_start {
            tail_sup_ratio = tail_sup_ratio.max(ratio);
        }
        trend.push((x, ratio));
    }
    Ok(StabilityVerdict {
        delta,
        grid_max,
        tolerance,
        sup_ratio,
        tail_sup_ratio,
        trend,
        stable: tail_sup_ratio <= 1.0 + tolerance,
    })
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GrowthKind::Power { alpha, h } => write!(f, "power:{alpha}:{h}"),
            GrowthKind::Exponential { base } => write!(f, "exp:{base}"),
            GrowthKind::ExpSqrt { c } => write!(f, "expsqrt:{c}"),
            GrowthKind::Interpolated { base, knots } => {
                write!(f, "interp({base}, {} knots)", knots.len())
            }
        }
    }
}

/// Parses either the JSON object form or the shorthand
/// `power:α:h`, `exp:b`, `expsqrt:c`.
impl FromStr for GrowthFunction {
    type Err = GrowthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| GrowthError::Invalid(e.to_string()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| GrowthError::Invalid(format!("cannot parse number {p:?} in {s:?}")))
        };
        match parts.as_slice() {
            ["power", alpha, h] => GrowthFunction::power(num(alpha)?, num(h)?),
            ["exp", base] => GrowthFunction::exponential(num(base)?),
            ["expsqrt", c] => GrowthFunction::exp_sqrt(num(c)?),
            _ => Err(GrowthError::Invalid(format!(
                "expected JSON or power:α:h | exp:b | expsqrt:c, got {s:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eval_examples() {
        assert_eq!(
            GrowthFunction::power(0.5, 2.0).unwrap().eval(4.0).unwrap(),
            8.0
        );
        assert_eq!(
            GrowthFunction::exponential(2.0)
                .unwrap()
                .eval(10.0)
                .unwrap(),
            1024.0
        );
        // e^2 = 7.38905609893065...
        assert_abs_diff_eq!(
            GrowthFunction::exp_sqrt(1.0).unwrap().eval(4.0).unwrap(),
            7.389_056_098_930_65,
            epsilon = 1e-12
        );
    }

    #[test]
    fn eval_below_domain_is_an_error() {
        let f = GrowthFunction::power(1.0, 2.0).unwrap();
        assert!(matches!(f.eval(0.5), Err(GrowthError::Domain { .. })));
    }

    #[test]
    fn inverse_examples() {
        assert_abs_diff_eq!(
            GrowthFunction::power(1.0, 2.0)
                .unwrap()
                .inverse(9.0)
                .unwrap(),
            3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            GrowthFunction::exponential(2.0)
                .unwrap()
                .inverse(1024.0)
                .unwrap(),
            10.0,
            epsilon = 1e-12
        );
        let f = GrowthFunction::power(2.0, 2.0).unwrap();
        let g = GrowthFunction::power(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            inverse_compose(&g, &f, 10.0).unwrap(),
            14.142_135_623_730_95,
            epsilon = 1e-12
        );
        // The generic route agrees with the closed form.
        assert_abs_diff_eq!(
            g.inverse(f.eval(10.0).unwrap()).unwrap(),
            10.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inverse_below_range_is_an_error() {
        let f = GrowthFunction::exponential(2.0).unwrap();
        assert!(matches!(f.inverse(1.0), Err(GrowthError::Range { .. })));
    }

    #[test]
    fn stability_examples() {
        let poly = GrowthFunction::power(1.0, 2.0).unwrap();
        assert!(probe_stability(&poly, 1.0, 1e6, 0.01).unwrap().stable);

        let exp = GrowthFunction::exponential(std::f64::consts::E).unwrap();
        let v = probe_stability(&exp, 1.0, 1e6, 0.01).unwrap();
        assert!(!v.stable);
        assert_abs_diff_eq!(v.sup_ratio, std::f64::consts::E, epsilon = 1e-6);

        let es = GrowthFunction::exp_sqrt(1.0).unwrap();
        assert!(probe_stability(&es, 1.0, 1e6, 0.01).unwrap().stable);
    }

    #[test]
    fn stability_rejects_short_grid() {
        let f = GrowthFunction::power(1.0, 2.0).unwrap();
        assert!(probe_stability(&f, 1.0, 5.0, 0.01).is_err());
        assert!(probe_stability(&f, 0.0, 100.0, 0.01).is_err());
    }

    #[test]
    fn interpolation_hand_example() {
        let g = GrowthFunction::power(1.0, 1.0).unwrap();
        let f = interpolate_above(&g, &[(1, 2.0), (2, 4.0), (3, 8.0)]).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.eval(2.0).unwrap(), 4.0);
        assert_eq!(f.eval(3.0).unwrap(), 8.0);
        // max(1.5 + μ, chord) with μ = min(2 − 1, 4 − 2) = 1 and chord = 3.
        assert_eq!(f.eval(1.5).unwrap(), 3.0);
        assert!(f.eval(3.5).is_err());
        assert!(f.eval(0.5).is_err());
    }

    #[test]
    fn interpolation_of_half_step_exponential() {
        let g = GrowthFunction::exponential(2.0).unwrap();
        let knots: Vec<Knot> = (1..=20).map(|k| (k, 2f64.powf(k as f64 + 0.5))).collect();
        let f = interpolate_above(&g, &knots).unwrap();
        for k in 1..=20u64 {
            assert_eq!(f.eval(k as f64).unwrap(), 2f64.powf(k as f64 + 0.5));
        }
    }

    #[test]
    fn interpolation_single_knot() {
        let g = GrowthFunction::power(1.0, 2.0).unwrap();
        let f = interpolate_above(&g, &[(1, 2.0)]).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.domain_end(), 1.0);
        assert_eq!(f.inverse(2.0).unwrap(), 1.0);
    }

    #[test]
    fn interpolation_rejects_bad_knots() {
        let g = GrowthFunction::power(1.0, 2.0).unwrap();
        assert!(interpolate_above(&g, &[]).is_err());
        assert!(interpolate_above(&g, &[(2, 4.0)]).is_err());
        assert!(interpolate_above(&g, &[(1, 3.0), (2, 2.5)]).is_err());
        assert!(interpolate_above(&g, &[(2, 5.0), (2, 6.0)]).is_err());
    }

    #[test]
    fn interpolated_inverse_uses_bisection() {
        let g = GrowthFunction::power(1.0, 1.0).unwrap();
        let f = interpolate_above(&g, &[(1, 2.0), (2, 4.0), (3, 8.0)]).unwrap();
        let x = f.inverse(3.0).unwrap();
        assert_abs_diff_eq!(x, 1.5, epsilon = 1e-9);
        assert!(f.inverse(9.0).is_err());
    }

    #[test]
    fn json_forms() {
        let f: GrowthFunction =
            serde_json::from_str(r#"{"kind":"power","alpha":0.5,"h":2}"#).unwrap();
        assert_eq!(f, GrowthFunction::power(0.5, 2.0).unwrap());
        let e: GrowthFunction = serde_json::from_str(r#"{"kind":"exp","base":2}"#).unwrap();
        assert_eq!(e, GrowthFunction::exponential(2.0).unwrap());
        let s: GrowthFunction = serde_json::from_str(r#"{"kind":"expsqrt","c":1.0}"#).unwrap();
        assert_eq!(s, GrowthFunction::exp_sqrt(1.0).unwrap());
        let i: GrowthFunction = serde_json::from_str(
            r#"{"kind":"interp","base":{"kind":"power","alpha":1,"h":1},"knots":[[1,2.0],[2,4.0]]}"#,
        )
        .unwrap();
        assert_eq!(i.eval(2.0).unwrap(), 4.0);
        let back: GrowthFunction =
            serde_json::from_str(&serde_json::to_string(&i).unwrap()).unwrap();
        assert_eq!(back, i);
        assert!(serde_json::from_str::<GrowthFunction>(r#"{"kind":"exp","base":0.5}"#).is_err());
        assert!(serde_json::from_str::<GrowthFunction>(
            r#"{"kind":"interp","base":{"kind":"power","alpha":1,"h":1},"knots":[[1,0.5]]}"#
        )
        .is_err());
    }

    #[test]
    fn shorthand_forms() {
        assert_eq!(
            "power:2:2".parse::<GrowthFunction>().unwrap(),
            GrowthFunction::power(2.0, 2.0).unwrap()
        );
        assert_eq!(
            "exp:3".parse::<GrowthFunction>().unwrap(),
            GrowthFunction::exponential(3.0).unwrap()
        );
        assert_eq!(
            "expsqrt:1".parse::<GrowthFunction>().unwrap(),
            GrowthFunction::exp_sqrt(1.0).unwrap()
        );
        assert!("power:2".parse::<GrowthFunction>().is_err());
        assert!("cubic:1".parse::<GrowthFunction>().is_err());
    }
}
