use std::fs;
use std::path::{Path, PathBuf};

use additive_spectrum::basis::{
    check_counting_inequality, dilute_eigenvalue, eigenvalue_report, iterated_sumset_with_cap,
    spectrum_interval_report, synthetic_seed, BasisError, CountingCheck, CoverageReport,
    EigenvalueReport, SpectrumReport, SpectrumSample, DEFAULT_MEMORY_CAP_BITS,
};
use additive_spectrum::equidist::{
    impossibility_scan, perfect_power_embedding, power_relation, rational_case_witness,
    EquidistError, PerfectPowerEmbedding, PowerRelation, RationalWitness, ScanConfig, ScanReport,
};
use additive_spectrum::growth::{probe_stability, GrowthError, GrowthFunction};
use additive_spectrum::sequences::{
    asymptotic_verdict, rearrange, sort_rearrangement, AsymptoticVerdict, PermutationSpec,
    SequenceError, SequencePrefix,
};
use additive_spectrum::sets::SortedSet;
use additive_spectrum::supersequence::{
    adversarial_construction, build_supersequence, SupersequenceConfig, SupersequenceError,
    DEFAULT_GAMMA,
};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{de, Deserialize, Deserializer, Serialize};

use crate::{CliError, Outcome, Trace};

/// Parses a growth function given inline (JSON or shorthand) or as `@path`.
pub fn parse_growth(s: &str) -> Result<GrowthFunction, String> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        None => s.to_string(),
    };
    text.parse().map_err(|e: GrowthError| e.to_string())
}

fn de_growth<'de, D: Deserializer<'de>>(d: D) -> Result<GrowthFunction, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Spec {
        Text(String),
        Object(GrowthFunction),
    }
    match Spec::deserialize(d)? {
        Spec::Text(s) => parse_growth(&s).map_err(de::Error::custom),
        Spec::Object(g) => Ok(g),
    }
}

fn de_growth_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<GrowthFunction>, D::Error> {
    de_growth(d).map(Some)
}

fn parse_sigma(s: &str) -> Result<PermutationSpec, String> {
    match s.trim() {
        "power-swap" | "power_swap" => Ok(PermutationSpec::PowerSwap),
        t => serde_json::from_str(t).map_err(|e| e.to_string()),
    }
}

fn de_sigma_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<PermutationSpec>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Spec {
        Text(String),
        Object(PermutationSpec),
    }
    match Spec::deserialize(d)? {
        Spec::Text(s) => parse_sigma(&s).map(Some).map_err(de::Error::custom),
        Spec::Object(p) => Ok(Some(p)),
    }
}

fn read_sequence(path: &Path) -> Result<SequencePrefix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    text.parse()
        .map_err(|e: SequenceError| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invalid(msg()))
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    check(x > 0.0 && x.is_finite(), || {
        format!("{name} must be positive and finite, got {x}")
    })
}

fn unit_open(name: &str, x: f64) -> Result<(), CliError> {
    check(x > 0.0 && x < 1.0, || {
        format!("{name} must lie in (0, 1), got {x}")
    })
}

fn in_range<T: PartialOrd + std::fmt::Display>(
    name: &str,
    x: T,
    lo: T,
    hi: T,
) -> Result<(), CliError> {
    let ok = x >= lo && x <= hi;
    check(ok, || format!("{name} must lie in [{lo}, {hi}], got {x}"))
}

fn d_one() -> f64 {
    1.0
}
fn d_grid_max() -> f64 {
    1e6
}
fn d_tolerance() -> f64 {
    0.01
}
fn d_epsilon() -> f64 {
    0.05
}
fn d_noise() -> f64 {
    0.05
}
fn d_gate() -> f64 {
    0.9
}
fn d_cap() -> u64 {
    DEFAULT_MEMORY_CAP_BITS
}
fn d_terms() -> u64 {
    3000
}
fn d_pad() -> u64 {
    1
}
fn d_k() -> u64 {
    100_000
}
fn d_chunk() -> u64 {
    8192
}
fn d_check_k() -> u64 {
    1000
}
fn d_adv_k() -> u64 {
    50
}
fn d_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn d_alphas() -> Vec<f64> {
    vec![0.1, 0.25, 0.45]
}
fn d_fractions() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}
fn d_spectrum_terms() -> u64 {
    2000
}
fn d_spectrum_x() -> u64 {
    100_000
}

fn validate_stability(delta: f64, grid_max: f64, tolerance: f64) -> Result<(), CliError> {
    positive("stability-delta", delta)?;
    positive("stability-grid-max", grid_max)?;
    positive("stability-tolerance", tolerance)
}

// ---------------------------------------------------------------- stability

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityArgs {
    /// Growth function, as JSON, shorthand or @file.
    #[arg(long, value_parser = parse_growth)]
    #[serde(deserialize_with = "de_growth")]
    pub f: GrowthFunction,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "d_one")]
    pub delta: f64,
    #[arg(long, default_value_t = 1e6)]
    #[serde(default = "d_grid_max")]
    pub grid_max: f64,
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "d_tolerance")]
    pub tolerance: f64,
}

impl StabilityArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("delta", self.delta)?;
        positive("grid-max", self.grid_max)?;
        positive("tolerance", self.tolerance)
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let v = probe_stability(&self.f, self.delta, self.grid_max, self.tolerance)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let rows = v
            .trend
            .iter()
            .map(|(x, r)| vec![x.to_string(), r.to_string()])
            .collect();
        Outcome::new(&v, Trace::new(&["x", "ratio"], rows))
    }
}

// ---------------------------------------------------------------- rearrange

#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct RearrangeReport {
    pub len: usize,
    pub sequence: SequencePrefix,
    /// Terms drawn before sorting, when more than `len` were needed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated: Option<usize>,
    /// The order-inducing permutation, when the rearrangement is the sort.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_verdict: Option<AsymptoticVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<AsymptoticVerdict>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RearrangeArgs {
    /// Input sequence file (one value per line, or a JSON array).
    #[arg(long = "A", value_name = "FILE")]
    #[serde(default, rename = "A")]
    pub a: Option<PathBuf>,
    /// Generate a_k = round(k²(1+ζ_k)), |ζ_k| ≤ noise, for k = 1..=N from --seed. With
    /// --sort, enough further terms are drawn that the output is the first N of the
    /// whole sorted sequence.
    #[arg(long, value_name = "N")]
    #[serde(default)]
    pub noisy_squares: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "d_noise")]
    pub noise: f64,
    /// Permutation as JSON, or `power-swap`.
    #[arg(long, value_parser = parse_sigma, conflicts_with = "sort")]
    #[serde(default, deserialize_with = "de_sigma_opt")]
    pub sigma: Option<PermutationSpec>,
    /// Use the increasing rearrangement.
    #[arg(long)]
    #[serde(default)]
    pub sort: bool,
    /// Growth function to compare both sequences against.
    #[arg(long, value_parser = parse_growth)]
    #[serde(default, deserialize_with = "de_growth_opt")]
    pub f: Option<GrowthFunction>,
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
}

impl RearrangeArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        check(self.a.is_some() != self.noisy_squares.is_some(), || {
            "give exactly one of --A and --noisy-squares".into()
        })?;
        check(self.sigma.is_some() != self.sort, || {
            "give exactly one of --sigma and --sort".into()
        })?;
        if let Some(n) = self.noisy_squares {
            in_range("noisy-squares", n, 1, 10_000_000)?;
        }
        check((0.0..1.0).contains(&self.noise), || {
            format!("noise must lie in [0, 1), got {}", self.noise)
        })?;
        unit_open("epsilon", self.epsilon)
    }

    pub fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        let a = match (&self.a, self.noisy_squares) {
            (Some(path), _) => read_sequence(path)?,
            (None, Some(n)) => noisy_squares(n, self.noise, seed),
            (None, None) => unreachable!("validated"),
        };
        let mut generated = None;
        let (b, permutation) = match (&self.sigma, self.noisy_squares) {
            (Some(sigma), _) => (
                rearrange(&a, sigma).map_err(|e| CliError::Invalid(e.to_string()))?,
                None,
            ),
            (None, Some(n)) => {
                let k = sort_horizon(n, self.noise);
                let (b, p) = sort_rearrangement(&noisy_squares(k, self.noise, seed));
                generated = Some(k);
                (truncate(b, n), Some(p))
            }
            (None, None) => {
                let (b, p) = sort_rearrangement(&a);
                (b, Some(p))
            }
        };
        let verdict = |s: &SequencePrefix| -> Result<Option<AsymptoticVerdict>, CliError> {
            self.f
                .as_ref()
                .map(|f| asymptotic_verdict(s, f, self.epsilon))
                .transpose()
                .map_err(|e| CliError::Invalid(e.to_string()))
        };
        let report = RearrangeReport {
            len: b.len(),
            generated,
            input_verdict: verdict(&a)?,
            verdict: verdict(&b)?,
            permutation,
            sequence: b,
        };
        let rows = (0..a.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    a.values()[i].to_string(),
                    report.sequence.values()[i].to_string(),
                ]
            })
            .collect();
        Outcome::new(&report, Trace::new(&["n", "a_n", "rearranged"], rows))
    }
}

/// Terms of [`noisy_squares`] needed so that the first `n` sorted values are
/// those of the whole sequence: every later term is at least
/// `(1−noise)k² > (1+noise)n²`, which bounds the `n`-th smallest of the first `n`.
pub fn sort_horizon(n: usize, noise: f64) -> usize {
    (n as f64 * ((1.0 + noise) / (1.0 - noise)).sqrt()).ceil() as usize + 1
}

/// First `n` terms of the increasing rearrangement of [`noisy_squares`].
pub fn sorted_noisy_squares(n: usize, noise: f64, seed: u64) -> SequencePrefix {
    let (b, _) = sort_rearrangement(&noisy_squares(sort_horizon(n, noise), noise, seed));
    truncate(b, n)
}

fn truncate(s: SequencePrefix, n: usize) -> SequencePrefix {
    let mut v = s.into_values();
    v.truncate(n);
    SequencePrefix::new(v).expect("n ≥ 1")
}

/// `round(k²·(1+ζ_k))` with `ζ_k` uniform on `[−noise, noise]`.
pub fn noisy_squares(n: usize, noise: f64, seed: u64) -> SequencePrefix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SequencePrefix::from_u64s((1..=n as u64).map(|k| {
        let zeta: f64 = if noise > 0.0 {
            rng.gen_range(-noise..=noise)
        } else {
            0.0
        };
        ((k * k) as f64 * (1.0 + zeta)).round() as u64
    }))
    .expect("n ≥ 1")
}

// ------------------------------------------------------------ supersequence

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupersequenceArgs {
    #[arg(long, value_parser = parse_growth)]
    #[serde(deserialize_with = "de_growth")]
    pub f: GrowthFunction,
    #[arg(long, value_parser = parse_growth)]
    #[serde(deserialize_with = "de_growth")]
    pub g: GrowthFunction,
    #[arg(long = "A", value_name = "FILE")]
    #[serde(rename = "A")]
    pub a: PathBuf,
    /// Length of B.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    /// Tolerance of the A ∼ f check.
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "d_epsilon")]
    pub input_epsilon: f64,
    /// Tolerance of the B ∼ g verdict.
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.9)]
    #[serde(default = "d_gate")]
    pub density_gate: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "d_one")]
    pub stability_delta: f64,
    #[arg(long, default_value_t = 1e6)]
    #[serde(default = "d_grid_max")]
    pub stability_grid_max: f64,
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "d_tolerance")]
    pub stability_tolerance: f64,
    /// Skip the hypothesis checks and build B anyway.
    #[arg(long)]
    #[serde(default)]
    pub no_checks: bool,
}

impl SupersequenceArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        in_range("N", self.n, 1, 100_000_000)?;
        unit_open("input-epsilon", self.input_epsilon)?;
        unit_open("epsilon", self.epsilon)?;
        in_range("density-gate", self.density_gate, 0.0, 1.0)?;
        validate_stability(
            self.stability_delta,
            self.stability_grid_max,
            self.stability_tolerance,
        )
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let a = read_sequence(&self.a)?;
        let config = SupersequenceConfig {
            input_epsilon: self.input_epsilon,
            verdict_epsilon: self.epsilon,
            stability_delta: self.stability_delta,
            stability_grid_max: self.stability_grid_max,
            stability_tolerance: self.stability_tolerance,
            density_gate: self.density_gate,
            check_preconditions: !self.no_checks,
        };
        let result = build_supersequence(&a, &self.f, &self.g, self.n, &config)
            .map_err(supersequence_error)?;
        let mut source = vec![String::new(); result.b.len()];
        for (k, &n) in result.embedding.iter().enumerate() {
            source[n - 1] = (k + 1).to_string();
        }
        let rows = result
            .b
            .values()
            .iter()
            .zip(source)
            .enumerate()
            .map(|(i, (b, k))| vec![(i + 1).to_string(), b.to_string(), k])
            .collect();
        Outcome::new(&result, Trace::new(&["n", "b_n", "k"], rows))
    }
}

pub(crate) fn supersequence_error(e: SupersequenceError) -> CliError {
    if e.is_precondition() {
        CliError::Precondition {
            message: e.to_string(),
            violation: e
                .violation()
                .map(|v| serde_json::to_value(v).expect("serializable")),
        }
    } else {
        CliError::Internal(e.to_string())
    }
}

fn basis_error(e: BasisError) -> CliError {
    match e {
        BasisError::Supersequence(inner) => supersequence_error(inner),
        e if e.is_precondition() => CliError::Precondition {
            message: e.to_string(),
            violation: None,
        },
        e @ (BasisError::Capacity { .. }
        | BasisError::InvalidOrder
        | BasisError::InvalidRange
        | BasisError::Sequence(_)) => CliError::Invalid(e.to_string()),
        e => CliError::Internal(e.to_string()),
    }
}

// ------------------------------------------------------------------- sumset

#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct BitmapExport {
    pub path: String,
    pub bits: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct SumsetReport {
    pub h: u32,
    pub x_max: u64,
    /// `|A ∩ [0, X]|`.
    pub members: usize,
    /// `|hA ∩ [0, X]|`.
    pub size: u64,
    pub coverage: CoverageReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bitmap: Option<BitmapExport>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumsetArgs {
    #[arg(long = "A", value_name = "FILE")]
    #[serde(rename = "A")]
    pub a: PathBuf,
    #[arg(long = "h")]
    pub h: u32,
    #[arg(long = "X")]
    #[serde(rename = "X")]
    pub x: u64,
    /// Write hA ∩ [0, X] as a little-endian bitmap (bit i of byte i/8 is i).
    #[arg(long, value_name = "FILE")]
    #[serde(default)]
    pub bitmap: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP_BITS)]
    #[serde(default = "d_cap")]
    pub memory_cap: u64,
}

fn validate_sumset(h: u32, x: u64, cap: u64) -> Result<(), CliError> {
    in_range("h", h, 1, 64)?;
    in_range("X", x, 1, u64::MAX - 1)?;
    in_range("memory-cap", cap, 1, 1 << 36)
}

impl SumsetArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        validate_sumset(self.h, self.x, self.memory_cap)
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let a = read_sequence(&self.a)?;
        let sum =
            iterated_sumset_with_cap(&a, self.h, self.x, self.memory_cap).map_err(basis_error)?;
        let bitmap = match &self.bitmap {
            Some(path) => {
                let bytes = sum.to_le_bytes();
                write_file(path, &bytes)?;
                Some(BitmapExport {
                    path: path.display().to_string(),
                    bits: sum.len() as u64,
                    bytes: bytes.len() as u64,
                })
            }
            None => None,
        };
        let report = SumsetReport {
            h: self.h,
            x_max: self.x,
            members: SortedSet::from_prefix_upto(&a, self.x).members().len(),
            size: sum.count_ones() as u64,
            coverage: CoverageReport::from_sumset(self.h, &sum),
            bitmap,
        };
        let rows = sum.iter_zeros().map(|x| vec![x.to_string()]).collect();
        Outcome::new(&report, Trace::new(&["missing"], rows))
    }
}

// ------------------------------------------------------------- verify-basis

#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct BasisReport {
    pub coverage: CoverageReport,
    /// Present when the coverage is a window basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting: Option<CountingCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<EigenvalueReport>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBasisArgs {
    #[arg(long = "A", value_name = "FILE")]
    #[serde(rename = "A")]
    pub a: PathBuf,
    #[arg(long = "h")]
    pub h: u32,
    #[arg(long = "X")]
    #[serde(rename = "X")]
    pub x: u64,
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP_BITS)]
    #[serde(default = "d_cap")]
    pub memory_cap: u64,
}

impl VerifyBasisArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        validate_sumset(self.h, self.x, self.memory_cap)
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let a = read_sequence(&self.a)?;
        let sum =
            iterated_sumset_with_cap(&a, self.h, self.x, self.memory_cap).map_err(basis_error)?;
        let coverage = CoverageReport::from_sumset(self.h, &sum);
        let (counting, eigenvalue) = if coverage.is_window_basis {
            (
                Some(check_counting_inequality(&a, self.h, &coverage).map_err(basis_error)?),
                Some(eigenvalue_report(&a, self.h, &coverage).map_err(basis_error)?),
            )
        } else {
            (None, None)
        };
        let rows = coverage
            .missing
            .iter()
            .map(|x| vec![x.to_string()])
            .collect();
        let report = BasisReport {
            coverage,
            counting,
            eigenvalue,
        };
        Outcome::new(&report, Trace::new(&["missing"], rows))
    }
}

// ------------------------------------------------------------------- dilute

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiluteArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long = "h")]
    pub h: u32,
    /// Length of B; defaults to |A|·(α/β)^{1/h}.
    #[arg(long = "N")]
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[arg(long = "X")]
    #[serde(rename = "X")]
    pub x: u64,
    /// Seed set file; without it A is {0..=pad} ∪ {round(α·k^h) : k ≤ terms}.
    #[arg(long = "A", value_name = "FILE")]
    #[serde(default, rename = "A")]
    pub a: Option<PathBuf>,
    #[arg(long, default_value_t = 3000)]
    #[serde(default = "d_terms")]
    pub terms: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "d_pad")]
    pub pad: u64,
    /// Leave out the {0..=pad} block of the synthetic seed.
    #[arg(long)]
    #[serde(default)]
    pub no_pad: bool,
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "d_one")]
    pub stability_delta: f64,
    #[arg(long, default_value_t = 1e6)]
    #[serde(default = "d_grid_max")]
    pub stability_grid_max: f64,
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "d_tolerance")]
    pub stability_tolerance: f64,
}

fn validate_dilution(alpha: f64, h: u32, x: u64, terms: u64) -> Result<(), CliError> {
    positive("alpha", alpha)?;
    in_range("h", h, 1, 16)?;
    in_range("X", x, 1, u64::MAX - 1)?;
    in_range("terms", terms, 10, 10_000_000)
}

impl DiluteArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        validate_dilution(self.alpha, self.h, self.x, self.terms)?;
        positive("beta", self.beta)?;
        if let Some(n) = self.n {
            in_range("N", n, 1, 100_000_000)?;
        }
        unit_open("epsilon", self.epsilon)?;
        validate_stability(
            self.stability_delta,
            self.stability_grid_max,
            self.stability_tolerance,
        )
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let a = match &self.a {
            Some(path) => read_sequence(path)?,
            None => synthetic_seed(
                self.alpha,
                self.h,
                self.terms,
                (!self.no_pad).then_some(self.pad),
            )
            .map_err(basis_error)?,
        };
        let n = self
            .n
            .unwrap_or_else(|| default_length(a.len(), self.alpha, self.beta, self.h));
        let config = SupersequenceConfig {
            input_epsilon: self.epsilon,
            verdict_epsilon: self.epsilon,
            stability_delta: self.stability_delta,
            stability_grid_max: self.stability_grid_max,
            stability_tolerance: self.stability_tolerance,
            ..SupersequenceConfig::default()
        };
        let out = dilute_eigenvalue(&a, self.h, self.alpha, self.beta, n, self.x, &config)
            .map_err(basis_error)?;
        let rows = out
            .supersequence
            .embedding
            .iter()
            .enumerate()
            .map(|(k, n)| vec![(k + 1).to_string(), n.to_string()])
            .collect();
        Outcome::new(&out, Trace::new(&["k", "n_k"], rows))
    }
}

fn default_length(len: usize, alpha: f64, beta: f64, h: u32) -> usize {
    let ratio = (alpha / beta).abs().powf(1.0 / h as f64);
    ((len as f64 * ratio).floor() as usize).max(1)
}

// ----------------------------------------------------------------- spectrum

#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct SpectrumRun {
    pub report: SpectrumReport,
    pub samples: Vec<SpectrumSample>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    #[arg(long = "h")]
    pub h: u32,
    /// Eigenvalues α of the synthetic seeds.
    #[arg(long, value_delimiter = ',', default_values_t = d_alphas())]
    #[serde(default = "d_alphas")]
    pub alphas: Vec<f64>,
    /// Each α is diluted to β = α·fraction for every fraction.
    #[arg(long, value_delimiter = ',', default_values_t = d_fractions())]
    #[serde(default = "d_fractions")]
    pub beta_fractions: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    #[serde(default = "d_spectrum_terms")]
    pub terms: u64,
    #[arg(long = "X", default_value_t = 100_000)]
    #[serde(default = "d_spectrum_x", rename = "X")]
    pub x: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "d_pad")]
    pub pad: u64,
}

impl SpectrumArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        check(!self.alphas.is_empty(), || "alphas must be nonempty".into())?;
        check(!self.beta_fractions.is_empty(), || {
            "beta-fractions must be nonempty".into()
        })?;
        for &a in &self.alphas {
            validate_dilution(a, self.h, self.x, self.terms)?;
        }
        for &f in &self.beta_fractions {
            unit_open("beta fraction", f)?;
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let config = SupersequenceConfig::default();
        let mut samples = Vec::with_capacity(self.alphas.len());
        let mut rows = Vec::new();
        for &alpha in &self.alphas {
            let a =
                synthetic_seed(alpha, self.h, self.terms, Some(self.pad)).map_err(basis_error)?;
            let outcomes = self
                .beta_fractions
                .iter()
                .map(|&fr| {
                    let beta = alpha * fr;
                    let n = default_length(a.len(), alpha, beta, self.h);
                    let res = dilute_eigenvalue(&a, self.h, alpha, beta, n, self.x, &config);
                    SpectrumSample::record(beta, &res)
                })
                .collect::<Vec<_>>();
            for o in &outcomes {
                rows.push(vec![
                    alpha.to_string(),
                    o.beta.to_string(),
                    o.succeeded.to_string(),
                ]);
            }
            samples.push(SpectrumSample { alpha, outcomes });
        }
        let run = SpectrumRun {
            report: spectrum_interval_report(self.h, &samples),
            samples,
        };
        Outcome::new(&run, Trace::new(&["alpha", "beta", "succeeded"], rows))
    }
}

// --------------------------------------------------------------- impossible

#[derive(Debug, Clone, Serialize, JsonSchema)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum ImpossibleReport {
    /// `u = v^r`: `{u^k}` sits inside `B = {v^n}` at `n_k = r·k`.
    PerfectPower {
        relation: PowerRelation,
        b_n: String,
        n_k: String,
        embedding: PerfectPowerEmbedding,
    },
    /// `log_v u = r/s`: a residue class of `k` stays at distance `1/s`.
    RationalLog {
        relation: PowerRelation,
        witness: RationalWitness,
    },
    /// `log_v u` irrational: exact zone scan of `⟨k·log_v u⟩`.
    Scan {
        relation: PowerRelation,
        scan: ScanReport,
    },
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpossibleArgs {
    #[arg(long)]
    pub u: u64,
    #[arg(long)]
    pub v: u64,
    /// Number of k scanned in the irrational case.
    #[arg(long = "K", default_value_t = 100_000)]
    #[serde(default = "d_k", rename = "K")]
    pub k: u64,
    #[arg(long, default_value_t = 8192)]
    #[serde(default = "d_chunk")]
    pub chunk: u64,
    /// Range of k over which the rational-case identities are verified.
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "d_check_k")]
    pub check_k: u64,
}

impl ImpossibleArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        check(self.v >= 2 && self.u > self.v, || {
            format!("need u > v ≥ 2, got u = {}, v = {}", self.u, self.v)
        })?;
        in_range("K", self.k, 1, ScanConfig::default().max_k)?;
        in_range("chunk", self.chunk, 1, 1 << 24)?;
        in_range("check-k", self.check_k, 1, 100_000)
    }

    pub fn run(&self, trace: bool) -> Result<Outcome, CliError> {
        let (u, v) = (self.u, self.v);
        let relation = power_relation(u, v).map_err(equidist_error)?;
        match relation {
            PowerRelation::PerfectPower { r } => {
                let embedding =
                    perfect_power_embedding(u, v, self.check_k).map_err(equidist_error)?;
                let rows = (1..=self.check_k)
                    .map(|k| vec![k.to_string(), (r as u64 * k).to_string()])
                    .collect();
                let report = ImpossibleReport::PerfectPower {
                    relation,
                    b_n: format!("{v}^n"),
                    n_k: format!("{r}k"),
                    embedding,
                };
                Outcome::new(&report, Trace::new(&["k", "n_k"], rows))
            }
            PowerRelation::RationalLog { r, s } => {
                let witness =
                    rational_case_witness(u, v, r, s, self.check_k).map_err(equidist_error)?;
                let report = ImpossibleReport::RationalLog { relation, witness };
                Outcome::new(&report, Trace::new(&["k", "floor_n", "zone"], Vec::new()))
            }
            PowerRelation::Irrational => {
                let config = ScanConfig {
                    chunk: self.chunk,
                    trace,
                    ..ScanConfig::default()
                };
                let scan = impossibility_scan(u, v, self.k, &config).map_err(equidist_error)?;
                let rows = scan
                    .trace
                    .iter()
                    .map(|t| {
                        vec![
                            t.k.to_string(),
                            t.floor_n.to_string(),
                            t.zone.as_str().into(),
                        ]
                    })
                    .collect();
                let report = ImpossibleReport::Scan { relation, scan };
                Outcome::new(&report, Trace::new(&["k", "floor_n", "zone"], rows))
            }
        }
    }
}

fn equidist_error(e: EquidistError) -> CliError {
    if e.is_precondition() {
        CliError::Precondition {
            message: e.to_string(),
            violation: None,
        }
    } else {
        CliError::Invalid(e.to_string())
    }
}

// -------------------------------------------------------------- adversarial

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarialArgs {
    #[arg(long, value_parser = parse_growth)]
    #[serde(deserialize_with = "de_growth")]
    pub g: GrowthFunction,
    /// Use m_k = k for k = 1..=K.
    #[arg(long = "K", default_value_t = 50, conflicts_with = "m")]
    #[serde(default = "d_adv_k", rename = "K")]
    pub k: u64,
    /// File listing the indices m_k.
    #[arg(long, value_name = "FILE")]
    #[serde(default)]
    pub m: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    /// Write the constructed f as JSON.
    #[arg(long, value_name = "FILE")]
    #[serde(default)]
    pub emit_f: Option<PathBuf>,
    /// Write the constructed A, one value per line.
    #[arg(long = "emit-A", value_name = "FILE")]
    #[serde(default, rename = "emit_A")]
    pub emit_a: Option<PathBuf>,
}

impl AdversarialArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        in_range("K", self.k, 1, 100_000)?;
        positive("gamma", self.gamma)
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        let m: Vec<u64> = match &self.m {
            Some(path) => read_sequence(path)?
                .values()
                .iter()
                .map(|v| {
                    u64::try_from(v)
                        .map_err(|_| CliError::Invalid(format!("m_k = {v} is too large")))
                })
                .collect::<Result<_, _>>()?,
            None => (1..=self.k).collect(),
        };
        let result =
            adversarial_construction(&self.g, &m, self.gamma).map_err(supersequence_error)?;
        if let Some(path) = &self.emit_f {
            let json = serde_json::to_string_pretty(&result.f).expect("serializable");
            write_file(path, json + "\n")?;
        }
        if let Some(path) = &self.emit_a {
            write_file(path, result.a.to_text())?;
        }
        let rows = m
            .iter()
            .zip(result.a.values())
            .enumerate()
            .map(|(i, (mk, a))| vec![(i + 1).to_string(), mk.to_string(), a.to_string()])
            .collect();
        Outcome::new(&result, Trace::new(&["k", "m_k", "a_k"], rows))
    }
}
