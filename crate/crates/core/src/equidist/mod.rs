//! Exact comparisons of `⟨k·log u / log v⟩` against rationals, the scan of
//! middle-zone hits, and the `u = v^r` dichotomy.
//!
//! Every threshold test reduces to an integer identity: with
//! `n = ⌊k·log_v u⌋`, `⟨k·log_v u⟩ < p/q` iff `u^{kq} < v^{nq+p}`.

mod scan;

pub use scan::{impossibility_scan, ScanConfig, ScanReport, TraceRow, Zone};

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquidistError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("u^(kq) would have about {bits} bits, above the cap of {cap}")]
    SizeCap { bits: u64, cap: u64 },
    #[error("log u / log v is rational ({0:?}); use the power-relation path")]
    RationalRelation(PowerRelation),
    #[error("({u}, {v}) is not a rational-log pair with s ≥ 2: {relation:?}")]
    NotRationalCase {
        u: u64,
        v: u64,
        relation: PowerRelation,
    },
}

impl EquidistError {
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            EquidistError::RationalRelation(_) | EquidistError::NotRationalCase { .. }
        )
    }
}

fn check_pair(u: u64, v: u64) -> Result<(), EquidistError> {
    if v < 2 || u <= v {
        return Err(EquidistError::InvalidQuery(format!(
            "need u > v ≥ 2, got u = {u}, v = {v}"
        )));
    }
    Ok(())
}

/// `k`, `u`, `v` and `⌊k·log_v u⌋`, with `v^n ≤ u^k < v^{n+1}` checked exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct FracPartQuery {
    pub k: u64,
    pub u: u64,
    pub v: u64,
    pub floor_n: u64,
}

impl FracPartQuery {
    pub fn new(k: u64, u: u64, v: u64) -> Result<Self, EquidistError> {
        check_pair(u, v)?;
        if k == 0 {
            return Err(EquidistError::InvalidQuery("k must be at least 1".into()));
        }
        let p = Pow::pow(BigUint::from(u), k);
        let (floor_n, _) = bracket(&p, k, u, v);
        Ok(FracPartQuery { k, u, v, floor_n })
    }
}

/// `(n, v^n)` with `v^n ≤ P < v^{n+1}`, where `P = u^k`. Seeds `n` from the
/// floating logarithm and corrects by exact comparison.
pub(crate) fn bracket(p: &BigUint, k: u64, u: u64, v: u64) -> (u64, BigUint) {
    let est = (k as f64 * (u as f64).ln() / (v as f64).ln())
        .floor()
        .max(0.0) as u64;
    let vb = BigUint::from(v);
    let mut n = est;
    let mut low = Pow::pow(&vb, n);
    while &low > p {
        n -= 1;
        low /= &vb;
    }
    let mut next = &low * &vb;
    while &next <= p {
        n += 1;
        low = next;
        next = &low * &vb;
    }
    (n, low)
}

/// Compares `⟨k·log_v u⟩` with `p/q` exactly. `Less` means the fractional
/// part is below `p/q`.
pub fn fracpart_compare(k: u64, u: u64, v: u64, p: u64, q: u64) -> Result<Ordering, EquidistError> {
    fracpart_compare_capped(k, u, v, p, q, None)
}

pub fn fracpart_compare_capped(
    k: u64,
    u: u64,
    v: u64,
    p: u64,
    q: u64,
    max_bits: Option<u64>,
) -> Result<Ordering, EquidistError> {
    check_pair(u, v)?;
    if k == 0 || q == 0 || p >= q {
        return Err(EquidistError::InvalidQuery(format!(
            "need k ≥ 1 and 0 ≤ p < q, got k = {k}, p/q = {p}/{q}"
        )));
    }
    if let Some(cap) = max_bits {
        let bits = ((k as f64) * (q as f64) * (u as f64).log2()).ceil() as u64;
        if bits > cap {
            return Err(EquidistError::SizeCap { bits, cap });
        }
    }
    let pk = Pow::pow(BigUint::from(u), k);
    let (_, vn) = bracket(&pk, k, u, v);
    // u^{kq} vs v^{nq+p} = (v^n)^q · v^p.
    let lhs = Pow::pow(pk, q);
    let rhs = Pow::pow(vn, q) * Pow::pow(BigUint::from(v), p);
    Ok(lhs.cmp(&rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum PowerRelation {
    /// `u = v^r`.
    PerfectPower {
        r: u32,
    },
    /// `u^s = v^r` with `gcd(r, s) = 1` and `s > 1`.
    RationalLog {
        r: u32,
        s: u32,
    },
    Irrational,
}

/// `(w, e)` with `n = w^e` and `e` maximal, so `w` is not itself a perfect power.
pub fn primitive_root(n: u64) -> (u64, u32) {
    if n < 4 {
        return (n, 1);
    }
    for e in (2..=63u32).rev() {
        if let Some(w) = exact_root(n, e) {
            return (w, e);
        }
    }
    (n, 1)
}

fn exact_root(n: u64, e: u32) -> Option<u64> {
    let guess = (n as f64).powf(1.0 / e as f64).round() as u64;
    (guess.saturating_sub(1).max(2)..=guess + 1).find(|&w| w.checked_pow(e) == Some(n))
}

/// Classifies `log u / log v`. Both numbers are powers of a common base
/// exactly when their primitive roots coincide.
pub fn power_relation(u: u64, v: u64) -> Result<PowerRelation, EquidistError> {
    check_pair(u, v)?;
    let (wu, a) = primitive_root(u);
    let (wv, b) = primitive_root(v);
    if wu != wv {
        return Ok(PowerRelation::Irrational);
    }
    let g = a.gcd(&b);
    let (r, s) = (a / g, b / g);
    debug_assert_eq!(Pow::pow(BigUint::from(u), s), Pow::pow(BigUint::from(v), r));
    Ok(if s == 1 {
        PowerRelation::PerfectPower { r }
    } else {
        PowerRelation::RationalLog { r, s }
    })
}

/// `u^s == v^r`, evaluated exactly.
pub fn verify_relation(u: u64, v: u64, relation: PowerRelation) -> bool {
    let (ub, vb) = (BigUint::from(u), BigUint::from(v));
    match relation {
        PowerRelation::PerfectPower { r } => Pow::pow(vb, r) == ub,
        PowerRelation::RationalLog { r, s } => {
            s > 1 && r.gcd(&s) == 1 && Pow::pow(ub, s) == Pow::pow(vb, r)
        }
        PowerRelation::Irrational => {
            // Any relation u^s = v^r has s ≤ log₂ v and r ≤ log₂ u, since
            // u = w^r', v = w^s' for a common base w ≥ 2.
            let (rmax, smax) = (64 - u.leading_zeros(), 64 - v.leading_zeros());
            (1..=smax).all(|s| {
                let us = Pow::pow(&ub, s);
                (1..=rmax).all(|r| Pow::pow(&vb, r) != us)
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RationalWitness {
    pub u: u64,
    pub v: u64,
    pub r: u32,
    pub s: u32,
    /// `1 ≤ ℓ ≤ s−1` with `ℓr ≡ 1 (mod s)`.
    pub ell: u32,
    /// How many `k ≤ K` with `k ≡ ℓ (mod s)` were checked.
    pub class_size: u64,
    /// `min` over the class of the distance from `log_v(u^k)` to the nearest
    /// integer, as `numerator/denominator`.
    pub distance_numerator: u64,
    pub distance_denominator: u64,
    pub distance: f64,
    /// Every checked `k` had `v^n < u^k < v^{n+1}` with fractional part exactly `1/s`.
    pub verified: bool,
}

/// Along `k ≡ ℓ (mod s)`, `log_v(u^k) = kr/s` has fractional part exactly
/// `1/s`, so no power of `v` approaches `u^k`.
pub fn rational_case_witness(
    u: u64,
    v: u64,
    r: u32,
    s: u32,
    k_max: u64,
) -> Result<RationalWitness, EquidistError> {
    let relation = power_relation(u, v)?;
    if relation != (PowerRelation::RationalLog { r, s }) || s < 2 {
        return Err(EquidistError::NotRationalCase { u, v, relation });
    }
    let ell = (1..s)
        .find(|&l| (l as u64 * r as u64) % s as u64 == 1)
        .expect("r invertible mod s");
    let (sb, rb) = (s as u64, r as u64);
    let mut min_num = sb;
    let mut class_size = 0;
    let mut verified = true;
    let vb = BigUint::from(v);
    let mut k = ell as u64;
    while k <= k_max {
        class_size += 1;
        let rem = (k * rb) % sb;
        let dist = rem.min(sb - rem);
        min_num = min_num.min(dist);
        // Exact check of the bracketing on the class: u^{ks} = v^{kr} and
        // v^{ns} < u^{ks} < v^{(n+1)s} with n = ⌊kr/s⌋.
        if k <= 64 {
            let n = k * rb / sb;
            let uks = Pow::pow(BigUint::from(u), k * sb);
            let below = Pow::pow(&vb, n * sb);
            let above = Pow::pow(&vb, (n + 1) * sb);
            verified &= rem == 1 && below < uks && uks < above && uks == Pow::pow(&vb, k * rb);
        } else {
            verified &= rem == 1;
        }
        k += sb;
    }
    Ok(RationalWitness {
        u,
        v,
        r,
        s,
        ell,
        class_size,
        distance_numerator: min_num,
        distance_denominator: sb,
        distance: min_num as f64 / sb as f64,
        verified: verified && class_size > 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PerfectPowerEmbedding {
    pub u: u64,
    pub v: u64,
    pub r: u32,
    /// `b_n = v^n` contains `u^k` at `n_k = rk`; checked for `k ≤ checked_up_to`.
    pub checked_up_to: u64,
    pub verified: bool,
}

/// Checks `v^{rk} = u^k` for `k ≤ k_max`, the embedding of `{u^k}` into `{v^n}`.
pub fn perfect_power_embedding(
    u: u64,
    v: u64,
    k_max: u64,
) -> Result<PerfectPowerEmbedding, EquidistError> {
    let relation = power_relation(u, v)?;
    let PowerRelation::PerfectPower { r } = relation else {
        return Err(EquidistError::InvalidQuery(format!(
            "{u} is not a power of {v}: {relation:?}"
        )));
    };
    let (ub, vb) = (BigUint::from(u), BigUint::from(v));
    let vr = Pow::pow(&vb, r);
    let mut uk = BigUint::one();
    let mut vrk = BigUint::one();
    let mut verified = true;
    for _ in 0..k_max {
        uk *= &ub;
        vrk *= &vr;
        verified &= uk == vrk;
    }
    Ok(PerfectPowerEmbedding {
        u,
        v,
        r,
        checked_up_to: k_max,
        verified,
    })
}
