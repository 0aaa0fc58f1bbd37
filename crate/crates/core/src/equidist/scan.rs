use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{bracket, check_pair, power_relation, EquidistError, PowerRelation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ScanConfig {
    /// `k` values handled per parallel work unit.
    pub chunk: u64,
    pub max_k: u64,
    /// Record a [`TraceRow`] for every `k`.
    pub trace: bool,
    /// Largest denominator, in bits, for which the minimal gap is also
    /// reported as an exact fraction.
    pub rational_max_bits: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            chunk: 8192,
            max_k: 1_000_000,
            trace: false,
            rational_max_bits: 16_384,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    /// `⟨kθ⟩ < 1/4`.
    Low,
    /// `1/4 ≤ ⟨kθ⟩ ≤ 3/4`.
    Middle,
    /// `⟨kθ⟩ > 3/4`.
    High,
}

impl Zone {
    pub fn as_str(self) -> &'static str {
        match self {
            Zone::Low => "low",
            Zone::Middle => "middle",
            Zone::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TraceRow {
    pub k: u64,
    pub floor_n: u64,
    pub zone: Zone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ExactRational {
    pub numerator: String,
    pub denominator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ScanReport {
    pub u: u64,
    pub v: u64,
    #[serde(rename = "K")]
    pub k_max: u64,
    pub hits_middle: u64,
    pub middle_fraction: f64,
    /// Least `k` with `⟨kθ⟩ ∈ [1/4, 3/4]`.
    pub first_violation: Option<u64>,
    /// `min(1 − v^{−1/4}, 1/2)`.
    pub epsilon_star: f64,
    /// `min |v^n/u^k − 1|` over `k ≤ K` and the two `n` bracketing `k·log_v u`.
    pub min_relative_gap: f64,
    pub min_gap_k: u64,
    pub min_gap_n: u64,
    /// `|v^n − u^k| / u^k` in lowest terms, when the denominator is small enough.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap_exact: Option<ExactRational>,
    /// Zone tests settled from the leading 128 bits.
    pub fast_decisions: u64,
    /// Zone tests that needed full-size powers.
    pub exact_fallbacks: u64,
    #[serde(skip)]
    #[schemars(skip)]
    pub trace: Vec<TraceRow>,
}

struct ChunkResult {
    hits: u64,
    first: Option<u64>,
    gap: (f64, u64, u64),
    fast: u64,
    exact: u64,
    trace: Vec<TraceRow>,
}

/// Classifies `⟨k·log_v u⟩` for `k = 1..=K` exactly. `P = u^k`, `V = v^n` and
/// `v^{n+1}` are carried along each chunk and updated by small-integer
/// multiplications.
pub fn impossibility_scan(
    u: u64,
    v: u64,
    k_max: u64,
    config: &ScanConfig,
) -> Result<ScanReport, EquidistError> {
    check_pair(u, v)?;
    if k_max == 0 || k_max > config.max_k {
        return Err(EquidistError::InvalidQuery(format!(
            "K must be in 1..={}, got {k_max}",
            config.max_k
        )));
    }
    let relation = power_relation(u, v)?;
    if relation != PowerRelation::Irrational {
        return Err(EquidistError::RationalRelation(relation));
    }
    let chunk = config.chunk.max(1);
    let starts: Vec<u64> = (0..k_max.div_ceil(chunk)).map(|c| 1 + c * chunk).collect();
    let results: Vec<ChunkResult> = starts
        .par_iter()
        .map(|&k0| scan_chunk(u, v, k0, (k0 + chunk - 1).min(k_max), config.trace))
        .collect();

    let mut hits_middle = 0;
    let mut first_violation = None;
    let mut best = (f64::INFINITY, 0, 0);
    let (mut fast_decisions, mut exact_fallbacks) = (0, 0);
    let mut trace = Vec::new();
    for r in results {
        hits_middle += r.hits;
        first_violation = first_violation.or(r.first);
        if r.gap.0 < best.0 {
            best = r.gap;
        }
        fast_decisions += r.fast;
        exact_fallbacks += r.exact;
        trace.extend(r.trace);
    }
    let (min_relative_gap, min_gap_k, min_gap_n) = best;
    Ok(ScanReport {
        u,
        v,
        k_max,
        hits_middle,
        middle_fraction: hits_middle as f64 / k_max as f64,
        first_violation,
        epsilon_star: (1.0 - (v as f64).powf(-0.25)).min(0.5),
        min_relative_gap,
        min_gap_k,
        min_gap_n,
        min_gap_exact: exact_gap(u, v, min_gap_k, min_gap_n, config.rational_max_bits),
        fast_decisions,
        exact_fallbacks,
        trace,
    })
}

fn scan_chunk(u: u64, v: u64, k0: u64, k1: u64, want_trace: bool) -> ChunkResult {
    let mut p = Pow::pow(BigUint::from(u), k0);
    let (mut n, mut low) = bracket(&p, k0, u, v);
    let mut high = &low * v;
    let mut out = ChunkResult {
        hits: 0,
        first: None,
        gap: (f64::INFINITY, 0, 0),
        fast: 0,
        exact: 0,
        trace: Vec::new(),
    };
    for k in k0..=k1 {
        if k > k0 {
            p *= u;
            while high <= p {
                n += 1;
                low = std::mem::take(&mut high);
                high = &low * v;
            }
        }
        let (pt, pe) = top_bits(&p);
        let (lt, le) = top_bits(&low);
        let mut decide = |pq: (u64, u64)| -> Ordering {
            match certified_cmp(pt, pe, lt, le, v, pq) {
                Some(o) => {
                    out.fast += 1;
                    o
                }
                None => {
                    out.exact += 1;
                    let (num, den) = pq;
                    Pow::pow(&p, den).cmp(&(Pow::pow(&low, den) * Pow::pow(BigUint::from(v), num)))
                }
            }
        };
        let zone = if decide((1, 4)) == Ordering::Less {
            Zone::Low
        } else if decide((3, 4)) == Ordering::Greater {
            Zone::High
        } else {
            Zone::Middle
        };
        if zone == Zone::Middle {
            out.hits += 1;
            out.first.get_or_insert(k);
        }
        let (ht, he) = top_bits(&high);
        let below = 1.0 - ratio(lt, le, pt, pe);
        let above = ratio(ht, he, pt, pe) - 1.0;
        let (gap, gap_n) = if below <= above {
            (below, n)
        } else {
            (above, n + 1)
        };
        if gap < out.gap.0 {
            out.gap = (gap, k, gap_n);
        }
        if want_trace {
            out.trace.push(TraceRow {
                k,
                floor_n: n,
                zone,
            });
        }
    }
    out
}

/// `(m, e)` with `x ∈ [m·2^e, (m+1)·2^e)`, exact (`e = 0`) up to 128 bits.
fn top_bits(x: &BigUint) -> (u128, u64) {
    let bits = x.bits();
    if bits <= 128 {
        return (x.to_u128().expect("fits in 128 bits"), 0);
    }
    let e = bits - 128;
    ((x >> e).to_u128().expect("fits in 128 bits"), e)
}

fn ratio(a: u128, ae: u64, b: u128, be: u64) -> f64 {
    (a as f64 / b as f64) * 2f64.powi(ae as i32 - be as i32)
}

/// Sign of `(P/V)^q − v^p` from the leading bits of `P` and `V`, or `None`
/// when the enclosing intervals do not separate.
fn certified_cmp(
    pt: u128,
    pe: u64,
    lt: u128,
    le: u64,
    v: u64,
    (p, q): (u64, u64),
) -> Option<Ordering> {
    let vp = Pow::pow(BigUint::from(v), p);
    let scale = |x: BigUint, by: i64| if by > 0 { x << (by as u64) } else { x };
    let d = (pe as i64 - le as i64) * q as i64;
    let pow_q = |m: u128, plus: u32| Pow::pow(BigUint::from(m) + plus, q);
    // R = P/V lies strictly inside (pt/(lt+1), (pt+1)/lt) · 2^(pe−le).
    let lo_num = scale(pow_q(pt, 0), d);
    let lo_den = scale(&vp * pow_q(lt, 1), -d);
    if lo_num >= lo_den {
        return Some(Ordering::Greater);
    }
    let hi_num = scale(pow_q(pt, 1), d);
    let hi_den = scale(&vp * pow_q(lt, 0), -d);
    if hi_num <= hi_den {
        return Some(Ordering::Less);
    }
    None
}

fn exact_gap(u: u64, v: u64, k: u64, n: u64, max_bits: u64) -> Option<ExactRational> {
    if k == 0 || (k as f64) * (u as f64).log2() > max_bits as f64 {
        return None;
    }
    let uk = Pow::pow(BigUint::from(u), k);
    let vn = Pow::pow(BigUint::from(v), n);
    let num = if vn > uk { &vn - &uk } else { &uk - &vn };
    let g = num.gcd(&uk);
    Some(ExactRational {
        numerator: (num / &g).to_string(),
        denominator: (&uk / &g).to_string(),
    })
}
