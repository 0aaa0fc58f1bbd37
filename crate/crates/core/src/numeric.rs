//! Small helpers bridging big integers and `f64`.

use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::growth::{GrowthError, GrowthFunction};

/// Natural log of a big integer; `-∞` for zero.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `value / f(n)`, by direct division when both sides are finite doubles and
/// in log space otherwise.
pub fn ratio_to_growth(value: &BigUint, f: &GrowthFunction, n: f64) -> Result<f64, GrowthError> {
    if value.bits() <= 1000 {
        let denom = f.eval(n)?;
        if denom.is_finite() && denom > 0.0 {
            return Ok(value.to_f64().expect("fits") / denom);
        }
    }
    Ok((ln_biguint(value) - f.ln_eval(n)?).exp())
}

/// `⌊x⌋` as a big integer for finite nonnegative `x`.
pub fn floor_to_biguint(x: f64) -> Option<BigUint> {
    if !(x.is_finite() && x >= 0.0) {
        return None;
    }
    BigUint::from_f64(x.floor())
}

/// `⌊t⌋`, except that values within `1e-9·max(1, t)` of an integer snap to it.
pub(crate) fn snapped_floor(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= 1e-9 * t.abs().max(1.0) {
        r
    } else {
        t.floor()
    }
}

pub(crate) fn factorial(h: u32) -> BigUint {
    (1..=h).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// `C(n, k)` for small `k`.
pub(crate) fn binomial(n: u64, k: u32) -> BigUint {
    if (n as u128) < k as u128 {
        return BigUint::zero();
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k as u64 {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
