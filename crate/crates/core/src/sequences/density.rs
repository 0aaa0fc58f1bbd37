use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{SequenceError, SequencePrefix};
use crate::sets::{IntegerSet, SortedSet};

/// Ratio between consecutive sample points of the density grid.
pub const DENSITY_GRID_RATIO: f64 = 1.01;

/// Min and max of `𝒞(0,x)/x` over a geometric grid on `[x_max/2, x_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DensityEstimate {
    pub x_max: u64,
    pub lower: f64,
    pub upper: f64,
}

pub fn density_estimate(c: &SequencePrefix, x_max: u64) -> Result<DensityEstimate, SequenceError> {
    c.require_strictly_increasing()?;
    Ok(density_estimate_of_set(
        &SortedSet::from_prefix_upto(c, x_max),
        x_max,
    ))
}

/// Density estimate of any [`IntegerSet`]. `𝒞(0,x)` counts 0, so it can reach
/// `x + 1`; ratios are capped at 1.
pub fn density_estimate_of_set(c: &impl IntegerSet, x_max: u64) -> DensityEstimate {
    let x_max = x_max.max(1);
    let mut grid = Vec::new();
    let mut x = (x_max / 2).max(1) as f64;
    while (x as u64) < x_max {
        grid.push(x as u64);
        x *= DENSITY_GRID_RATIO;
        x = x.max(grid[grid.len() - 1] as f64 + 1.0);
    }
    grid.push(x_max);

    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for x in grid {
        let r = (c.count_in(0, x) as f64 / x as f64).min(1.0);
        lower = lower.min(r);
        upper = upper.max(r);
    }
    DensityEstimate {
        x_max,
        lower,
        upper,
    }
}
