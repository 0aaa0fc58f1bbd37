//! Finite prefixes `a_1..a_N` of integer sequences and the operations on them:
//! counting functions, rearrangements, asymptotic verdicts and densities.

mod density;
mod permutation;
mod verdict;

pub use density::{density_estimate, density_estimate_of_set, DensityEstimate, DENSITY_GRID_RATIO};
pub use permutation::{rearrange, sort_rearrangement, PermutationSpec};
pub use verdict::{asymptotic_verdict, AsymptoticVerdict, LimitPoint};

use std::borrow::Cow;
use std::str::FromStr;

use num_bigint::BigUint;
use schemars::JsonSchema;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::growth::GrowthError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("sequence prefix must be nonempty")]
    Empty,
    #[error("cannot parse {0:?} as a nonnegative integer")]
    Parse(String),
    #[error("permutation is not a bijection on 1..={window}: {reason}")]
    NotBijective { window: usize, reason: String },
    #[error("power-swap rule is not closed on 1..={window}: {lo} ↔ {hi} straddles the window end")]
    PowerSwapWindow { window: usize, lo: usize, hi: usize },
    #[error("sequence is not strictly increasing at index {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("sequence has {len} terms, at least {min} are required")]
    TooShort { len: usize, min: usize },
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

/// Finite prefix `a_1..a_N` of a sequence of nonnegative integers.
///
/// Serializes as a JSON array of decimal strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePrefix {
    values: Vec<BigUint>,
    strictly_increasing: bool,
}

impl SequencePrefix {
    pub fn new(values: Vec<BigUint>) -> Result<Self, SequenceError> {
        if values.is_empty() {
            return Err(SequenceError::Empty);
        }
        let strictly_increasing = values.windows(2).all(|w| w[0] < w[1]);
        Ok(SequencePrefix {
            values,
            strictly_increasing,
        })
    }

    pub fn from_u64s(values: impl IntoIterator<Item = u64>) -> Result<Self, SequenceError> {
        Self::new(values.into_iter().map(BigUint::from).collect())
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigUint> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `a_n`, 1-based.
    pub fn term(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.strictly_increasing
    }

    /// Index of the first term that is not larger than its predecessor.
    pub fn first_non_increase(&self) -> Option<usize> {
        self.values
            .windows(2)
            .position(|w| w[0] >= w[1])
            .map(|i| i + 2)
    }

    pub fn require_strictly_increasing(&self) -> Result<(), SequenceError> {
        match self.first_non_increase() {
            None => Ok(()),
            Some(index) => Err(SequenceError::NotStrictlyIncreasing { index }),
        }
    }

    /// Distinct values in increasing order.
    pub fn distinct_sorted(&self) -> Cow<'_, [BigUint]> {
        if self.strictly_increasing {
            Cow::Borrowed(&self.values)
        } else {
            let mut v = self.values.clone();
            v.sort_unstable();
            v.dedup();
            Cow::Owned(v)
        }
    }

    /// The counting function `𝒜(y, x)`: number of distinct values in `[y, x]`.
    pub fn counting(&self, y: &BigUint, x: &BigUint) -> usize {
        if y > x {
            return 0;
        }
        let sorted = self.distinct_sorted();
        let lo = sorted.partition_point(|v| v < y);
        let hi = sorted.partition_point(|v| v <= x);
        hi - lo
    }

    pub fn counting_u64(&self, y: u64, x: u64) -> usize {
        self.counting(&BigUint::from(y), &BigUint::from(x))
    }

    /// One decimal value per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.values {
            s.push_str(&v.to_str_radix(10));
            s.push('\n');
        }
        s
    }
}

/// Accepts a JSON array of decimal strings (or plain numbers) or one value
/// per line. Blank lines and `#` comments are skipped in the line format.
impl FromStr for SequencePrefix {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim_start();
        if t.starts_with('[') {
            let raw: Vec<serde_json::Value> =
                serde_json::from_str(t).map_err(|e| SequenceError::Parse(e.to_string()))?;
            let values = raw
                .into_iter()
                .map(|v| {
                    let text = match &v {
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Number(n) => n.to_string(),
                        other => return Err(SequenceError::Parse(other.to_string())),
                    };
                    parse_decimal(&text)
                })
                .collect::<Result<Vec<_>, _>>()?;
            return SequencePrefix::new(values);
        }
        let values = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse_decimal)
            .collect::<Result<Vec<_>, _>>()?;
        SequencePrefix::new(values)
    }
}

fn parse_decimal(s: &str) -> Result<BigUint, SequenceError> {
    BigUint::parse_bytes(s.trim().as_bytes(), 10).ok_or_else(|| SequenceError::Parse(s.to_string()))
}

impl Serialize for SequencePrefix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.values.iter().map(|v| v.to_str_radix(10)))
    }
}

impl<'de> Deserialize<'de> for SequencePrefix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let values = raw
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        SequencePrefix::new(values).map_err(serde::de::Error::custom)
    }
}

impl JsonSchema for SequencePrefix {
    fn schema_name() -> String {
        "SequencePrefix".into()
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        let mut schema = <Vec<String>>::json_schema(gen).into_object();
        schema.array().min_items = Some(1);
        schema.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_examples() {
        let naturals = SequencePrefix::from_u64s(1..=100).unwrap();
        assert_eq!(naturals.counting_u64(0, 10), 10);
        let squares = SequencePrefix::from_u64s((1..=20).map(|k| k * k)).unwrap();
        assert_eq!(squares.counting_u64(0, 100), 10);
        let single = SequencePrefix::from_u64s([5]).unwrap();
        assert_eq!(single.counting_u64(6, 10), 0);
    }

    #[test]
    fn counting_dedups_unsorted_input() {
        let a = SequencePrefix::from_u64s([5, 3, 5, 1, 3]).unwrap();
        assert!(!a.is_strictly_increasing());
        assert_eq!(a.counting_u64(0, 10), 3);
        assert_eq!(a.counting_u64(2, 4), 1);
    }

    #[test]
    fn empty_prefix_rejected() {
        assert_eq!(SequencePrefix::new(vec![]), Err(SequenceError::Empty));
    }

    #[test]
    fn flags_and_first_violation() {
        let a = SequencePrefix::from_u64s([1, 2, 2, 3]).unwrap();
        assert!(!a.is_strictly_increasing());
        assert_eq!(a.first_non_increase(), Some(3));
        assert!(SequencePrefix::from_u64s([1, 2, 3])
            .unwrap()
            .is_strictly_increasing());
    }

    #[test]
    fn text_and_json_forms() {
        let a: SequencePrefix = "1\n# comment\n\n22\n333\n".parse().unwrap();
        assert_eq!(a, SequencePrefix::from_u64s([1, 22, 333]).unwrap());
        let b: SequencePrefix = r#"["1", "22", 333]"#.parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"["1","22","333"]"#);
        let big = "123456789012345678901234567890";
        let c: SequencePrefix = serde_json::from_str(&format!(r#"["{big}"]"#)).unwrap();
        assert_eq!(c.to_text().trim(), big);
        assert!("1\nx\n".parse::<SequencePrefix>().is_err());
        assert!(serde_json::from_str::<SequencePrefix>("[]").is_err());
    }
}
