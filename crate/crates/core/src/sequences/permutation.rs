use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{SequenceError, SequencePrefix};

/// A bijection `σ` of indices; the rearrangement is `A_σ = {a_{σ(n)}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PermutationSpec {
    /// `mapping[n-1] = σ(n)`, 1-based.
    Explicit { mapping: Vec<usize> },
    /// Disjoint transpositions; every other index is fixed.
    Swaps { pairs: Vec<(usize, usize)> },
    /// `2^{2k-1} ↔ 2^{2k}` for every `k ≥ 1`, identity elsewhere.
    PowerSwap,
}

impl PermutationSpec {
    pub fn identity(n: usize) -> Self {
        PermutationSpec::Explicit {
            mapping: (1..=n).collect(),
        }
    }

    /// `σ(n)` for an index already known to lie in a validated window.
    pub fn apply(&self, n: usize) -> usize {
        match self {
            PermutationSpec::Explicit { mapping } => mapping[n - 1],
            PermutationSpec::Swaps { pairs } => pairs
                .iter()
                .find_map(|&(a, b)| {
                    if a == n {
                        Some(b)
                    } else if b == n {
                        Some(a)
                    } else {
                        None
                    }
                })
                .unwrap_or(n),
            PermutationSpec::PowerSwap => power_swap(n),
        }
    }

    /// Checks that `σ` restricted to `1..=window` is a bijection onto it.
    pub fn validate(&self, window: usize) -> Result<(), SequenceError> {
        let fail = |reason: String| Err(SequenceError::NotBijective { window, reason });
        match self {
            PermutationSpec::Explicit { mapping } => {
                if mapping.len() != window {
                    return fail(format!("mapping has {} entries", mapping.len()));
                }
                let mut seen = vec![false; window + 1];
                for &m in mapping {
                    if m == 0 || m > window {
                        return fail(format!("image {m} out of range"));
                    }
                    if std::mem::replace(&mut seen[m], true) {
                        return fail(format!("image {m} repeated"));
                    }
                }
                Ok(())
            }
            PermutationSpec::Swaps { pairs } => {
                let mut seen = vec![false; window + 1];
                for &(a, b) in pairs {
                    for i in [a, b] {
                        if i == 0 || i > window {
                            return fail(format!("index {i} out of range"));
                        }
                    }
                    if a == b {
                        return fail(format!("pair ({a}, {b}) is degenerate"));
                    }
                    for i in [a, b] {
                        if std::mem::replace(&mut seen[i], true) {
                            return fail(format!("index {i} appears in two pairs"));
                        }
                    }
                }
                Ok(())
            }
            PermutationSpec::PowerSwap => {
                // The only pair that can leave the window is the one whose
                // odd-exponent member is the largest power of two inside it.
                let mut lo = 2u128;
                while lo <= window as u128 {
                    let hi = lo * 2;
                    if hi > window as u128 {
                        return Err(SequenceError::PowerSwapWindow {
                            window,
                            lo: lo as usize,
                            hi: hi as usize,
                        });
                    }
                    lo *= 4;
                }
                Ok(())
            }
        }
    }

    pub fn materialize(&self, window: usize) -> Result<Vec<usize>, SequenceError> {
        self.validate(window)?;
        Ok((1..=window).map(|n| self.apply(n)).collect())
    }

    pub fn is_identity_on(&self, window: usize) -> bool {
        (1..=window).all(|n| self.apply(n) == n)
    }
}

fn power_swap(n: usize) -> usize {
    if n < 2 || !n.is_power_of_two() {
        return n;
    }
    if n.trailing_zeros() % 2 == 1 {
        n * 2
    } else {
        n / 2
    }
}

/// `A_σ = {a_{σ(n)}}_{n=1..N}`.
pub fn rearrange(
    a: &SequencePrefix,
    sigma: &PermutationSpec,
) -> Result<SequencePrefix, SequenceError> {
    let mapping = sigma.materialize(a.len())?;
    SequencePrefix::new(
        mapping
            .into_iter()
            .map(|m| a.values()[m - 1].clone())
            .collect(),
    )
}

/// The increasing rearrangement and its order-inducing permutation. Ties keep
/// their original relative order.
pub fn sort_rearrangement(a: &SequencePrefix) -> (SequencePrefix, PermutationSpec) {
    let mut order: Vec<usize> = (1..=a.len()).collect();
    order.sort_by(|&i, &j| a.values()[i - 1].cmp(&a.values()[j - 1]));
    let sorted = order.iter().map(|&i| a.values()[i - 1].clone()).collect();
    (
        SequencePrefix::new(sorted).expect("nonempty"),
        PermutationSpec::Explicit { mapping: order },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn explicit_swap() {
        let a = SequencePrefix::from_u64s([1, 2, 3, 4]).unwrap();
        let s = PermutationSpec::Explicit {
            mapping: vec![2, 1, 3, 4],
        };
        assert_eq!(
            rearrange(&a, &s).unwrap(),
            SequencePrefix::from_u64s([2, 1, 3, 4]).unwrap()
        );
        let t = PermutationSpec::Swaps {
            pairs: vec![(1, 2)],
        };
        assert_eq!(
            rearrange(&a, &t).unwrap(),
            SequencePrefix::from_u64s([2, 1, 3, 4]).unwrap()
        );
    }

    #[test]
    fn identity_leaves_sequence_unchanged() {
        let a = SequencePrefix::from_u64s([7, 3, 9]).unwrap();
        assert_eq!(rearrange(&a, &PermutationSpec::identity(3)).unwrap(), a);
    }

    #[test]
    fn power_swap_values() {
        let n = (1 << 11) - 1;
        let a = SequencePrefix::from_u64s(1..=n as u64).unwrap();
        let r = rearrange(&a, &PermutationSpec::PowerSwap).unwrap();
        let at = |i: usize| r.term(i).unwrap().clone();
        assert_eq!(at(2), BigUint::from(4u32));
        assert_eq!(at(4), BigUint::from(2u32));
        assert_eq!(at(8), BigUint::from(16u32));
        assert_eq!(at(16), BigUint::from(8u32));
        assert_eq!(at(1), BigUint::from(1u32));
        assert_eq!(at(3), BigUint::from(3u32));
        assert_eq!(at(1024), BigUint::from(512u32));
    }

    #[test]
    fn power_swap_window_closure() {
        // 512 ↔ 1024 straddles 1023.
        assert_eq!(
            PermutationSpec::PowerSwap.validate(1023),
            Err(SequenceError::PowerSwapWindow {
                window: 1023,
                lo: 512,
                hi: 1024
            })
        );
        assert!(PermutationSpec::PowerSwap.validate(2047).is_ok());
        assert!(PermutationSpec::PowerSwap.validate(300).is_ok());
        assert!(PermutationSpec::PowerSwap.validate(1).is_ok());
        assert!(PermutationSpec::PowerSwap.validate(3).is_err());
        assert!(PermutationSpec::PowerSwap.validate(4).is_ok());
    }

    #[test]
    fn non_bijections_rejected() {
        let bad = [
            PermutationSpec::Explicit {
                mapping: vec![1, 1, 3],
            },
            PermutationSpec::Explicit {
                mapping: vec![1, 2],
            },
            PermutationSpec::Explicit {
                mapping: vec![0, 1, 2],
            },
            PermutationSpec::Swaps {
                pairs: vec![(1, 2), (2, 3)],
            },
            PermutationSpec::Swaps {
                pairs: vec![(1, 4)],
            },
            PermutationSpec::Swaps {
                pairs: vec![(2, 2)],
            },
        ];
        for s in bad {
            assert!(
                matches!(s.validate(3), Err(SequenceError::NotBijective { .. })),
                "{s:?}"
            );
        }
    }

    #[test]
    fn sort_examples() {
        let a = SequencePrefix::from_u64s([3, 1, 2]).unwrap();
        let (sorted, sigma) = sort_rearrangement(&a);
        assert_eq!(sorted, SequencePrefix::from_u64s([1, 2, 3]).unwrap());
        assert_eq!(
            sigma,
            PermutationSpec::Explicit {
                mapping: vec![2, 3, 1]
            }
        );
        assert_eq!(rearrange(&a, &sigma).unwrap(), sorted);

        let inc = SequencePrefix::from_u64s([1, 5, 9]).unwrap();
        let (s2, id) = sort_rearrangement(&inc);
        assert_eq!(s2, inc);
        assert!(id.is_identity_on(3));
    }

    #[test]
    fn sort_is_stable_on_ties() {
        let a = SequencePrefix::from_u64s([2, 1, 2, 1]).unwrap();
        let (_, sigma) = sort_rearrangement(&a);
        assert_eq!(
            sigma,
            PermutationSpec::Explicit {
                mapping: vec![2, 4, 1, 3]
            }
        );
    }

    #[test]
    fn json_form() {
        let s: PermutationSpec = serde_json::from_str(r#"{"kind":"power_swap"}"#).unwrap();
        assert_eq!(s, PermutationSpec::PowerSwap);
        let e: PermutationSpec =
            serde_json::from_str(r#"{"kind":"swaps","pairs":[[1,2]]}"#).unwrap();
        assert_eq!(
            e,
            PermutationSpec::Swaps {
                pairs: vec![(1, 2)]
            }
        );
    }
}
