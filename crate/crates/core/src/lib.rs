//! Constructive additive number theory at desk scale.
//!
//! * [`growth`]: growth functions, stability probes, interpolation above a base.
//! * [`sequences`]: prefixes, counting functions, rearrangements, verdicts.
//! * [`supersequence`]: complement selection and supersequence assembly.
//! * [`basis`]: iterated sumsets, basis coverage, counting bounds, eigenvalue dilution.
//! * [`equidist`]: exact fractional-part comparisons of `k·log u / log v`.

// `!(x > 0.0)` style guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod basis;
pub mod bitmap;
pub mod equidist;
pub mod growth;
pub mod numeric;
pub mod sequences;
pub mod sets;
pub mod supersequence;
