//! walklab: a laboratory for the minimal-walk calculus on ordinals below
//! w^w.
//!
//! The crate computes walk traces and maximal weights over C-sequences,
//! oscillation of the weight columns, the real- and
//! complex-valued point functions built from them, Kronecker approximation
//! searches at high precision, oscillation-pattern scanners with exact
//! verification, and a finite-forcing-condition environment whose decided
//! walk data supports a verified one-point oscillation extension search.
//!
//! Exact combinatorics (ordinals, walks, patterns, forcing conditions) is
//! integer-only. The analytic lane is generic over the [`real::Real`]
//! scalar: `f64` for fast scans, fixed-point big reals for verified
//! answers, instantiated through the aliases below.

pub mod cohen;
pub mod config;
pub mod cseq;
pub mod invariants;
pub mod ordinal;
pub mod osc;
pub mod pattern;
pub mod points;
pub mod real;
pub mod rng;
pub mod theta;
pub mod walks;

/// Scan-grade scalar for fast searches; never used for verified answers.
pub type RealFast = f64;
/// Fixed-point scalar with 128-bit working precision (plus guard bits).
pub type Real128 = real::Fix<176>;
/// Fixed-point scalar with 256-bit working precision, the default lane.
pub type Real256 = real::Fix<304>;
/// Fixed-point scalar with 512-bit working precision.
pub type Real512 = real::Fix<560>;

pub use cseq::{CSeq, CSeqSpec};
pub use ordinal::{Ordinal, OrdinalClass};
pub use osc::{osc, osc_finite, FinFun, OscReport};
pub use walks::{DeltaOutcome, LowerTraceReading, WalkReport, Walker};
