//! Oscillation of finite functions and the ordinal oscillation map.
//!
//! `Osc(s, t; F)` collects the points of `F` (past its minimum) where `s`
//! crosses from `<= t` at the predecessor to `> t`. The ordinal map applies
//! this to the two maximal-weight columns restricted to the lower trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::walks::{WalkError, Walker};

#[derive(Debug, Error)]
pub enum OscError {
    #[error("finite function domain not strictly increasing")]
    BadDomain,
    #[error("domain/value length mismatch: {dom} vs {vals}")]
    LengthMismatch { dom: usize, vals: usize },
    #[error("F is not contained in the common domain (missing {0})")]
    OutsideDomain(Ordinal),
    #[error("osc requires alpha < beta, got alpha={alpha} beta={beta}")]
    NeedsStrictPair { alpha: Ordinal, beta: Ordinal },
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// A function on a finite increasing set of ordinals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinFun {
    domain: Vec<Ordinal>,
    values: Vec<u64>,
}

impl FinFun {
    pub fn new(domain: Vec<Ordinal>, values: Vec<u64>) -> Result<Self, OscError> {
        if domain.len() != values.len() {
            return Err(OscError::LengthMismatch {
                dom: domain.len(),
                vals: values.len(),
            });
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OscError::BadDomain);
        }
        Ok(FinFun { domain, values })
    }

    pub fn domain(&self) -> &[Ordinal] {
        &self.domain
    }

    pub fn get(&self, x: &Ordinal) -> Option<u64> {
        self.domain
            .binary_search(x)
            .ok()
            .map(|i| self.values[i])
    }
}

/// `Osc(s, t; F)` with its cardinality. `F` must be contained in the common
/// domain; it may be empty.
pub fn osc_finite(
    s: &FinFun,
    t: &FinFun,
    f: &[Ordinal],
) -> Result<(Vec<Ordinal>, u64), OscError> {
    debug_assert!(f.windows(2).all(|w| w[0] < w[1]));
    let mut out = Vec::new();
    let lookup = |fun: &FinFun, x: &Ordinal| -> Result<u64, OscError> {
        fun.get(x).ok_or_else(|| OscError::OutsideDomain(x.clone()))
    };
    for i in 1..f.len() {
        let xi = &f[i];
        let prev = &f[i - 1];
        if lookup(s, prev)? <= lookup(t, prev)? && lookup(s, xi)? > lookup(t, xi)? {
            out.push(xi.clone());
        }
    }
    let n = out.len() as u64;
    Ok((out, n))
}

/// Result of the ordinal oscillation: the witnessing set and its size,
/// along with the lower trace it was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OscReport {
    pub set: Vec<Ordinal>,
    pub count: u64,
    pub lower_trace: Vec<Ordinal>,
}

/// `osc(alpha, beta)` for `alpha < beta`: the oscillation of the two
/// maximal-weight columns on the lower trace `L(alpha, beta)`.
pub fn osc(walker: &Walker, alpha: &Ordinal, beta: &Ordinal) -> Result<OscReport, OscError> {
    if alpha >= beta {
        return Err(OscError::NeedsStrictPair {
            alpha: alpha.clone(),
            beta: beta.clone(),
        });
    }
    let lower = walker.lower_trace(alpha, beta)?;
    let mut s_vals = Vec::with_capacity(lower.len());
    let mut t_vals = Vec::with_capacity(lower.len());
    for xi in &lower {
        s_vals.push(walker.rho1(xi, alpha)?);
        t_vals.push(walker.rho1(xi, beta)?);
    }
    let s = FinFun::new(lower.clone(), s_vals).expect("lower trace is increasing");
    let t = FinFun::new(lower.clone(), t_vals).expect("lower trace is increasing");
    let (set, count) = osc_finite(&s, &t, &lower)?;
    Ok(OscReport {
        set,
        count,
        lower_trace: lower,
    })
}

/// Convenience projection of [`osc`].
pub fn osc_count(walker: &Walker, alpha: &Ordinal, beta: &Ordinal) -> Result<u64, OscError> {
    Ok(osc(walker, alpha, beta)?.count)
}
