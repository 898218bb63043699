//! C-sequences: for every limit ordinal a strictly increasing omega-sequence
//! cofinal in it, with `C_{a+1} = {a}` and `C_0` empty.
//!
//! Three variants are provided. The canonical one peels CNF terms; the
//! jittered one perturbs it deterministically per seed to catch code that
//! silently assumes canonical sequences; the bitstream variant (implemented
//! by the forcing environment) plugs in through the [`CSeq`] trait.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalClass};
use crate::rng::prf;

#[derive(Debug, Error)]
pub enum CSeqError {
    #[error("c_elem requires a limit ordinal, got {0}")]
    NotALimit(Ordinal),
    #[error("C_alpha ∩ alpha is infinite for limit alpha = {0}")]
    InfiniteIntersection(Ordinal),
    #[error("c_min_above requires xi < alpha, got xi={xi} alpha={alpha}")]
    MinAboveOutOfRange { alpha: Ordinal, xi: Ordinal },
    #[error("bitstream decision not reached within prefix budget {budget} for alpha={alpha}, n={n}")]
    DecisionBudget { alpha: Ordinal, n: u64, budget: u64 },
    #[error("ordinal {alpha} is outside the bitstream universe below {bound}")]
    OutOfUniverse { alpha: Ordinal, bound: Ordinal },
}

/// Serializable description of a C-sequence rule, as it appears in
/// experiment configs: `{"csequence":{"variant":"canonical"}}` etc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CSeqSpec {
    Canonical,
    Jittered { seed: u64 },
    /// Decided by the seeded bit stream of a forcing environment.
    Bitstream {
        seed: u64,
        bound: Ordinal,
        channels: u32,
    },
}

impl CSeqSpec {
    pub fn id(&self) -> String {
        match self {
            CSeqSpec::Canonical => "canonical".into(),
            CSeqSpec::Jittered { seed } => format!("jittered:{seed}"),
            CSeqSpec::Bitstream { seed, bound, channels } => {
                format!("bitstream:{seed}:{bound}:{channels}")
            }
        }
    }
}

/// A C-sequence evaluator: the n-th member of `C_alpha` for limit `alpha`.
pub trait CSeq: Send + Sync {
    fn elem(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError>;

    /// Stable identifier for memo keys and reports.
    fn spec_id(&self) -> String;
}

/// The n-th member of `C_alpha` under `spec`; errors unless `alpha` is a
/// limit.
pub fn c_elem(spec: &dyn CSeq, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
    spec.elem(alpha, n)
}

/// `C_alpha ∩ xi` as an increasing list, for any `alpha` (zero, successor or
/// limit) and `xi <= alpha`. For limit `alpha` requires `xi < alpha`, since
/// `C_alpha ∩ alpha` is the whole infinite sequence.
pub fn c_below(spec: &dyn CSeq, alpha: &Ordinal, xi: &Ordinal) -> Result<Vec<Ordinal>, CSeqError> {
    debug_assert!(xi <= alpha);
    match alpha.classify() {
        OrdinalClass::Zero => Ok(Vec::new()),
        OrdinalClass::Successor => {
            let p = alpha.predecessor().expect("successor");
            if p < *xi {
                Ok(vec![p])
            } else {
                Ok(Vec::new())
            }
        }
        OrdinalClass::Limit => {
            if xi == alpha {
                return Err(CSeqError::InfiniteIntersection(alpha.clone()));
            }
            let mut out = Vec::new();
            for n in 0.. {
                let x = spec.elem(alpha, n)?;
                if x >= *xi {
                    break;
                }
                out.push(x);
            }
            Ok(out)
        }
    }
}

/// `min(C_alpha \ xi)`; requires `xi < alpha`, which makes the minimum exist
/// because `C_alpha` is cofinal in `alpha`.
pub fn c_min_above(spec: &dyn CSeq, alpha: &Ordinal, xi: &Ordinal) -> Result<Ordinal, CSeqError> {
    if xi >= alpha {
        return Err(CSeqError::MinAboveOutOfRange {
            alpha: alpha.clone(),
            xi: xi.clone(),
        });
    }
    match alpha.classify() {
        OrdinalClass::Zero => unreachable!("xi < 0 is impossible"),
        OrdinalClass::Successor => Ok(alpha.predecessor().expect("successor")),
        OrdinalClass::Limit => {
            for n in 0.. {
                let x = spec.elem(alpha, n)?;
                if x >= *xi {
                    return Ok(x);
                }
            }
            unreachable!("C_alpha is cofinal in alpha")
        }
    }
}

/// Canonical fundamental sequences. For `alpha = gamma + w^e*c` (last CNF
/// term), one copy of `w^e` is peeled off `base = gamma + w^e*(c-1)`:
/// `C_alpha(n) = base + n` when `e = 1` (so `C_w` is the naturals), and
/// `C_alpha(n) = base + w^{e-1}*(n+1)` when `e >= 2`.
pub struct Canonical;

impl CSeq for Canonical {
    fn elem(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
        let (base, e) = alpha
            .peel_limit()
            .ok_or_else(|| CSeqError::NotALimit(alpha.clone()))?;
        Ok(if e == 1 {
            base.add_nat(n)
        } else {
            base.append_term(e - 1, n + 1)
        })
    }

    fn spec_id(&self) -> String {
        "canonical".into()
    }
}

/// Seeded jitter over the canonical sequence: finitely many extra points
/// inserted below the canonical first member, followed by a monotone
/// reindexing (seeded skips) of the canonical tail. Still strictly
/// increasing and cofinal, identical across runs with equal seed.
pub struct Jittered {
    seed: u64,
    plans: Mutex<HashMap<Ordinal, JitterPlan>>,
}

struct JitterPlan {
    insertions: Vec<Ordinal>,
    // skips[m] = canonical index used for jittered index m (strictly
    // increasing), extended on demand.
    reindex: Vec<u64>,
}

impl Jittered {
    pub fn new(seed: u64) -> Self {
        Jittered {
            seed,
            plans: Mutex::new(HashMap::new()),
        }
    }

    fn plan_elem(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
        let canonical = Canonical;
        let mut plans = self.plans.lock().unwrap();
        let plan = match plans.get_mut(alpha) {
            Some(p) => p,
            None => {
                let first = canonical.elem(alpha, 0)?;
                let h = prf(self.seed, &[alpha.code() as u64, (alpha.code() >> 64) as u64]);
                let mut insertions = Vec::new();
                if !first.is_zero() {
                    // Room below C_alpha(0): it is >= w here, so finite
                    // ordinals fit below it.
                    let k_ins = h % 3;
                    let mut v = 0u64;
                    for j in 0..k_ins {
                        v += 1 + prf(self.seed, &[alpha.code() as u64, 1, j]) % 5;
                        insertions.push(Ordinal::from_nat(v));
                    }
                }
                plans.insert(alpha.clone(), JitterPlan { insertions, reindex: Vec::new() });
                plans.get_mut(alpha).unwrap()
            }
        };
        let ins = plan.insertions.len() as u64;
        if n < ins {
            return Ok(plan.insertions[n as usize].clone());
        }
        let m = (n - ins) as usize;
        while plan.reindex.len() <= m {
            let t = plan.reindex.len() as u64;
            let prev = plan.reindex.last().copied().map(|x| x + 1).unwrap_or(0);
            let skip = prf(self.seed, &[alpha.code() as u64, 2, t]) % 2;
            plan.reindex.push(prev + skip);
        }
        canonical.elem(alpha, plan.reindex[m])
    }
}

impl CSeq for Jittered {
    fn elem(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
        if !alpha.is_limit() {
            return Err(CSeqError::NotALimit(alpha.clone()));
        }
        self.plan_elem(alpha, n)
    }

    fn spec_id(&self) -> String {
        format!("jittered:{}", self.seed)
    }
}
