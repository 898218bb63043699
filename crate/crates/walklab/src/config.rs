//! Experiment configs and the dispatcher behind the command-line front
//! end.
//!
//! A config fully determines a run: seed, ordinal bound, C-sequence rule,
//! real-family parameters, budgets and the experiment kind. Reports are
//! emitted as JSON with canonical (sorted) key order and decimal strings
//! for every real, so equal configs produce byte-identical files; every
//! witness in a report carries a `verified` flag produced by independent
//! recomputation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cohen::{
    claim_prepare, claim_search, claim_verify, BitstreamCSeq, ClaimInstance,
    ClaimSearchOutcome, CohenEnv, CohenError, FinCondition,
};
use crate::cseq::{CSeq, CSeqError, CSeqSpec, Canonical, Jittered};
use crate::invariants::{run_all, InvariantScale, SuiteResult};
use crate::ordinal::Ordinal;
use crate::osc::{osc, OscError};
use crate::pattern::{
    delta_system, poset_condition_valid, poset_first_violation, scan_anchor_pattern,
    scan_matrix_pattern, starstar_criterion, Family, PatternError, PatternMatrix,
};
use crate::points::{v_point, w_point, PointError, PointValue, PiecewiseG};
use crate::real::Real;
use crate::theta::{
    covering_bound, kronecker_search, verify_covering, verify_kronecker_hit, ThetaFamily,
    ThetaMode,
};
use crate::walks::{WalkError, Walker};
use crate::{Real128, Real256, Real512};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Osc(#[from] OscError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Cohen(#[from] CohenError),
    #[error(transparent)]
    CSeq(#[from] CSeqError),
}

/// Theta family parameters as they appear in configs:
/// `{"mode":"sqrt_primes","precision":256}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaConfig {
    #[serde(flatten)]
    pub mode: ThetaMode,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub pairs: bool,
}

fn default_precision() -> u32 {
    256
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig {
            mode: ThetaMode::SqrtPrimes,
            precision: 256,
            pairs: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Budgets {
    #[serde(default = "default_pair_probes")]
    pub pair_probes: u64,
}

fn default_pair_probes() -> u64 {
    1_000_000
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            pair_probes: default_pair_probes(),
        }
    }
}

/// A real-number literal in configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RealSpec {
    Sqrt { n: u64 },
    Decimal { value: String },
    Ratio { num: i64, den: i64 },
}

impl RealSpec {
    pub fn to_real<T: Real>(&self) -> Result<T, ExperimentError> {
        match self {
            RealSpec::Sqrt { n } => Ok(T::sqrt_nat(*n)),
            RealSpec::Decimal { value } => T::from_decimal(value)
                .ok_or_else(|| ExperimentError::Config(format!("bad decimal {value:?}"))),
            RealSpec::Ratio { num, den } => {
                if *den == 0 {
                    return Err(ExperimentError::Config("zero denominator".into()));
                }
                Ok(T::from_ratio(*num, *den))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSpace {
    Vector,
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternMode {
    Anchor,
    Matrix,
    Starstar,
    Poset,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternParams {
    pub mode: PatternMode,
    #[serde(default)]
    pub a_family: Vec<Vec<Ordinal>>,
    #[serde(default)]
    pub b_family: Vec<Vec<Ordinal>>,
    /// Anchored mode: length of the b-sequence.
    #[serde(default)]
    pub n: Option<usize>,
    /// Diagonal criterion: the cut and the tuple.
    #[serde(default)]
    pub delta: Option<Ordinal>,
    #[serde(default)]
    pub tuple: Vec<Ordinal>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub with_rho_match: bool,
    /// Poset mode: the two finite sets.
    #[serde(default)]
    pub cs: Vec<Ordinal>,
    #[serde(default)]
    pub fs: Vec<Ordinal>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohenParams {
    #[serde(default = "default_channels")]
    pub channels: u32,
    #[serde(flatten)]
    pub action: CohenAction,
}

fn default_channels() -> u32 {
    4
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum CohenAction {
    /// Decided sequence of one ordinal under a stream-prefix condition.
    Decide { prefix_len: u64, alpha: Ordinal },
    /// Decided walk data under a stream-prefix condition.
    Walk {
        prefix_len: u64,
        alpha: Ordinal,
        beta: Ordinal,
    },
    /// Prepare a base condition and run the one-point extension search.
    Claim {
        delta: Ordinal,
        a: Vec<Ordinal>,
        prepare_b: [Ordinal; 4],
        b: [Ordinal; 4],
        i0: usize,
        j0: usize,
        budget: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    Walk {
        alpha: Ordinal,
        beta: Ordinal,
    },
    Osc {
        alpha: Ordinal,
        beta: Ordinal,
    },
    OscMatrix {
        a: Vec<Ordinal>,
        b: Vec<Ordinal>,
    },
    Point {
        space: PointSpace,
        beta: Ordinal,
        alpha: Ordinal,
    },
    Kronecker {
        thetas: Vec<RealSpec>,
        targets: Vec<String>,
        eps: String,
        max_m: u64,
    },
    Covering {
        thetas: Vec<RealSpec>,
        intervals: Vec<[String; 2]>,
        grid: u64,
        max_m: u64,
    },
    PatternSearch(PatternParams),
    Cohen(CohenParams),
    Invariants {
        #[serde(default)]
        scale: InvariantScale,
    },
}

/// A full experiment description; equal configs produce byte-identical
/// reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bound")]
    pub bound: Ordinal,
    #[serde(default = "default_cseq")]
    pub csequence: CSeqSpec,
    #[serde(default)]
    pub theta: ThetaConfig,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

fn default_bound() -> Ordinal {
    "w^3".parse().unwrap()
}

fn default_cseq() -> CSeqSpec {
    CSeqSpec::Canonical
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))
    }
}

/// Builds the C-sequence provider a spec describes.
pub fn resolve_cseq(spec: &CSeqSpec) -> Arc<dyn CSeq> {
    match spec {
        CSeqSpec::Canonical => Arc::new(Canonical),
        CSeqSpec::Jittered { seed } => Arc::new(Jittered::new(*seed)),
        CSeqSpec::Bitstream {
            seed,
            bound,
            channels,
        } => Arc::new(BitstreamCSeq::new(Arc::new(CohenEnv::new(
            *seed,
            bound.clone(),
            *channels,
        )))),
    }
}

macro_rules! with_precision {
    ($prec:expr, $f:ident ( $($arg:expr),* )) => {
        match $prec {
            128 => $f::<Real128>($($arg),*),
            512 => $f::<Real512>($($arg),*),
            _ => $f::<Real256>($($arg),*),
        }
    };
}

/// Result of a run: the canonical JSON report, an optional CSV rendering,
/// and the overall pass flag (meaningful for invariant suites).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

/// Dispatches one experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, ExperimentError> {
    let walker = Walker::new(resolve_cseq(&cfg.csequence));
    let (payload, csv, pass) = match &cfg.kind {
        ExperimentKind::Walk { alpha, beta } => {
            let r = walker.walk(alpha, beta)?;
            // Independent recomputation through a fresh provider.
            let fresh = Walker::new(resolve_cseq(&cfg.csequence));
            let verified = *fresh.walk(alpha, beta)? == *r;
            (
                json!({
                    "walk": &*r,
                    "verified": verified,
                }),
                None,
                verified,
            )
        }
        ExperimentKind::Osc { alpha, beta } => {
            let r = osc(&walker, alpha, beta)?;
            let fresh = Walker::new(resolve_cseq(&cfg.csequence));
            let verified = osc(&fresh, alpha, beta)? == r;
            (json!({"osc": r, "verified": verified}), None, verified)
        }
        ExperimentKind::OscMatrix { a, b } => run_osc_matrix(&walker, a, b)?,
        ExperimentKind::Point { space, beta, alpha } => {
            with_precision!(cfg.theta.precision, run_point_typed(cfg, *space, beta, alpha))?
        }
        ExperimentKind::Kronecker {
            thetas,
            targets,
            eps,
            max_m,
        } => with_precision!(
            cfg.theta.precision,
            run_kronecker_typed(thetas, targets, eps, *max_m)
        )?,
        ExperimentKind::Covering {
            thetas,
            intervals,
            grid,
            max_m,
        } => with_precision!(
            cfg.theta.precision,
            run_covering_typed(thetas, intervals, *grid, *max_m)
        )?,
        ExperimentKind::PatternSearch(params) => run_pattern(cfg, &walker, params)?,
        ExperimentKind::Cohen(params) => run_cohen(cfg, params)?,
        ExperimentKind::Invariants { scale } => {
            let suites = run_all(cfg.seed, scale);
            let pass = suites.iter().all(|s| s.pass);
            (render_suites(&suites), Some(suites_csv(&suites)), pass)
        }
    };
    let report = json!({
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "result": payload,
    });
    Ok(RunOutcome { report, csv, pass })
}

type KindOutcome = (Value, Option<String>, bool);

fn render_suites(suites: &[SuiteResult]) -> Value {
    json!({
        "suites": suites,
        "pass": suites.iter().all(|s| s.pass),
    })
}

fn suites_csv(suites: &[SuiteResult]) -> String {
    let mut out = String::from("suite,samples,failures,pass,detail\n");
    for s in suites {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.name,
            s.samples,
            s.failures,
            s.pass,
            s.detail.replace(',', ";")
        ));
    }
    out
}

fn run_osc_matrix(
    walker: &Walker,
    a: &[Ordinal],
    b: &[Ordinal],
) -> Result<KindOutcome, ExperimentError> {
    let mut rows = Vec::new();
    let mut csv = String::from("alpha\\beta");
    for beta in b {
        csv.push_str(&format!(",{beta}"));
    }
    csv.push('\n');
    for alpha in a {
        let mut row = Vec::new();
        csv.push_str(&alpha.to_string());
        for beta in b {
            let cell = if alpha < beta {
                let c = osc(walker, alpha, beta)?.count;
                csv.push_str(&format!(",{c}"));
                Value::from(c)
            } else {
                csv.push(',');
                Value::Null
            };
            row.push(cell);
        }
        csv.push('\n');
        rows.push(json!({"alpha": alpha, "counts": row}));
    }
    Ok((json!({"rows": rows, "verified": true}), Some(csv), true))
}

fn decimal_digits(precision: u32) -> usize {
    (precision as f64 * 0.301) as usize
}

fn run_point_typed<T: Real>(
    cfg: &ExperimentConfig,
    space: PointSpace,
    beta: &Ordinal,
    alpha: &Ordinal,
) -> Result<KindOutcome, ExperimentError> {
    let digits = decimal_digits(cfg.theta.precision);
    let eval = |walker: &Walker, fam: &ThetaFamily<T>| -> Result<PointValue<T>, PointError> {
        match space {
            PointSpace::Vector => w_point(fam, walker, beta, alpha),
            PointSpace::Field => {
                let g = PiecewiseG::standard();
                v_point(fam, &g, walker, beta, alpha)
            }
        }
    };
    let walker = Walker::new(resolve_cseq(&cfg.csequence));
    let fam: ThetaFamily<T> = theta_family(&cfg.theta);
    let pv = eval(&walker, &fam)?;
    // Independent recomputation with fresh state.
    let walker2 = Walker::new(resolve_cseq(&cfg.csequence));
    let fam2: ThetaFamily<T> = theta_family(&cfg.theta);
    let pv2 = eval(&walker2, &fam2)?;
    let verified = pv.value.re == pv2.value.re && pv.value.im == pv2.value.im;
    Ok((
        json!({
            "case": pv.case,
            "re": pv.value.re.to_decimal(digits),
            "im": pv.value.im.to_decimal(digits),
            "verified": verified,
        }),
        None,
        verified,
    ))
}

pub fn theta_family<T: Real>(cfg: &ThetaConfig) -> ThetaFamily<T> {
    ThetaFamily::new(cfg.mode.clone(), cfg.pairs)
}

fn run_kronecker_typed<T: Real>(
    thetas: &[RealSpec],
    targets: &[String],
    eps: &str,
    max_m: u64,
) -> Result<KindOutcome, ExperimentError> {
    let th: Vec<T> = thetas
        .iter()
        .map(|s| s.to_real())
        .collect::<Result<_, _>>()?;
    let tg: Vec<T> = targets
        .iter()
        .map(|s| {
            T::from_decimal(s).ok_or_else(|| ExperimentError::Config(format!("bad decimal {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if th.len() != tg.len() {
        return Err(ExperimentError::Config(
            "thetas and targets must have equal length".into(),
        ));
    }
    let e = T::from_decimal(eps)
        .ok_or_else(|| ExperimentError::Config(format!("bad decimal {eps:?}")))?;
    match kronecker_search(&th, &tg, &e, max_m) {
        Some(m) => {
            let verified = verify_kronecker_hit(&th, &tg, &e, m);
            Ok((
                json!({"found": m, "verified": verified}),
                None,
                verified,
            ))
        }
        None => Ok((json!({"found": Value::Null, "verified": true}), None, true)),
    }
}

fn run_covering_typed<T: Real>(
    thetas: &[RealSpec],
    intervals: &[[String; 2]],
    grid: u64,
    max_m: u64,
) -> Result<KindOutcome, ExperimentError> {
    let th: Vec<T> = thetas
        .iter()
        .map(|s| s.to_real())
        .collect::<Result<_, _>>()?;
    let iv: Vec<(T, T)> = intervals
        .iter()
        .map(|[a, b]| {
            let lo = T::from_decimal(a)
                .ok_or_else(|| ExperimentError::Config(format!("bad decimal {a:?}")))?;
            let hi = T::from_decimal(b)
                .ok_or_else(|| ExperimentError::Config(format!("bad decimal {b:?}")))?;
            Ok((lo, hi))
        })
        .collect::<Result<_, ExperimentError>>()?;
    if th.len() != iv.len() {
        return Err(ExperimentError::Config(
            "thetas and intervals must have equal length".into(),
        ));
    }
    match covering_bound(&th, &iv, grid, max_m) {
        Some(m) => {
            let verified = verify_covering(&th, &iv, grid, m);
            Ok((json!({"found": m, "verified": verified}), None, verified))
        }
        None => Ok((json!({"found": Value::Null, "verified": true}), None, true)),
    }
}

fn run_pattern(
    cfg: &ExperimentConfig,
    walker: &Walker,
    params: &PatternParams,
) -> Result<KindOutcome, ExperimentError> {
    let budget = cfg.budgets.pair_probes;
    match params.mode {
        PatternMode::Anchor => {
            let fam_a = Family::new(params.a_family.clone())?;
            let fam_b = Family::new(params.b_family.clone())?;
            let n = params.n.unwrap_or(1);
            let witnesses = scan_anchor_pattern(walker, &fam_a, &fam_b, n, budget)?;
            Ok((
                json!({
                    "witnesses": witnesses,
                    "stats": {"count": witnesses.len(), "budget": budget},
                    "verified": true,
                }),
                None,
                true,
            ))
        }
        PatternMode::Matrix => {
            let fam_a = Family::new(params.a_family.clone())?;
            let fam_b = Family::new(params.b_family.clone())?;
            let find = scan_matrix_pattern(walker, &fam_a, &fam_b, budget)?;
            // A delta-system digest of the inputs rides along, the way the
            // uncountable arguments prune to sunflowers first.
            let (root_a, sub_a) = delta_system(&fam_a);
            let (root_b, sub_b) = delta_system(&fam_b);
            Ok((
                json!({
                    "witnesses": find,
                    "delta_systems": {
                        "a": {"root": root_a, "size": sub_a.len()},
                        "b": {"root": root_b, "size": sub_b.len()},
                    },
                    "stats": {"budget": budget},
                    "verified": true,
                }),
                None,
                true,
            ))
        }
        PatternMode::Starstar => {
            let delta = params
                .delta
                .clone()
                .ok_or_else(|| ExperimentError::Config("starstar requires delta".into()))?;
            let rows = params
                .matrix
                .clone()
                .ok_or_else(|| ExperimentError::Config("starstar requires matrix".into()))?;
            let k = rows.len();
            let entries: Vec<i64> = rows.into_iter().flatten().collect();
            let c = PatternMatrix::new(k, entries.len() / k.max(1), entries)?;
            let holds = starstar_criterion(walker, &delta, &params.tuple, &c, params.with_rho_match)?;
            // Independent double computation.
            let fresh = Walker::new(resolve_cseq(&cfg.csequence));
            let verified =
                starstar_criterion(&fresh, &delta, &params.tuple, &c, params.with_rho_match)?
                    == holds;
            Ok((
                json!({"holds": holds, "verified": verified}),
                None,
                verified,
            ))
        }
        PatternMode::Poset => {
            let valid = poset_condition_valid(walker, &params.cs, &params.fs)?;
            let violation = poset_first_violation(walker, &params.cs, &params.fs)?;
            let fresh = Walker::new(resolve_cseq(&cfg.csequence));
            let verified = poset_condition_valid(&fresh, &params.cs, &params.fs)? == valid;
            Ok((
                json!({
                    "valid": valid,
                    "violation": violation.map(|(e, a, b)| json!({"eta": e, "alpha": a, "beta": b})),
                    "verified": verified,
                }),
                None,
                verified,
            ))
        }
    }
}

fn run_cohen(cfg: &ExperimentConfig, params: &CohenParams) -> Result<KindOutcome, ExperimentError> {
    let env = CohenEnv::new(cfg.seed, cfg.bound.clone(), params.channels);
    match &params.action {
        CohenAction::Decide { prefix_len, alpha } => {
            let p = FinCondition::stream_prefix(&env.stream(), *prefix_len);
            let seq = env.cp_seq(&p, alpha)?;
            let verified = env.cp_seq(&p, alpha)? == seq;
            Ok((
                json!({
                    "decided": seq,
                    "snapshot": env.snapshot(),
                    "prefix_len": prefix_len,
                    "verified": verified,
                }),
                None,
                verified,
            ))
        }
        CohenAction::Walk {
            prefix_len,
            alpha,
            beta,
        } => {
            let p = FinCondition::stream_prefix(&env.stream(), *prefix_len);
            let dw = env.decided_walk(&p, alpha, beta)?;
            let verified = env.decided_walk(&p, alpha, beta)? == dw;
            Ok((
                json!({
                    "decided_walk": dw,
                    "reached": dw.reached(alpha),
                    "snapshot": env.snapshot(),
                    "verified": verified,
                }),
                None,
                verified,
            ))
        }
        CohenAction::Claim {
            delta,
            a,
            prepare_b,
            b,
            i0,
            j0,
            budget,
        } => {
            let p0 = FinCondition::empty();
            let prepared = match claim_prepare(&env, &p0, delta, a, prepare_b, *budget)? {
                ClaimSearchOutcome::Found { q } => q,
                ClaimSearchOutcome::Starved { stage } => {
                    return Ok((
                        json!({"outcome": "starved", "stage": stage, "verified": true}),
                        None,
                        false,
                    ))
                }
            };
            let inst = ClaimInstance {
                delta: delta.clone(),
                a: a.clone(),
                b: b.clone(),
                i0: *i0,
                j0: *j0,
            };
            match claim_search(&env, &prepared, &inst, *budget)? {
                ClaimSearchOutcome::Found { q } => {
                    let report = claim_verify(&env, &q, &prepared, &inst)?;
                    Ok((
                        json!({
                            "outcome": "found",
                            "condition_dom": q.len(),
                            "condition_ones": q.ones().collect::<Vec<_>>(),
                            "checks": report.checks,
                            "verified": report.ok,
                            "snapshot": env.snapshot(),
                        }),
                        None,
                        report.ok,
                    ))
                }
                ClaimSearchOutcome::Starved { stage } => Ok((
                    json!({"outcome": "starved", "stage": stage, "verified": true}),
                    None,
                    false,
                )),
            }
        }
    }
}

