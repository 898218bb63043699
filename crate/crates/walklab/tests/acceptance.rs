//! Acceptance suite: every criterion runs at its stated scale and
//! tolerance and prints one pass/fail line. Timed criteria assert their
//! wall-clock limits, which is why the workspace test profile is
//! optimized.

use std::time::Instant;

use walklab::cohen::{
    claim_prepare, claim_search, claim_verify, ClaimInstance, ClaimSearchOutcome, CohenEnv,
    FinCondition,
};
use walklab::config::{run_experiment, ExperimentConfig, ExperimentKind, ThetaConfig};
use walklab::invariants::{
    suite_cohen_decided_coherence, suite_cohen_extension_monotone, suite_eventual_coherence,
    suite_kronecker_fixture, suite_osc_bound_and_oracle, suite_point_functions,
    suite_poset_agreement, suite_scanners_vs_oracle, suite_trace_identity,
    suite_walk_base_cases, InvariantScale,
};
use walklab::{CSeqSpec, Ordinal};

const SEED: u64 = 20260808;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

#[test]
fn criterion_01_walk_base_cases() {
    let t = Instant::now();
    let r = suite_walk_base_cases(SEED, 500);
    let elapsed = t.elapsed();
    let within = elapsed.as_secs_f64() < 1.0;
    report(
        "1 walk base cases",
        r.pass && within,
        &format!("{} samples, {} failures, {elapsed:?} (< 1 s)", r.samples, r.failures),
    );
}

#[test]
fn criterion_02_trace_identity() {
    let t = Instant::now();
    // 10^4 sampled triples per spec variant, canonical and jittered.
    let r = suite_trace_identity(SEED, 10_000, SEED ^ 0x7177);
    let elapsed = t.elapsed();
    let within = elapsed.as_secs_f64() < 30.0;
    report(
        "2 trace coherence identity",
        r.pass && within,
        &format!(
            "{} triples sampled, {} failures, {}, {elapsed:?} (< 30 s)",
            r.samples, r.failures, r.detail
        ),
    );
}

#[test]
fn criterion_03_eventual_coherence() {
    let r = suite_eventual_coherence(SEED, 200, 64, 256, SEED ^ 0x7177);
    report(
        "3 eventual coherence",
        r.pass,
        &format!(
            "{} pairs (canonical + jittered), {} failures, {}",
            r.samples, r.failures, r.detail
        ),
    );
}

#[test]
fn criterion_04_osc_bound_and_oracle() {
    let r = suite_osc_bound_and_oracle(SEED, 500, 100_000);
    report(
        "4 oscillation bound and oracle",
        r.pass,
        &format!("{} checks, {} failures", r.samples, r.failures),
    );
}

#[test]
fn criterion_05_kronecker() {
    let r = suite_kronecker_fixture(100_000, 10_000);
    report(
        "5 kronecker search",
        r.pass,
        &format!("{} fixtures, {} failures, {}", r.samples, r.failures, r.detail),
    );
}

#[test]
fn criterion_06_point_functions() {
    let r = suite_point_functions(SEED, 1_000, 1_000, 10_000);
    report(
        "6 point functions",
        r.pass,
        &format!(
            "{} checks (tags, breakpoints, f-grid), {} failures, {}",
            r.samples, r.failures, r.detail
        ),
    );
}

#[test]
fn criterion_07_scanners_vs_oracle() {
    let t = Instant::now();
    let r = suite_scanners_vs_oracle(SEED);
    let elapsed = t.elapsed();
    let within = elapsed.as_secs_f64() < 10.0;
    report(
        "7 pattern scanners vs oracle",
        r.pass && within,
        &format!(
            "{} comparisons, {} failures, {}, {elapsed:?} (< 10 s)",
            r.samples, r.failures, r.detail
        ),
    );
}

#[test]
fn criterion_08_cohen_machinery() {
    let t = Instant::now();
    // (a) extension monotonicity on 10^4 random (p, q, alpha).
    let ra = suite_cohen_extension_monotone(SEED, 10_000);
    // (b) decided-equals-true coherence on 10^3 reached samples.
    let rb = suite_cohen_decided_coherence(SEED, 1_000);
    // (c) the one-point extension on the documented seed environment.
    let env = CohenEnv::new(1234, "w^4".parse().unwrap(), 4);
    let delta: Ordinal = "w^2".parse().unwrap();
    let a: Vec<Ordinal> = vec!["w^2*10".parse().unwrap(), "w^2*11".parse().unwrap()];
    let b_prep: [Ordinal; 4] = [
        "w^2*6".parse().unwrap(),
        "w^2*7".parse().unwrap(),
        "w^2*8".parse().unwrap(),
        "w^2*9".parse().unwrap(),
    ];
    let b_claim: [Ordinal; 4] = [
        "w^2*2".parse().unwrap(),
        "w^2*3".parse().unwrap(),
        "w^2*4".parse().unwrap(),
        "w^2*5".parse().unwrap(),
    ];
    let prepared = match claim_prepare(&env, &FinCondition::empty(), &delta, &a, &b_prep, 5_000_000)
        .unwrap()
    {
        ClaimSearchOutcome::Found { q } => q,
        ClaimSearchOutcome::Starved { stage } => panic!("prepare starved: {stage}"),
    };
    let inst = ClaimInstance {
        delta,
        a,
        b: b_claim,
        i0: 1,
        j0: 0,
    };
    let (found, verified) = match claim_search(&env, &prepared, &inst, 5_000_000).unwrap() {
        ClaimSearchOutcome::Found { q } => {
            let rep = claim_verify(&env, &q, &prepared, &inst).unwrap();
            (true, rep.ok)
        }
        ClaimSearchOutcome::Starved { .. } => (false, false),
    };
    let elapsed = t.elapsed();
    let within = elapsed.as_secs_f64() < 60.0;
    report(
        "8 cohen machinery",
        ra.pass && rb.pass && found && verified && within,
        &format!(
            "monotone {}({} fails), coherence {}({} fails), claim found={found} verified={verified}, {elapsed:?} (< 60 s)",
            ra.samples, ra.failures, rb.samples, rb.failures
        ),
    );
}

#[test]
fn criterion_09_poset_agreement() {
    let r = suite_poset_agreement(SEED, 10_000, 1_000);
    report(
        "9 poset membership",
        r.pass,
        &format!("{} checks, {} failures", r.samples, r.failures),
    );
}

#[test]
fn criterion_10_determinism() {
    let cfg = ExperimentConfig {
        seed: SEED,
        bound: "w^3".parse().unwrap(),
        csequence: CSeqSpec::Canonical,
        theta: ThetaConfig::default(),
        budgets: Default::default(),
        kind: ExperimentKind::Invariants {
            scale: InvariantScale::default(),
        },
    };
    let first = run_experiment(&cfg).unwrap();
    let second = run_experiment(&cfg).unwrap();
    let b1 = serde_json::to_vec_pretty(&first.report).unwrap();
    let b2 = serde_json::to_vec_pretty(&second.report).unwrap();
    let identical = b1 == b2;
    report(
        "10 determinism",
        identical && first.pass && second.pass,
        &format!(
            "two runs, {} bytes each, byte-identical: {identical}, suites pass: {}",
            b1.len(),
            first.pass
        ),
    );
}
