use std::sync::Arc;

use super::*;
use crate::cseq::CSeq;
use crate::walks::Walker;

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn small_env() -> CohenEnv {
    CohenEnv::new(42, ord("w^3"), 4)
}

#[test]
fn condition_basics() {
    let p = FinCondition::from_bits(&[true, false, true]);
    assert_eq!(p.len(), 3);
    assert_eq!(p.bit(0), Some(true));
    assert_eq!(p.bit(1), Some(false));
    assert_eq!(p.bit(3), None);
    let q = p.extend_with(&[5], 0).unwrap();
    assert!(q.extends(&p));
    assert!(!p.extends(&q));
    assert_eq!(q.len(), 6);
    // Setting a bit inside the old domain is not an extension.
    assert!(p.extend_with(&[1], 0).is_err());
    assert_eq!(format!("{p}"), "101");
}

#[test]
fn channels_and_rows() {
    let env = small_env();
    // Channel cycles with the last coefficient.
    assert_eq!(env.channel(&ord("w")), 0);
    assert_eq!(env.channel(&ord("w*2")), 1);
    assert_eq!(env.channel(&ord("w*5")), 0);
    assert_eq!(env.channel(&ord("w^2*3")), 2);
    // Row minimum clears the channel index for sampled limits.
    for a in ["w", "w*2", "w*7", "w^2", "w^2*3+w*4"] {
        let a = ord(a);
        assert!(env.a_min(&a) > env.channel(&a) as u64);
    }
    // Position coding round-trips.
    for row in [1u64, 5, 40] {
        for m in [0u64, 1, 7, 30] {
            let pos = CohenEnv::row_member(row, m);
            assert_eq!(CohenEnv::decode_pos(pos), (row, m));
        }
    }
}

#[test]
fn pi_is_injective_and_covers() {
    let env = small_env();
    let alpha = ord("w^2");
    let mut seen = std::collections::HashSet::new();
    for m in 0..200u64 {
        let v = env.pi_value(&alpha, m).unwrap();
        assert!(v < alpha);
        assert!(seen.insert(v.clone()), "pi repeated {v}");
        assert_eq!(env.pi_index_of(&alpha, &v), Some(m));
    }
    // Surjectivity onto small ordinals within a short prefix.
    for n in 0..20u64 {
        assert!(seen.contains(&Ordinal::from_nat(n)), "missing {n}");
    }
}

#[test]
fn plants_satisfy_witness_inequality() {
    let env = small_env();
    let alpha = ord("w^2*4");
    for m in 0..400u64 {
        let _ = env.pi_value(&alpha, m).unwrap();
    }
    let plants = env.plants_snapshot(&alpha);
    assert!(!plants.is_empty(), "no plants after 400 steps");
    for p in &plants {
        assert!(p.value < p.des);
        assert!(p.value.is_limit());
        // The witness inequality: position below the witness row minimum.
        assert!(env.a_min(&p.value) > p.pos);
    }
    // Witness values for a fixed designated target grow: the unbounded
    // clause sampled on the prefix.
    let des = ord("w^2");
    let for_des: Vec<&Plant> = plants.iter().filter(|p| p.des == des).collect();
    for w in for_des.windows(2) {
        assert!(w[0].value < w[1].value);
    }
}

#[test]
fn cp_seq_successor_and_zero_condition() {
    let env = small_env();
    let p = FinCondition::empty();
    let a = ord("w*3+2");
    assert_eq!(env.cp_seq(&p, &a.successor()).unwrap(), vec![a]);
    // All-zero conditions decide nothing at limits.
    let zeros = FinCondition::from_bits(&[false; 64]);
    for alpha in ["w", "w*2", "w^2", "w^2*3+w"] {
        assert!(env.cp_seq(&zeros, &ord(alpha)).unwrap().is_empty());
    }
}

#[test]
fn cp_seq_extension_monotone() {
    let env = small_env();
    let stream = crate::rng::BitStream::new(7);
    let mut rng = crate::rng::SplitMix::new(3);
    for _ in 0..200 {
        let len_p = rng.below(300);
        let len_q = len_p + rng.below(300);
        let p = FinCondition::stream_prefix(&stream, len_p);
        let q = FinCondition::stream_prefix(&stream, len_q);
        assert!(q.extends(&p));
        for alpha in ["w", "w*4", "w^2", "w^2*2+w*3"] {
            let alpha = ord(alpha);
            let cp = env.cp_seq(&p, &alpha).unwrap();
            let cq = env.cp_seq(&q, &alpha).unwrap();
            assert!(
                cq.len() >= cp.len() && cq[..cp.len()] == cp[..],
                "cp_seq not an initial segment at {alpha}: {cp:?} vs {cq:?}"
            );
        }
    }
}

#[test]
fn stream_cseq_is_deterministic_and_increasing() {
    let env1 = CohenEnv::new(99, ord("w^3"), 4);
    let env2 = CohenEnv::new(99, ord("w^3"), 4);
    for alpha in ["w", "w^2", "w^2*2"] {
        let alpha = ord(alpha);
        let s1: Vec<Ordinal> = (0..10).map(|n| env1.stream_cseq(&alpha, n).unwrap()).collect();
        let s2: Vec<Ordinal> = (0..10).map(|n| env2.stream_cseq(&alpha, n).unwrap()).collect();
        assert_eq!(s1, s2);
        for w in s1.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(s1.iter().all(|x| x < &alpha));
    }
}

#[test]
fn prefix_decides_initial_segment_of_stream() {
    let env = small_env();
    let stream = env.stream();
    for alpha in ["w", "w^2", "w^2*3"] {
        let alpha = ord(alpha);
        let full: Vec<Ordinal> = (0..6).map(|n| env.stream_cseq(&alpha, n).unwrap()).collect();
        let p = FinCondition::stream_prefix(&stream, 5000);
        let decided = env.cp_seq(&p, &alpha).unwrap();
        assert!(
            !decided.is_empty(),
            "prefix of length 5000 decided nothing at {alpha}"
        );
        let n = decided.len().min(full.len());
        assert_eq!(decided[..n], full[..n], "prefix disagrees with stream at {alpha}");
    }
}

#[test]
fn fp_set_examples() {
    let env = small_env();
    let zeros = FinCondition::from_bits(&[false; 32]);
    let alpha = ord("w^2");
    // All-zero condition: F at a limit is the singleton.
    let f = env.fp_set(&zeros, &alpha).unwrap();
    assert_eq!(f.len(), 1);
    assert!(f.contains(&alpha));
    // Successor: {alpha+1} together with the closure of alpha.
    let f1 = env.fp_set(&zeros, &alpha.successor()).unwrap();
    assert!(f1.contains(&alpha.successor()) && f1.contains(&alpha));
    // Random conditions: finite (termination) on sampled ordinals.
    let stream = crate::rng::BitStream::new(17);
    let p = FinCondition::stream_prefix(&stream, 2000);
    for a in ["w*5+3", "w^2*2+w", "w^2*3"] {
        let f = env.fp_set(&p, &ord(a)).unwrap();
        assert!(!f.is_empty() && f.len() < 10_000);
        assert!(f.contains(&ord(a)));
    }
}

#[test]
fn decided_walk_base_cases() {
    let env = small_env();
    let p = FinCondition::stream_prefix(&env.stream(), 512);
    for a in ["0", "5", "w*2", "w^2"] {
        let a = ord(a);
        let dw = env.decided_walk(&p, &a, &a).unwrap();
        assert_eq!(dw.trace, vec![a.clone()]);
        assert!(dw.lower.is_empty());
        assert_eq!(dw.rho1, 0);
    }
    // All-zero condition at a limit target: trace stops immediately.
    let zeros = FinCondition::from_bits(&[false; 16]);
    let dw = env.decided_walk(&zeros, &ord("w"), &ord("w^2")).unwrap();
    assert_eq!(dw.trace, vec![ord("w^2")]);
    assert!(dw.lower.is_empty());
}

#[test]
fn decided_agrees_with_full_stream_when_reached() {
    // Fact-style stability: whenever the prefix-decided walk reaches its
    // target, the full-stream walk computes the same report, and so does
    // any extension of the prefix.
    let env = Arc::new(small_env());
    let provider = Arc::new(BitstreamCSeq::new(Arc::clone(&env)));
    let walker = Walker::new(provider.clone() as Arc<dyn CSeq>);
    let p = FinCondition::stream_prefix(&env.stream(), 20_000);
    let mut rng = crate::rng::SplitMix::new(5);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 40 && attempts < 4000 {
        attempts += 1;
        let c2 = rng.below(3);
        let c1 = rng.below(4);
        let c0 = rng.below(5);
        let mut terms = Vec::new();
        if c2 > 0 {
            terms.push((2u32, c2));
        }
        if c1 > 0 {
            terms.push((1u32, c1));
        }
        if c0 > 0 {
            terms.push((0u32, c0));
        }
        let beta = Ordinal::from_terms(terms).unwrap();
        let alpha = Ordinal::from_nat(rng.below(20));
        if alpha > beta {
            continue;
        }
        let dw = env.decided_walk(&p, &alpha, &beta).unwrap();
        if !dw.reached(&alpha) {
            continue;
        }
        checked += 1;
        let true_walk = walker.walk(&alpha, &beta).unwrap();
        assert_eq!(dw.trace, true_walk.upper, "trace mismatch at ({alpha},{beta})");
        assert_eq!(dw.lower, true_walk.lower, "lower mismatch at ({alpha},{beta})");
        assert_eq!(dw.rho1, true_walk.rho1, "rho1 mismatch at ({alpha},{beta})");
        // Extensions leave the decided objects unchanged.
        let q = FinCondition::stream_prefix(&env.stream(), 40_000);
        let dq = env.decided_walk(&q, &alpha, &beta).unwrap();
        assert_eq!(dq, dw);
    }
    assert!(checked >= 20, "only {checked} decided walks reached their target");
}

#[test]
fn claim_instance_validation() {
    let env = small_env();
    let inst = ClaimInstance {
        delta: ord("w^2"),
        a: vec![ord("w^2*10"), ord("w^2*11")],
        b: [ord("w^2*2"), ord("w^2*3"), ord("w^2*4"), ord("w^2*5")],
        i0: 0,
        j0: 0,
    };
    // i0 = j0 is a precondition violation.
    assert!(matches!(
        claim_verify(&env, &FinCondition::empty(), &FinCondition::empty(), &inst),
        Err(CohenError::InvalidInstance(_))
    ));
}

#[test]
fn claim_q_equal_p_fails_proper_extension() {
    let env = small_env();
    let inst = ClaimInstance {
        delta: ord("w^2"),
        a: vec![ord("w^2*10"), ord("w^2*11")],
        b: [ord("w^2*2"), ord("w^2*3"), ord("w^2*4"), ord("w^2*5")],
        i0: 0,
        j0: 1,
    };
    let p = FinCondition::empty();
    let report = claim_verify(&env, &p, &p, &inst).unwrap();
    assert!(!report.ok);
    let c3 = report
        .checks
        .iter()
        .find(|c| c.name.starts_with("(3)"))
        .unwrap();
    assert!(!c3.ok, "q = p' must fail the proper-extension requirement");
}

#[test]
fn claim_starves_without_designated_room() {
    // Bound w*4 hosts no limit-of-limits at all, so any instance must be
    // rejected with a diagnostic rather than an error.
    let env = CohenEnv::new(1, ord("w*4"), 2);
    let inst = ClaimInstance {
        delta: ord("w"),
        a: vec![ord("w*2"), ord("w*3")],
        b: [ord("w"), ord("w*2"), ord("w*2+1"), ord("w*3")],
        i0: 0,
        j0: 1,
    };
    match claim_search(&env, &FinCondition::empty(), &inst, 10_000).unwrap() {
        ClaimSearchOutcome::Starved { stage } => {
            assert!(stage.contains("designated"), "diagnostic was: {stage}");
        }
        ClaimSearchOutcome::Found { .. } => panic!("cannot succeed below w^2"),
    }
}

#[test]
fn claim_prepare_then_search_roundtrip() {
    let env = CohenEnv::new(1234, ord("w^3"), 4);
    let delta = ord("w^2");
    let a = vec![ord("w^2*10"), ord("w^2*11")];
    let b_prep = [ord("w^2*6"), ord("w^2*7"), ord("w^2*8"), ord("w^2*9")];
    let b_claim = [ord("w^2*2"), ord("w^2*3"), ord("w^2*4"), ord("w^2*5")];
    let p0 = FinCondition::empty();
    let prepared = match claim_prepare(&env, &p0, &delta, &a, &b_prep, 3_000_000).unwrap() {
        ClaimSearchOutcome::Found { q } => q,
        ClaimSearchOutcome::Starved { stage } => panic!("prepare starved: {stage}"),
    };
    let inst = ClaimInstance {
        delta: delta.clone(),
        a: a.clone(),
        b: b_claim,
        i0: 1,
        j0: 0,
    };
    let q = match claim_search(&env, &prepared, &inst, 3_000_000).unwrap() {
        ClaimSearchOutcome::Found { q } => q,
        ClaimSearchOutcome::Starved { stage } => panic!("search starved: {stage}"),
    };
    let report = claim_verify(&env, &q, &prepared, &inst).unwrap();
    assert!(report.ok, "verification failed: {:?}", report.checks);
}
