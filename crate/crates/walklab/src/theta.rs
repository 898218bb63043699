//! Indexed real families and Kronecker approximation searches.
//!
//! A [`ThetaFamily`] hands out one high-precision real per ordinal (and
//! optionally a paired second real). The `sqrt_primes` mode assigns square
//! roots of distinct primes in order of first use, giving a rationally
//! independent family; the seeded mode draws reproducible generic reals for
//! the field-side checks, where algebraic independence is not certifiable
//! at finite precision but generic values satisfy the spot checks.
//!
//! The searches scan integer multiples modulo 1. Any hit is re-verified by
//! an independent recomputation before it is reported, with all interval
//! memberships shrunk by the scalar's pad.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::real::{dist_mod1, Real};
use crate::rng::prf;

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("theta_prime requires a family constructed with pairs")]
    PairsRequired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThetaMode {
    SqrtPrimes,
    SeededRandom { seed: u64 },
}

struct ThetaState<T> {
    slots: HashMap<Ordinal, u64>,
    next_slot: u64,
    values: HashMap<(u64, bool), T>,
}

/// Reproducible family of reals indexed by ordinals.
pub struct ThetaFamily<T: Real> {
    mode: ThetaMode,
    pairs: bool,
    state: Mutex<ThetaState<T>>,
}

impl<T: Real> ThetaFamily<T> {
    pub fn new(mode: ThetaMode, pairs: bool) -> Self {
        ThetaFamily {
            mode,
            pairs,
            state: Mutex::new(ThetaState {
                slots: HashMap::new(),
                next_slot: 0,
                values: HashMap::new(),
            }),
        }
    }

    pub fn sqrt_primes(pairs: bool) -> Self {
        Self::new(ThetaMode::SqrtPrimes, pairs)
    }

    pub fn seeded(seed: u64, pairs: bool) -> Self {
        Self::new(ThetaMode::SeededRandom { seed }, pairs)
    }

    pub fn mode(&self) -> &ThetaMode {
        &self.mode
    }

    pub fn has_pairs(&self) -> bool {
        self.pairs
    }

    fn slot(&self, alpha: &Ordinal, state: &mut ThetaState<T>) -> u64 {
        if let Some(&s) = state.slots.get(alpha) {
            return s;
        }
        let s = state.next_slot;
        state.next_slot += 1;
        state.slots.insert(alpha.clone(), s);
        s
    }

    fn value(&self, alpha: &Ordinal, primed: bool) -> T {
        let mut state = self.state.lock().unwrap();
        let slot = self.slot(alpha, &mut state);
        if let Some(v) = state.values.get(&(slot, primed)) {
            return v.clone();
        }
        let v = match &self.mode {
            ThetaMode::SqrtPrimes => {
                // Slot s uses primes 2s (theta) and 2s+1 (theta'): all
                // distinct squarefree naturals, hence rationally
                // independent square roots.
                let idx = 2 * slot + if primed { 1 } else { 0 };
                T::sqrt_nat(nth_prime(idx))
            }
            ThetaMode::SeededRandom { seed } => {
                let code = alpha.code();
                let mut num = BigInt::ZERO;
                for limb in 0..RANDOM_LIMBS {
                    let w = prf(
                        *seed,
                        &[code as u64, (code >> 64) as u64, primed as u64, limb],
                    );
                    num = (num << 64u32) | BigInt::from(w);
                }
                // Value in [1, 2): keeps theta' strictly positive and away
                // from 0 mod nothing.
                let den = BigInt::one() << (64 * RANDOM_LIMBS as u32);
                T::from_big_ratio(&(&num + &den), &den)
            }
        };
        state.values.insert((slot, primed), v.clone());
        v
    }

    pub fn theta(&self, alpha: &Ordinal) -> T {
        self.value(alpha, false)
    }

    pub fn theta_prime(&self, alpha: &Ordinal) -> Result<T, ThetaError> {
        if !self.pairs {
            return Err(ThetaError::PairsRequired);
        }
        Ok(self.value(alpha, true))
    }
}

const RANDOM_LIMBS: u64 = 10;

/// The `k`-th prime (0-indexed: 2, 3, 5, ...), by trial division; desk
/// scale only needs the first few hundred.
pub fn nth_prime(k: u64) -> u64 {
    let mut found = 0;
    let mut n = 1u64;
    loop {
        n += 1;
        if is_prime(n) {
            if found == k {
                return n;
            }
            found += 1;
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exhaustive Kronecker search: least `m <= max_m` such that
/// `dist(frac(theta_i * m), target_i mod 1) < eps` for every `i`, scanning
/// from `m = 0`. Any candidate is re-verified by [`verify_kronecker_hit`]
/// (an independent, non-incremental recomputation) before being returned;
/// `None` is a legitimate outcome for dependent inputs.
pub fn kronecker_search<T: Real>(
    thetas: &[T],
    targets: &[T],
    eps: &T,
    max_m: u64,
) -> Option<u64> {
    assert_eq!(thetas.len(), targets.len());
    let fracs: Vec<T> = thetas.iter().map(|t| t.fract()).collect();
    let targets: Vec<T> = targets.iter().map(|t| t.fract()).collect();
    let mut cur: Vec<T> = thetas.iter().map(|_| T::zero()).collect();
    let threshold = eps.clone() - T::pad();
    for m in 0..=max_m {
        if m > 0 {
            for (c, f) in cur.iter_mut().zip(&fracs) {
                let mut next = c.clone() + f.clone();
                if next >= T::one() {
                    next = next - T::one();
                }
                *c = next;
            }
        }
        let ok = cur
            .iter()
            .zip(&targets)
            .all(|(c, t)| dist_mod1(c, t) < threshold);
        if ok && verify_kronecker_hit(thetas, &targets, eps, m) {
            return Some(m);
        }
    }
    None
}

/// Independent verification of a Kronecker hit: recomputes each
/// `frac(theta_i * m)` from scratch and applies the padded test.
pub fn verify_kronecker_hit<T: Real>(thetas: &[T], targets: &[T], eps: &T, m: u64) -> bool {
    let threshold = eps.clone() - T::pad();
    thetas.iter().zip(targets).all(|(th, t)| {
        let v = th.mul_nat(m).fract();
        dist_mod1(&v, &t.fract()) < threshold
    })
}

/// Uniform covering bound: least `m <= max_m` such that every
/// `t in [0,1]^k` admits some `m' < m` with `frac(theta_i * m' + t_i)` in
/// the `i`-th open interval for all `i`.
///
/// The check runs over a grid of `grid^k` cells of width `1/grid`; a cell
/// is covered by `m'` only if the whole shifted cell arc fits inside the
/// (pad-shrunk) interval, so a returned bound holds for every real `t`,
/// not just grid points. Found values are re-verified by an independent
/// pass.
pub fn covering_bound<T: Real>(
    thetas: &[T],
    intervals: &[(T, T)],
    grid: u64,
    max_m: u64,
) -> Option<u64> {
    assert_eq!(thetas.len(), intervals.len());
    assert!(grid >= 1);
    let k = thetas.len();
    let cells = (grid as usize).pow(k as u32);
    let mut covered = vec![false; cells];
    let mut remaining = cells;
    for mp in 0..max_m {
        let ok = per_axis_cover(thetas, intervals, grid, mp);
        for (cell, flag) in covered.iter_mut().enumerate() {
            if !*flag {
                let mut idx = cell;
                let mut all = true;
                for axis in ok.iter() {
                    if !axis[idx % grid as usize] {
                        all = false;
                        break;
                    }
                    idx /= grid as usize;
                }
                if all {
                    *flag = true;
                    remaining -= 1;
                }
            }
        }
        if remaining == 0 {
            let m = mp + 1;
            if verify_covering(thetas, intervals, grid, m) {
                return Some(m);
            }
            return None;
        }
    }
    None
}

/// Per-axis cell coverage for shift `m'`: entry `g` says whether the whole
/// arc `frac(theta_i * m' + [g/grid, (g+1)/grid))` sits inside the shrunk
/// interval `i`.
fn per_axis_cover<T: Real>(
    thetas: &[T],
    intervals: &[(T, T)],
    grid: u64,
    mp: u64,
) -> Vec<Vec<bool>> {
    let width = T::one().div(&T::from_int(grid as i64));
    let pad = T::pad();
    thetas
        .iter()
        .zip(intervals)
        .map(|(th, (lo, hi))| {
            let base = th.mul_nat(mp);
            (0..grid)
                .map(|g| {
                    let t = T::from_int(g as i64).div(&T::from_int(grid as i64));
                    let v = (base.clone() + t).fract();
                    let top = v.clone() + width.clone();
                    v > lo.clone() + pad.clone() && top < hi.clone() - pad.clone() && top < T::one()
                })
                .collect()
        })
        .collect()
}

/// Independent re-check of a covering bound over all cells and shifts.
pub fn verify_covering<T: Real>(
    thetas: &[T],
    intervals: &[(T, T)],
    grid: u64,
    m: u64,
) -> bool {
    let k = thetas.len();
    let cells = (grid as usize).pow(k as u32);
    let axis: Vec<Vec<Vec<bool>>> = (0..m)
        .map(|mp| per_axis_cover(thetas, intervals, grid, mp))
        .collect();
    (0..cells).all(|cell| {
        (0..m as usize).any(|mp| {
            let mut idx = cell;
            for a in axis[mp].iter() {
                if !a[idx % grid as usize] {
                    return false;
                }
                idx /= grid as usize;
            }
            true
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Fix;
    use num_traits::Zero;

    type F = Fix<304>;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn sqrt_primes_first_use_is_sqrt_two() {
        let fam: ThetaFamily<F> = ThetaFamily::sqrt_primes(false);
        let t = fam.theta(&ord("w^2+3"));
        let sq = t.clone() * t.clone();
        assert!((sq - F::from_int(2)).abs() < F::pad());
    }

    #[test]
    fn seeded_family_is_reproducible_and_injective() {
        let a: ThetaFamily<F> = ThetaFamily::seeded(99, true);
        let b: ThetaFamily<F> = ThetaFamily::seeded(99, true);
        let xs = ["0", "w", "w*2+1", "w^3"];
        for s in xs {
            assert_eq!(a.theta(&ord(s)), b.theta(&ord(s)));
            assert_eq!(
                a.theta_prime(&ord(s)).unwrap(),
                b.theta_prime(&ord(s)).unwrap()
            );
        }
        for s in xs {
            for t in xs {
                if s != t {
                    assert_ne!(a.theta(&ord(s)), a.theta(&ord(t)));
                }
            }
        }
    }

    #[test]
    fn theta_prime_needs_pairs() {
        let fam: ThetaFamily<F> = ThetaFamily::sqrt_primes(false);
        assert!(matches!(
            fam.theta_prime(&ord("w")),
            Err(ThetaError::PairsRequired)
        ));
    }

    #[test]
    fn kronecker_finds_sqrt_two_target() {
        let theta = F::sqrt_nat(2);
        let target = F::from_decimal_str("0.41").unwrap();
        let eps = F::from_decimal_str("0.01").unwrap();
        assert_eq!(kronecker_search(&[theta], &[target], &eps, 100), Some(1));
    }

    #[test]
    fn kronecker_eps_one_hits_immediately() {
        let theta = F::sqrt_nat(3);
        let target = F::from_decimal_str("0.99").unwrap();
        let eps = F::from_int(1);
        assert_eq!(kronecker_search(&[theta], &[target], &eps, 10), Some(0));
    }

    #[test]
    fn kronecker_rational_control_returns_none() {
        let theta = F::from_big_ratio(&BigInt::from(1), &BigInt::from(2));
        let target = F::from_decimal_str("0.25").unwrap();
        let eps = F::from_decimal_str("0.1").unwrap();
        assert_eq!(kronecker_search(&[theta], &[target], &eps, 10_000), None);
    }

    #[test]
    fn covering_full_circle_needs_two_shifts() {
        let theta = F::sqrt_nat(2);
        let interval = (F::zero(), F::from_int(1));
        assert_eq!(covering_bound(&[theta], &[interval], 8, 100), Some(2));
    }

    #[test]
    fn covering_narrow_interval_scales_like_inverse_length() {
        let theta = F::sqrt_nat(2);
        let lo = F::from_decimal_str("0.0").unwrap();
        let hi = F::from_decimal_str("0.2").unwrap();
        let m = covering_bound(&[theta], &[(lo, hi)], 40, 400).unwrap();
        assert!(m >= 5, "interval of length 0.2 covered suspiciously fast: {m}");
        assert!(verify_covering(
            &[F::sqrt_nat(2)],
            &[(
                F::from_decimal_str("0.0").unwrap(),
                F::from_decimal_str("0.2").unwrap()
            )],
            40,
            m
        ));
    }

    #[test]
    fn covering_rational_orbit_misses_interval() {
        let theta = F::from_big_ratio(&BigInt::from(1), &BigInt::from(2));
        let lo = F::from_decimal_str("0.6").unwrap();
        let hi = F::from_decimal_str("0.7").unwrap();
        assert_eq!(covering_bound(&[theta], &[(lo, hi)], 10, 500), None);
    }
}
