//! Finite-condition machinery over a seeded bit stream: an almost-disjoint
//! family of position sets with lazily built bijections onto the ordinals,
//! the C-sequences decided by finite 0/1 conditions or by the full stream,
//! the decided walk data, and the verified one-point oscillation extension
//! search.
//!
//! Positions live on pairwise disjoint rows of the pairing-function
//! triangle, one row per limit ordinal, so a set bit affects exactly one
//! column and the minimum position of a row grows with the ordinal's
//! enumeration index. Each bijection interleaves surjectivity steps (even)
//! with witness planting (odd): a planted value sits below a designated
//! limit-of-limits target, exceeds every earlier value below it, and has
//! its row minimum above its own position. Those witnesses are what the
//! extension search spends.

mod claim;

pub use claim::{claim_prepare, claim_search, claim_verify, ClaimInstance, ClaimReport, ClaimSearchOutcome};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cseq::{CSeq, CSeqError};
use crate::ordinal::{Enumeration, Ordinal, OrdinalClass};
use crate::rng::BitStream;

#[derive(Debug, Error)]
pub enum CohenError {
    #[error("ordinal {0} outside environment bound {1}")]
    OutsideBound(Ordinal, Ordinal),
    #[error("condition extension must only add positions at or past the old domain")]
    BadExtension,
    #[error("claim instance invalid: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    CSeq(#[from] CSeqError),
}

/// A finite forcing condition: a 0/1 string on an initial segment of the
/// naturals, stored sparsely as its set positions. Stronger = longer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCondition {
    len: u64,
    ones: BTreeSet<u64>,
}

impl FinCondition {
    pub fn empty() -> Self {
        FinCondition {
            len: 0,
            ones: BTreeSet::new(),
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        FinCondition {
            len: bits.len() as u64,
            ones: bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i as u64))
                .collect(),
        }
    }

    /// The length-`len` prefix of a seeded stream.
    pub fn stream_prefix(stream: &BitStream, len: u64) -> Self {
        FinCondition {
            len,
            ones: (0..len).filter(|&i| stream.bit(i)).collect(),
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.ones.iter().copied()
    }

    pub fn bit(&self, i: u64) -> Option<bool> {
        (i < self.len).then(|| self.ones.contains(&i))
    }

    /// Function extension: `self` is at least as strong as `weaker`.
    pub fn extends(&self, weaker: &FinCondition) -> bool {
        if self.len < weaker.len {
            return false;
        }
        let self_restricted: BTreeSet<u64> = self
            .ones
            .iter()
            .copied()
            .filter(|&i| i < weaker.len)
            .collect();
        self_restricted == weaker.ones
    }

    /// Extends with new set positions (all at or past the current domain)
    /// and zeros elsewhere up to `new_len`.
    pub fn extend_with(&self, new_ones: &[u64], new_len: u64) -> Result<Self, CohenError> {
        let mut ones = self.ones.clone();
        let mut len = self.len.max(new_len);
        for &p in new_ones {
            if p < self.len {
                return Err(CohenError::BadExtension);
            }
            ones.insert(p);
            len = len.max(p + 1);
        }
        Ok(FinCondition { len, ones })
    }
}

impl fmt::Display for FinCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            for i in 0..self.len {
                write!(f, "{}", if self.ones.contains(&i) { 1 } else { 0 })?;
            }
            Ok(())
        } else {
            write!(f, "<len {} with {} ones>", self.len, self.ones.len())
        }
    }
}

/// Reproducible parameters of an environment; the full lazily built state
/// is derived from these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvSnapshot {
    pub seed: u64,
    pub bound: Ordinal,
    pub channels: u32,
}

/// One planting record of a bijection: an odd step placed `value` (below
/// the designated target `des`) at position `pos`, with
/// `pos < min A_value`.
#[derive(Debug, Clone)]
pub struct Plant {
    pub des: Ordinal,
    pub pos: u64,
    pub value: Ordinal,
}

struct PiState {
    values: Vec<Ordinal>,
    value_pos: HashMap<Ordinal, u64>,
    used: BTreeSet<Ordinal>,
    /// Scan index into the shared bound enumeration for surjectivity
    /// steps; every hit below the column ordinal is consumed exactly once.
    scan_idx: u64,
    plant_count: u64,
    plants: Vec<Plant>,
    /// Per-target scan cursors for planting. A candidate skipped once is
    /// ineligible forever (all plant constraints tighten monotonically),
    /// so resuming the scan is sound.
    plant_cursors: HashMap<Ordinal, u64>,
}

impl PiState {
    fn new() -> Self {
        PiState {
            values: Vec::new(),
            value_pos: HashMap::new(),
            used: BTreeSet::new(),
            scan_idx: 0,
            plant_count: 0,
            plants: Vec::new(),
            plant_cursors: HashMap::new(),
        }
    }
}

struct EnvState {
    bound_enum: Enumeration,
    pis: HashMap<Ordinal, PiState>,
    stream_cache: HashMap<(u64, Ordinal), StreamCSeqState>,
}

struct StreamCSeqState {
    members: Vec<Ordinal>,
    next_index: u64,
}

/// The forcing environment: bound, channel count and seed determine
/// everything; bijections and stream decisions are grown on demand.
pub struct CohenEnv {
    snapshot: EnvSnapshot,
    state: Mutex<EnvState>,
    /// Cap on enumeration steps a single plant search may take.
    plant_scan_limit: u64,
    /// Cap on member-index steps a single stream decision may take.
    stream_budget: u64,
}

impl CohenEnv {
    pub fn new(seed: u64, bound: Ordinal, channels: u32) -> Self {
        assert!(channels >= 1);
        assert!(bound.is_limit(), "environment bound must be a limit");
        CohenEnv {
            state: Mutex::new(EnvState {
                bound_enum: Enumeration::new(bound.clone()),
                pis: HashMap::new(),
                stream_cache: HashMap::new(),
            }),
            snapshot: EnvSnapshot {
                seed,
                bound,
                channels,
            },
            plant_scan_limit: 400_000,
            stream_budget: 200_000,
        }
    }

    pub fn from_snapshot(s: &EnvSnapshot) -> Self {
        Self::new(s.seed, s.bound.clone(), s.channels)
    }

    pub fn snapshot(&self) -> &EnvSnapshot {
        &self.snapshot
    }

    pub fn bound(&self) -> &Ordinal {
        &self.snapshot.bound
    }

    pub fn channels(&self) -> u32 {
        self.snapshot.channels
    }

    /// The seeded stream this environment's `bitstream` C-sequence reads.
    pub fn stream(&self) -> BitStream {
        BitStream::new(self.snapshot.seed)
    }

    /// Channel of a limit ordinal: the partition classes cycle with the
    /// last CNF coefficient, so below every limit-of-limits each class is
    /// cofinal.
    pub fn channel(&self, alpha: &Ordinal) -> u32 {
        debug_assert!(alpha.is_limit());
        ((alpha.last_coeff() - 1) % self.snapshot.channels as u64) as u32
    }

    /// Desk-scale reading of "accumulation point of every channel class":
    /// a limit of limit ordinals, i.e. last CNF exponent at least 2.
    pub fn is_designated(alpha: &Ordinal) -> bool {
        matches!(alpha.terms().last(), Some(&(e, _)) if e >= 2)
    }

    fn check_bound(&self, alpha: &Ordinal) -> Result<(), CohenError> {
        if alpha >= &self.snapshot.bound {
            return Err(CohenError::OutsideBound(
                alpha.clone(),
                self.snapshot.bound.clone(),
            ));
        }
        Ok(())
    }

    /// Row index of a limit ordinal's position set: enumeration index
    /// below the bound, shifted so every row minimum clears every channel
    /// index.
    pub fn row(&self, alpha: &Ordinal) -> u64 {
        let mut st = self.state.lock().unwrap();
        st.bound_enum.index_of(alpha) + self.snapshot.channels as u64 + 1
    }

    /// The `m`-th position of row `row`: pairing-triangle coordinates, so
    /// rows are pairwise disjoint and positions increase with `m`.
    pub fn row_member(row: u64, m: u64) -> u64 {
        let s = row + m;
        s * (s + 1) / 2 + m
    }

    /// Inverse of [`CohenEnv::row_member`].
    pub fn decode_pos(pos: u64) -> (u64, u64) {
        let mut s = ((8.0 * pos as f64 + 1.0).sqrt() as u64).saturating_sub(1) / 2;
        while (s + 1) * (s + 2) / 2 <= pos {
            s += 1;
        }
        while s * (s + 1) / 2 > pos {
            s -= 1;
        }
        let m = pos - s * (s + 1) / 2;
        (s - m, m)
    }

    /// `min A_alpha` for a limit ordinal.
    pub fn a_min(&self, alpha: &Ordinal) -> u64 {
        Self::row_member(self.row(alpha), 0)
    }

    /// The value of the bijection at member index `m`, extending it as
    /// needed.
    pub fn pi_value(&self, alpha: &Ordinal, m: u64) -> Result<Ordinal, CohenError> {
        self.check_bound(alpha)?;
        debug_assert!(alpha.is_limit());
        let mut st = self.state.lock().unwrap();
        while pi_len(&st, alpha) <= m {
            extend_pi(&mut st, self, alpha);
        }
        Ok(st.pis[alpha].values[m as usize].clone())
    }

    /// Position (member index) of `value` in the bijection, if assigned so
    /// far.
    pub fn pi_index_of(&self, alpha: &Ordinal, value: &Ordinal) -> Option<u64> {
        let st = self.state.lock().unwrap();
        st.pis.get(alpha).and_then(|p| p.value_pos.get(value).copied())
    }

    /// Copy of the planting records of a column, for inspection and tests.
    pub fn plants_snapshot(&self, alpha: &Ordinal) -> Vec<Plant> {
        let st = self.state.lock().unwrap();
        st.pis.get(alpha).map_or(Vec::new(), |p| p.plants.clone())
    }

    fn pi_extended_len(&self, alpha: &Ordinal) -> u64 {
        let st = self.state.lock().unwrap();
        st.pis.get(alpha).map_or(0, |p| p.values.len() as u64)
    }

    /// Searches the plants of column `col` for a witness below the
    /// designated target inside the open value interval, at a position
    /// past `pos_gt`, extending the bijection within `budget` steps.
    pub fn find_planted(
        &self,
        col: &Ordinal,
        des: &Ordinal,
        val_lb: &Ordinal,
        val_ub: &Ordinal,
        pos_gt: u64,
        exclude: &[Ordinal],
        budget: &mut u64,
    ) -> Option<(u64, Ordinal)> {
        let matches = |p: &Plant| {
            p.des == *des
                && p.value > *val_lb
                && p.value < *val_ub
                && p.pos > pos_gt
                && !exclude.contains(&p.value)
        };
        let mut scanned = 0usize;
        loop {
            {
                let st = self.state.lock().unwrap();
                if let Some(pi) = st.pis.get(col) {
                    for p in &pi.plants[scanned.min(pi.plants.len())..] {
                        if matches(p) {
                            return Some((p.pos, p.value.clone()));
                        }
                    }
                    scanned = pi.plants.len();
                }
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut st = self.state.lock().unwrap();
            extend_pi(&mut st, self, col);
        }
    }

    /// Collects `count` fresh values of column `col` inside the open
    /// ordinal interval, strictly increasing in value, at positions
    /// strictly above `pos_gt`; only newly extended member indices are
    /// considered, so positions also exceed everything the column used
    /// before.
    pub fn collect_chain_after(
        &self,
        col: &Ordinal,
        count: u64,
        val_lb: &Ordinal,
        val_ub: &Ordinal,
        pos_gt: u64,
        budget: &mut u64,
    ) -> Option<Vec<(u64, Ordinal)>> {
        let mut out: Vec<(u64, Ordinal)> = Vec::new();
        let mut floor = val_lb.clone();
        let mut cursor = self.pi_extended_len(col);
        let row = self.row(col);
        while (out.len() as u64) < count {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            {
                let mut st = self.state.lock().unwrap();
                extend_pi(&mut st, self, col);
            }
            let val = self.pi_value(col, cursor).expect("just extended");
            let pos = Self::row_member(row, cursor);
            cursor += 1;
            if pos > pos_gt && val > floor && val < *val_ub {
                floor = val.clone();
                out.push((pos, val));
            }
        }
        Some(out)
    }

    /// The least enumerated ordinal strictly inside `(lb, ub)` not yet
    /// assigned by any of the given columns; extending any of them later
    /// therefore meets it at a fresh position above everything they have
    /// used so far.
    pub fn find_fresh_common_value(
        &self,
        cols: &[&Ordinal],
        lb: &Ordinal,
        ub: &Ordinal,
        budget: &mut u64,
    ) -> Option<Ordinal> {
        let mut idx = 0u64;
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut st = self.state.lock().unwrap();
            let cand = st.bound_enum.get(idx).expect("bound is a limit");
            idx += 1;
            if cand <= *lb || cand >= *ub {
                continue;
            }
            let taken = cols
                .iter()
                .any(|c| st.pis.get(c).is_some_and(|p| p.used.contains(&cand)));
            if !taken {
                return Some(cand);
            }
        }
    }

    /// Position of `target` in column `col` provided it is (or becomes)
    /// assigned at a position strictly above `pos_gt`. Returns `None` both
    /// when the value is already pinned at or below `pos_gt` and on budget
    /// exhaustion.
    pub fn find_value_at_pos_above(
        &self,
        col: &Ordinal,
        target: &Ordinal,
        pos_gt: u64,
        budget: &mut u64,
    ) -> Option<u64> {
        debug_assert!(target < col);
        let row = self.row(col);
        if let Some(m) = self.pi_index_of(col, target) {
            let pos = Self::row_member(row, m);
            return (pos > pos_gt).then_some(pos);
        }
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let m = {
                let mut st = self.state.lock().unwrap();
                extend_pi(&mut st, self, col);
                pi_len(&st, col) - 1
            };
            let val = self.pi_value(col, m).expect("just extended");
            if val == *target {
                let pos = Self::row_member(row, m);
                return (pos > pos_gt).then_some(pos);
            }
        }
    }

    /// The decided finite sequence `C^p_alpha`.
    pub fn cp_seq(&self, p: &FinCondition, alpha: &Ordinal) -> Result<Vec<Ordinal>, CohenError> {
        self.check_bound(alpha)?;
        match alpha.classify() {
            OrdinalClass::Zero => Ok(Vec::new()),
            OrdinalClass::Successor => Ok(vec![alpha.predecessor().expect("successor")]),
            OrdinalClass::Limit => {
                let row = self.row(alpha);
                // Positions of this column among the condition's ones, in
                // increasing position (hence member-index) order.
                let mut members: Vec<u64> = Vec::new();
                for pos in p.ones() {
                    let (r, m) = Self::decode_pos(pos);
                    if r == row {
                        members.push(m);
                    }
                }
                members.sort_unstable();
                let mut out: Vec<Ordinal> = Vec::new();
                for m in members {
                    let val = self.pi_value(alpha, m)?;
                    // First decided member, then each later one must
                    // exceed the current last in value (its position is
                    // already larger); non-qualifying bits are skipped and
                    // the scan continues per the decided recursion.
                    match out.last() {
                        None => out.push(val),
                        Some(last) if val > *last => out.push(val),
                        _ => {}
                    }
                }
                Ok(out)
            }
        }
    }

    /// The `n`-th member of the stream-decided sequence `C^r_alpha`, the
    /// bitstream variant of a C-sequence.
    pub fn stream_cseq(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
        if !alpha.is_limit() {
            return Err(CSeqError::NotALimit(alpha.clone()));
        }
        if alpha >= &self.snapshot.bound {
            return Err(CSeqError::OutOfUniverse {
                alpha: alpha.clone(),
                bound: self.snapshot.bound.clone(),
            });
        }
        let stream = self.stream();
        let key = (stream.seed(), alpha.clone());
        loop {
            let (count, start_idx, last) = {
                let st = self.state.lock().unwrap();
                match st.stream_cache.get(&key) {
                    Some(sc) if (sc.members.len() as u64) > n => {
                        return Ok(sc.members[n as usize].clone());
                    }
                    Some(sc) => (sc.members.len(), sc.next_index, sc.members.last().cloned()),
                    None => (0, 0, None),
                }
            };
            // Advance the decision by one accepted member: the next stream
            // hit in this column whose value exceeds the current last.
            let row = self.row(alpha);
            let mut idx = start_idx;
            let accepted = loop {
                if idx >= self.stream_budget {
                    return Err(CSeqError::DecisionBudget {
                        alpha: alpha.clone(),
                        n,
                        budget: self.stream_budget,
                    });
                }
                let pos = Self::row_member(row, idx);
                let hit = if stream.bit(pos) {
                    let val = self.pi_value(alpha, idx).expect("limit below bound");
                    if last.as_ref().is_none_or(|l| val > *l) {
                        Some(val)
                    } else {
                        None
                    }
                } else {
                    None
                };
                idx += 1;
                if let Some(v) = hit {
                    break v;
                }
            };
            let mut st = self.state.lock().unwrap();
            let sc = st
                .stream_cache
                .entry(key.clone())
                .or_insert(StreamCSeqState {
                    members: Vec::new(),
                    next_index: 0,
                });
            // Idempotent fill: append only if no other thread advanced.
            if sc.members.len() == count {
                sc.members.push(accepted);
                sc.next_index = idx;
            }
        }
    }

    /// `F^p_alpha`: the closure of `alpha` under decided sequences, the
    /// set of all walk targets decided from `alpha`.
    pub fn fp_set(&self, p: &FinCondition, alpha: &Ordinal) -> Result<BTreeSet<Ordinal>, CohenError> {
        let mut memo: BTreeMap<Ordinal, BTreeSet<Ordinal>> = BTreeMap::new();
        self.fp_rec(p, alpha, &mut memo)
    }

    fn fp_rec(
        &self,
        p: &FinCondition,
        alpha: &Ordinal,
        memo: &mut BTreeMap<Ordinal, BTreeSet<Ordinal>>,
    ) -> Result<BTreeSet<Ordinal>, CohenError> {
        if let Some(s) = memo.get(alpha) {
            return Ok(s.clone());
        }
        let mut out = BTreeSet::new();
        out.insert(alpha.clone());
        for xi in self.cp_seq(p, alpha)? {
            out.extend(self.fp_rec(p, &xi, memo)?);
        }
        memo.insert(alpha.clone(), out.clone());
        Ok(out)
    }

    /// Decided upper trace, lower trace and maximal weight.
    pub fn decided_walk(
        &self,
        p: &FinCondition,
        alpha: &Ordinal,
        beta: &Ordinal,
    ) -> Result<DecidedWalk, CohenError> {
        assert!(alpha <= beta, "decided walk requires alpha <= beta");
        self.check_bound(beta)?;
        let mut trace = vec![beta.clone()];
        let mut step_seqs: Vec<Vec<Ordinal>> = Vec::new();
        let mut cur = beta.clone();
        loop {
            let c = self.cp_seq(p, &cur)?;
            match c.iter().position(|x| x >= alpha) {
                None => {
                    // Decided data exhausted (or reached alpha).
                    step_seqs.push(c);
                    break;
                }
                Some(i) => {
                    let next = c[i].clone();
                    step_seqs.push(c);
                    trace.push(next.clone());
                    cur = next;
                    if cur == *alpha {
                        step_seqs.push(self.cp_seq(p, &cur)?);
                        break;
                    }
                }
            }
        }
        // Lower trace: innermost first. The end of the trace either is
        // alpha (inner trace empty) or is stuck with all decided members
        // below alpha, contributing its maximum.
        let endpoint = trace.last().unwrap().clone();
        let mut lower: Vec<Ordinal> = Vec::new();
        if endpoint != *alpha {
            let c_end = step_seqs.last().unwrap();
            if let Some(max) = c_end.last() {
                lower.push(max.clone());
            }
        }
        for c in step_seqs.iter().rev().skip(1) {
            let below_max = c.iter().rfind(|x| *x < alpha);
            if let Some(m) = below_max {
                lower.retain(|x| x >= m);
                if !lower.contains(m) {
                    lower.insert(0, m.clone());
                }
            }
        }
        // Maximal weight over all trace points except alpha.
        let mut rho1 = 0u64;
        for (t, c) in trace.iter().zip(step_seqs.iter()) {
            if t != alpha {
                rho1 = rho1.max(c.iter().filter(|x| *x < alpha).count() as u64);
            }
        }
        Ok(DecidedWalk {
            trace,
            lower,
            rho1,
        })
    }

    /// Decided maximal weight column entry.
    pub fn decided_rho1(
        &self,
        p: &FinCondition,
        xi: &Ordinal,
        beta: &Ordinal,
    ) -> Result<u64, CohenError> {
        Ok(self.decided_walk(p, xi, beta)?.rho1)
    }
}

fn pi_len(st: &EnvState, alpha: &Ordinal) -> u64 {
    st.pis.get(alpha).map_or(0, |p| p.values.len() as u64)
}

/// One extension step of a bijection: even member indices cover the next
/// not-yet-used ordinal in enumeration order, odd indices plant a witness
/// for the cycling designated target when one is available.
fn extend_pi(st: &mut EnvState, env: &CohenEnv, alpha: &Ordinal) {
    let row = {
        // Row is needed before borrowing the pi state mutably.
        st.bound_enum.index_of(alpha) + env.snapshot.channels as u64 + 1
    };
    if !st.pis.contains_key(alpha) {
        st.pis.insert(alpha.clone(), PiState::new());
    }
    let m = st.pis[alpha].values.len() as u64;
    let value = if m % 2 == 1 {
        plant_step(st, env, alpha, row, m)
    } else {
        None
    };
    let value = match value {
        Some(v) => v,
        None => surjectivity_step(st, alpha),
    };
    let pi = st.pis.get_mut(alpha).unwrap();
    pi.value_pos.insert(value.clone(), m);
    pi.used.insert(value.clone());
    pi.values.push(value);
}

/// Next unused ordinal below `alpha` in enumeration order.
fn surjectivity_step(st: &mut EnvState, alpha: &Ordinal) -> Ordinal {
    loop {
        let idx = st.pis[alpha].scan_idx;
        st.pis.get_mut(alpha).unwrap().scan_idx = idx + 1;
        let cand = st.bound_enum.get(idx).expect("bound is a limit");
        if cand < *alpha && !st.pis[alpha].used.contains(&cand) {
            return cand;
        }
    }
}

/// Designated targets of a column: its limit-of-limits, ordered by
/// enumeration index. Below a top exponent of 3 the list is the finite
/// set of double-limit multiples; above it the scan always terminates.
fn lol_at(st: &mut EnvState, alpha: &Ordinal, which: u64) -> Option<Ordinal> {
    let top_exp = alpha.terms().first().map_or(0, |&(e, _)| e);
    if top_exp <= 2 {
        // Finite: the double limits below alpha are w^2*c.
        let mut lols: Vec<(u64, Ordinal)> = Vec::new();
        let mut c = 1u64;
        loop {
            let cand = Ordinal::omega_power(2, c);
            if cand >= *alpha {
                break;
            }
            let idx = st.bound_enum.index_of(&cand);
            lols.push((idx, cand));
            c += 1;
        }
        lols.sort();
        return lols.into_iter().nth(which as usize).map(|(_, o)| o);
    }
    // Infinite: scan the enumeration.
    let mut found = 0u64;
    let mut idx = 0u64;
    loop {
        let cand = st.bound_enum.get(idx).expect("bound is a limit");
        idx += 1;
        if cand < *alpha && CohenEnv::is_designated(&cand) {
            if found == which {
                return Some(cand);
            }
            found += 1;
        }
    }
}

/// Odd-step planting: pick the designated target from the cycling
/// schedule, then take the first enumerated limit below it that exceeds
/// every current value below the target and whose row minimum clears the
/// position being defined.
fn plant_step(
    st: &mut EnvState,
    env: &CohenEnv,
    alpha: &Ordinal,
    row: u64,
    m: u64,
) -> Option<Ordinal> {
    let n = st.pis[alpha].plant_count;
    st.pis.get_mut(alpha).unwrap().plant_count = n + 1;
    let (which, _rep) = CohenEnv::decode_pos(n);
    let des = lol_at(st, alpha, which)?;
    let pos = CohenEnv::row_member(row, m);
    let prev_max: Option<Ordinal> = st.pis[alpha]
        .used
        .range(..des.clone())
        .next_back()
        .cloned();
    // Candidates at enumeration index i have row minimum T(i + N + 1), so
    // indices below the threshold can never clear `pos`; combined with the
    // per-target cursor, the scan never revisits an ineligible index.
    let shift = env.snapshot.channels as u64 + 1;
    let mut lo = ((8.0 * pos as f64 + 1.0).sqrt() as u64) / 2;
    while triangle_u64(lo + shift) <= pos {
        lo += 1;
    }
    while lo > 0 && triangle_u64(lo - 1 + shift) > pos {
        lo -= 1;
    }
    let cursor = st.pis[alpha]
        .plant_cursors
        .get(&des)
        .copied()
        .unwrap_or(0);
    let mut idx = cursor.max(lo);
    let mut scanned = 0u64;
    loop {
        if scanned >= env.plant_scan_limit {
            return None;
        }
        scanned += 1;
        let cand = st.bound_enum.get(idx).expect("bound is a limit");
        idx += 1;
        if cand >= des || !cand.is_limit() {
            continue;
        }
        if let Some(pm) = &prev_max {
            if cand <= *pm {
                continue;
            }
        }
        if st.pis[alpha].used.contains(&cand) {
            continue;
        }
        let cand_row = st.bound_enum.index_of(&cand) + shift;
        if CohenEnv::row_member(cand_row, 0) <= pos {
            continue;
        }
        let pi = st.pis.get_mut(alpha).unwrap();
        pi.plant_cursors.insert(des.clone(), idx);
        pi.plants.push(Plant {
            des,
            pos,
            value: cand.clone(),
        });
        return Some(cand);
    }
}

fn triangle_u64(n: u64) -> u64 {
    n * (n + 1) / 2
}

/// The decided walk data of one pair under one condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecidedWalk {
    /// Visited ordinals, decreasing; ends at `alpha` exactly when the walk
    /// is fully decided.
    pub trace: Vec<Ordinal>,
    /// Decided lower trace, increasing.
    pub lower: Vec<Ordinal>,
    /// Decided maximal weight.
    pub rho1: u64,
}

impl DecidedWalk {
    /// Whether the walk reached its target, the premise of the
    /// decided-equals-true stability fact.
    pub fn reached(&self, alpha: &Ordinal) -> bool {
        self.trace.last() == Some(alpha)
    }

    pub fn min_trace(&self) -> &Ordinal {
        self.trace.last().expect("trace never empty")
    }
}

/// C-sequence provider backed by the environment's seeded stream; plugs
/// the decided machinery into the walk calculus.
pub struct BitstreamCSeq {
    env: std::sync::Arc<CohenEnv>,
}

impl BitstreamCSeq {
    pub fn new(env: std::sync::Arc<CohenEnv>) -> Self {
        BitstreamCSeq { env }
    }

    pub fn env(&self) -> &std::sync::Arc<CohenEnv> {
        &self.env
    }
}

impl CSeq for BitstreamCSeq {
    fn elem(&self, alpha: &Ordinal, n: u64) -> Result<Ordinal, CSeqError> {
        self.env.stream_cseq(alpha, n)
    }

    fn spec_id(&self) -> String {
        let s = self.env.snapshot();
        format!("bitstream:{}:{}:{}", s.seed, s.bound, s.channels)
    }
}

#[cfg(test)]
mod tests;
