//! Oscillation-pattern machinery: Delta-system extraction, scanners for
//! anchored and matrix increment patterns, the diagonal-anchored finite
//! criterion, and the anti-pattern poset membership test.
//!
//! Scanners are best effort: the existence theorems live at the
//! uncountable level and can consistently fail to have desk-scale
//! witnesses, so an empty result is a recorded outcome, never an error.
//! What is exact here is verification: every emitted witness is recomputed
//! through an independent walker with no shared memo before it is
//! reported.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::osc::{osc_finite, FinFun, OscError};
use crate::walks::{WalkError, Walker};

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("family shape error: {0}")]
    FamilyShape(String),
    #[error("operation requires a pairwise disjoint family")]
    FamilyNotDisjoint,
    #[error("pattern matrix error: {0}")]
    BadPattern(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Osc(#[from] OscError),
}

/// A finite family of equal-width increasing ordinal tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    blocks: Vec<Vec<Ordinal>>,
    width: usize,
}

impl Family {
    pub fn new(blocks: Vec<Vec<Ordinal>>) -> Result<Self, PatternError> {
        if blocks.is_empty() {
            return Err(PatternError::FamilyShape("empty family".into()));
        }
        let width = blocks[0].len();
        if width == 0 {
            return Err(PatternError::FamilyShape("zero-width blocks".into()));
        }
        for b in &blocks {
            if b.len() != width {
                return Err(PatternError::FamilyShape(format!(
                    "block width {} != {}",
                    b.len(),
                    width
                )));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PatternError::FamilyShape(format!(
                    "block not strictly increasing: {b:?}"
                )));
            }
        }
        Ok(Family { blocks, width })
    }

    pub fn blocks(&self) -> &[Vec<Ordinal>] {
        &self.blocks
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Computed, never assumed.
    pub fn pairwise_disjoint(&self) -> bool {
        for i in 0..self.blocks.len() {
            for j in (i + 1)..self.blocks.len() {
                if intersect_sorted(&self.blocks[i], &self.blocks[j]).next().is_some() {
                    return false;
                }
            }
        }
        true
    }
}

fn intersect_sorted<'a>(
    a: &'a [Ordinal],
    b: &'a [Ordinal],
) -> impl Iterator<Item = &'a Ordinal> + 'a {
    a.iter().filter(move |x| b.binary_search(x).is_ok())
}

/// `max a < min b` for increasing tuples.
pub fn tuple_below(a: &[Ordinal], b: &[Ordinal]) -> bool {
    match (a.last(), b.first()) {
        (Some(ma), Some(mb)) => ma < mb,
        _ => true,
    }
}

/// Integer increment matrix attached to a family pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<i64>,
}

impl PatternMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self, PatternError> {
        if entries.len() != rows * cols {
            return Err(PatternError::BadPattern(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(PatternMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    /// Requirements for the diagonal-anchored criterion: square, zero
    /// diagonal, nonnegative entries.
    pub fn validate_diagonal(&self) -> Result<(), PatternError> {
        if self.rows != self.cols {
            return Err(PatternError::BadPattern("matrix not square".into()));
        }
        for i in 0..self.rows {
            if self.get(i, i) != 0 {
                return Err(PatternError::BadPattern(format!(
                    "diagonal entry c[{i}][{i}] = {} != 0",
                    self.get(i, i)
                )));
            }
        }
        if self.entries.iter().any(|&e| e < 0) {
            return Err(PatternError::BadPattern("negative entry".into()));
        }
        Ok(())
    }
}

/// Delta-system extraction: a maximum-size subfamily whose pairwise
/// intersections all equal one root.
///
/// Contract: maximizes the subfamily size; among maximum subfamilies
/// returns the lexicographically least index set; the root of a subfamily
/// of size below two is empty. Exact by subset enumeration up to
/// [`DELTA_EXACT_LIMIT`] blocks, greedy over candidate roots beyond that.
pub const DELTA_EXACT_LIMIT: usize = 16;

pub fn delta_system(fam: &Family) -> (Vec<Ordinal>, Family) {
    let n = fam.len();
    if n <= DELTA_EXACT_LIMIT {
        delta_system_exact(fam)
    } else {
        delta_system_greedy(fam)
    }
}

fn is_delta_system(blocks: &[&Vec<Ordinal>]) -> Option<Vec<Ordinal>> {
    if blocks.len() < 2 {
        return Some(Vec::new());
    }
    let root: Vec<Ordinal> = intersect_sorted(blocks[0], blocks[1]).cloned().collect();
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            let inter: Vec<Ordinal> =
                intersect_sorted(blocks[i], blocks[j]).cloned().collect();
            if inter != root {
                return None;
            }
        }
    }
    Some(root)
}

fn delta_system_exact(fam: &Family) -> (Vec<Ordinal>, Family) {
    let n = fam.len();
    for size in (1..=n).rev() {
        // Lexicographically ordered combinations of indices.
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<&Vec<Ordinal>> = idx.iter().map(|&i| &fam.blocks[i]).collect();
            if let Some(root) = is_delta_system(&chosen) {
                let sub = Family::new(chosen.into_iter().cloned().collect())
                    .expect("subfamily of a valid family");
                return (root, sub);
            }
            // Advance the combination.
            let mut k = size;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if idx[k] != k + n - size {
                    idx[k] += 1;
                    for t in (k + 1)..size {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
                if k == 0 {
                    idx = Vec::new();
                    break;
                }
            }
            if idx.is_empty() {
                break;
            }
        }
    }
    unreachable!("singletons are always delta systems")
}

fn delta_system_greedy(fam: &Family) -> (Vec<Ordinal>, Family) {
    // Candidate roots: the empty set plus pairwise intersections.
    let mut roots: Vec<Vec<Ordinal>> = vec![Vec::new()];
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            let inter: Vec<Ordinal> =
                intersect_sorted(&fam.blocks[i], &fam.blocks[j]).cloned().collect();
            if !roots.contains(&inter) {
                roots.push(inter);
            }
        }
    }
    let mut best: Option<(Vec<usize>, Vec<Ordinal>)> = None;
    for root in roots {
        let mut chosen: Vec<usize> = Vec::new();
        'blocks: for (i, b) in fam.blocks.iter().enumerate() {
            if !root.iter().all(|r| b.binary_search(r).is_ok()) {
                continue;
            }
            for &c in &chosen {
                let inter: Vec<Ordinal> =
                    intersect_sorted(&fam.blocks[c], b).cloned().collect();
                if inter != root {
                    continue 'blocks;
                }
            }
            chosen.push(i);
        }
        let better = match &best {
            None => true,
            Some((bi, _)) => chosen.len() > bi.len() || (chosen.len() == bi.len() && chosen < *bi),
        };
        if better {
            best = Some((chosen, root));
        }
    }
    let (idx, mut root) = best.expect("at least the empty root succeeds");
    if idx.len() < 2 {
        root = Vec::new();
    }
    let sub = Family::new(idx.iter().map(|&i| fam.blocks[i].clone()).collect())
        .expect("subfamily of a valid family");
    (root, sub)
}

/// One verified anchored-pattern witness: `osc(a(i), b_m(j)) =
/// osc(a(i), b_0(j)) + m` for all `i, j, m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnchorWitness {
    pub a: Vec<Ordinal>,
    pub bs: Vec<Vec<Ordinal>>,
}

fn fresh_walker(walker: &Walker) -> Walker {
    Walker::new(std::sync::Arc::clone(walker.cseq()))
}

/// Scans for anchored increment witnesses within a pair-probe budget.
/// Requires both families pairwise disjoint. Witnesses are emitted in
/// canonical (content-lexicographic) order; every one is re-verified by an
/// independent walker before being returned.
pub fn scan_anchor_pattern(
    walker: &Walker,
    fam_a: &Family,
    fam_b: &Family,
    n: usize,
    budget: u64,
) -> Result<Vec<AnchorWitness>, PatternError> {
    if !fam_a.pairwise_disjoint() || !fam_b.pairwise_disjoint() {
        return Err(PatternError::FamilyNotDisjoint);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut probes: u64 = 0;
    let mut found = Vec::new();
    let verifier = fresh_walker(walker);
    let bn = fam_b.len();
    let mut tuple = vec![0usize; n];
    'outer: for a in fam_a.blocks() {
        // Iterate all n-tuples of distinct B-indices in lexicographic
        // order.
        for t in tuple.iter_mut() {
            *t = 0;
        }
        loop {
            let distinct = (0..n).all(|i| (0..i).all(|j| tuple[i] != tuple[j]));
            if distinct {
                let bs: Vec<&Vec<Ordinal>> =
                    tuple.iter().map(|&t| &fam_b.blocks()[t]).collect();
                if bs.iter().all(|b| tuple_below(a, b)) {
                    match anchor_holds(walker, a, &bs, &mut probes, budget)? {
                        ScanStep::BudgetExhausted => break 'outer,
                        ScanStep::Holds => {
                            if matches!(
                                anchor_holds(&verifier, a, &bs, &mut 0, u64::MAX)?,
                                ScanStep::Holds
                            ) {
                                found.push(AnchorWitness {
                                    a: a.clone(),
                                    bs: bs.into_iter().cloned().collect(),
                                });
                            }
                        }
                        ScanStep::Fails => {}
                    }
                }
            }
            // Advance the tuple odometer.
            let mut k = n;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < bn {
                    break;
                }
                tuple[k] = 0;
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
    }
    found.sort();
    Ok(found)
}

enum ScanStep {
    Holds,
    Fails,
    BudgetExhausted,
}

fn anchor_holds(
    walker: &Walker,
    a: &[Ordinal],
    bs: &[&Vec<Ordinal>],
    probes: &mut u64,
    budget: u64,
) -> Result<ScanStep, PatternError> {
    let n = bs.len();
    let l = bs[0].len();
    for m in 0..n {
        for (i, ai) in a.iter().enumerate() {
            let _ = i;
            for j in 0..l {
                if *probes >= budget {
                    return Ok(ScanStep::BudgetExhausted);
                }
                *probes += 2;
                let base = crate::osc::osc_count(walker, ai, &bs[0][j])?;
                let here = crate::osc::osc_count(walker, ai, &bs[m][j])?;
                if here != base + m as u64 {
                    return Ok(ScanStep::Fails);
                }
            }
        }
    }
    Ok(ScanStep::Holds)
}

/// Result of the matrix-pattern stabilization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFind {
    pub matrix: PatternMatrix,
    pub sub_a: Vec<Vec<Ordinal>>,
    pub sub_b: Vec<Vec<Ordinal>>,
    pub crossing_pairs: u64,
}

/// Observed increment matrix of one crossing pair.
fn observed_matrix(
    walker: &Walker,
    a: &[Ordinal],
    b: &[Ordinal],
) -> Result<PatternMatrix, PatternError> {
    let k = a.len();
    let l = b.len();
    let mut entries = Vec::with_capacity(k * l);
    for ai in a {
        let base = crate::osc::osc_count(walker, ai, &b[0])? as i64;
        for bj in b {
            let here = crate::osc::osc_count(walker, ai, bj)? as i64;
            entries.push(here - base);
        }
    }
    PatternMatrix::new(k, l, entries)
}

/// Exhaustive-exact threshold for the matrix scanner.
pub const MATRIX_EXACT_LIMIT: usize = 12;

/// Searches for one increment matrix `c` and sub-families on which every
/// crossing pair realizes it.
///
/// Contract: among all `(c, A', B')` with `A'` and `B'` nonempty, at least
/// one crossing pair, and `observed(a, b) = c` for every crossing pair,
/// return the one maximizing `(|A'| + |B'|, crossing pairs)`, breaking ties
/// by the canonical encoding. Exact by enumeration of `A'` (with `B'`
/// derived maximally) up to [`MATRIX_EXACT_LIMIT`] blocks in `A`; greedy
/// elimination beyond. The returned find is re-verified independently.
pub fn scan_matrix_pattern(
    walker: &Walker,
    fam_a: &Family,
    fam_b: &Family,
    budget: u64,
) -> Result<Option<MatrixFind>, PatternError> {
    if !fam_a.pairwise_disjoint() || !fam_b.pairwise_disjoint() {
        return Err(PatternError::FamilyNotDisjoint);
    }
    // Observed matrices for crossing pairs, within budget.
    let mut probes: u64 = 0;
    let mut obs: Vec<Vec<Option<PatternMatrix>>> =
        vec![vec![None; fam_b.len()]; fam_a.len()];
    let cost = (fam_a.width() * fam_b.width() * 2) as u64;
    'fill: for (ia, a) in fam_a.blocks().iter().enumerate() {
        for (ib, b) in fam_b.blocks().iter().enumerate() {
            if tuple_below(a, b) {
                if probes + cost > budget {
                    break 'fill;
                }
                probes += cost;
                obs[ia][ib] = Some(observed_matrix(walker, a, b)?);
            }
        }
    }
    let mut candidates: Vec<PatternMatrix> = Vec::new();
    for row in &obs {
        for m in row.iter().flatten() {
            if !candidates.contains(m) {
                candidates.push(m.clone());
            }
        }
    }
    candidates.sort_by(|a, b| a.entries.cmp(&b.entries));
    let mut best: Option<(MatrixFind, (usize, u64), Vec<i64>)> = None;
    for c in &candidates {
        let finds = if fam_a.len() <= MATRIX_EXACT_LIMIT {
            best_subfamilies_exact(fam_a, fam_b, &obs, c)
        } else {
            best_subfamilies_greedy(fam_a, fam_b, &obs, c)
        };
        if let Some((ia_set, ib_set, pairs)) = finds {
            let score = (ia_set.len() + ib_set.len(), pairs);
            let enc = encode_find(c, &ia_set, &ib_set);
            let better = match &best {
                None => true,
                Some((_, bscore, benc)) => score > *bscore || (score == *bscore && enc < *benc),
            };
            if better {
                let find = MatrixFind {
                    matrix: c.clone(),
                    sub_a: ia_set.iter().map(|&i| fam_a.blocks()[i].clone()).collect(),
                    sub_b: ib_set.iter().map(|&i| fam_b.blocks()[i].clone()).collect(),
                    crossing_pairs: pairs,
                };
                best = Some((find, score, enc));
            }
        }
    }
    match best {
        None => Ok(None),
        Some((find, _, _)) => {
            // Independent verification of every crossing pair.
            let verifier = fresh_walker(walker);
            for a in &find.sub_a {
                for b in &find.sub_b {
                    if tuple_below(a, b) {
                        let m = observed_matrix(&verifier, a, b)?;
                        if m != find.matrix {
                            return Err(PatternError::BadPattern(
                                "verification mismatch in matrix scan".into(),
                            ));
                        }
                    }
                }
            }
            Ok(Some(find))
        }
    }
}

fn encode_find(c: &PatternMatrix, ia: &[usize], ib: &[usize]) -> Vec<i64> {
    let mut enc = c.entries.clone();
    enc.push(i64::MIN);
    enc.extend(ia.iter().map(|&i| i as i64));
    enc.push(i64::MIN);
    enc.extend(ib.iter().map(|&i| i as i64));
    enc
}

type SubFind = (Vec<usize>, Vec<usize>, u64);

/// For a fixed matrix, the maximal consistent `B'` is determined by `A'`,
/// so exact search enumerates subsets of `A` only.
fn best_subfamilies_exact(
    fam_a: &Family,
    fam_b: &Family,
    obs: &[Vec<Option<PatternMatrix>>],
    c: &PatternMatrix,
) -> Option<SubFind> {
    let n = fam_a.len();
    let mut best: Option<(SubFind, (usize, u64), Vec<i64>)> = None;
    for mask in 1u32..(1 << n) {
        let ia: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut ib = Vec::new();
        let mut pairs = 0u64;
        for jb in 0..fam_b.len() {
            let mut ok = true;
            let mut cross = 0u64;
            for &i in &ia {
                if tuple_below(&fam_a.blocks()[i], &fam_b.blocks()[jb]) {
                    match &obs[i][jb] {
                        Some(m) if m == c => cross += 1,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok {
                ib.push(jb);
                pairs += cross;
            }
        }
        if ib.is_empty() || pairs == 0 {
            continue;
        }
        let score = (ia.len() + ib.len(), pairs);
        let enc = encode_find(c, &ia, &ib);
        let better = match &best {
            None => true,
            Some((_, bscore, benc)) => score > *bscore || (score == *bscore && enc < *benc),
        };
        if better {
            best = Some(((ia, ib, pairs), score, enc));
        }
    }
    best.map(|(f, _, _)| f)
}

fn best_subfamilies_greedy(
    fam_a: &Family,
    fam_b: &Family,
    obs: &[Vec<Option<PatternMatrix>>],
    c: &PatternMatrix,
) -> Option<SubFind> {
    let mut ia: Vec<usize> = (0..fam_a.len()).collect();
    loop {
        // Count violations per a-block: crossing pairs whose observed
        // matrix differs (or was not computed).
        let viol: Vec<u64> = ia
            .iter()
            .map(|&i| {
                (0..fam_b.len())
                    .filter(|&jb| {
                        tuple_below(&fam_a.blocks()[i], &fam_b.blocks()[jb])
                            && obs[i][jb].as_ref() != Some(c)
                    })
                    .count() as u64
            })
            .collect();
        // B' derived from the current A'; count violations blocking each b.
        let mut ib = Vec::new();
        let mut pairs = 0u64;
        for jb in 0..fam_b.len() {
            let mut ok = true;
            let mut cross = 0u64;
            for &i in &ia {
                if tuple_below(&fam_a.blocks()[i], &fam_b.blocks()[jb]) {
                    match &obs[i][jb] {
                        Some(m) if m == c => cross += 1,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok {
                ib.push(jb);
                pairs += cross;
            }
        }
        if pairs > 0 {
            return Some((ia, ib, pairs));
        }
        // Drop the a-block with the most violations (first maximum) and
        // retry; give up when nothing is left.
        let (drop_pos, &maxv) = viol
            .iter()
            .enumerate()
            .max_by_key(|&(pos, v)| (*v, std::cmp::Reverse(pos)))?;
        if maxv == 0 {
            return None;
        }
        ia.remove(drop_pos);
        if ia.is_empty() {
            return None;
        }
    }
}

/// Oscillation of the two weight columns indexed by `s_idx`, `t_idx` on an
/// explicit finite set `f` (all members below both indices).
pub fn osc_columns_on(
    walker: &Walker,
    s_idx: &Ordinal,
    t_idx: &Ordinal,
    f: &[Ordinal],
) -> Result<(Vec<Ordinal>, u64), PatternError> {
    let mut s_vals = Vec::with_capacity(f.len());
    let mut t_vals = Vec::with_capacity(f.len());
    for xi in f {
        s_vals.push(walker.rho1(xi, s_idx)?);
        t_vals.push(walker.rho1(xi, t_idx)?);
    }
    let s = FinFun::new(f.to_vec(), s_vals).map_err(PatternError::Osc)?;
    let t = FinFun::new(f.to_vec(), t_vals).map_err(PatternError::Osc)?;
    Ok(osc_finite(&s, &t, f)?)
}

/// The finite diagonal-anchored criterion: true iff
/// `|Osc(rho1_{a(i)}, rho1_{a(j)}; L(delta, a(j)))| = c_ij` for all
/// `i, j < k` (and, with `with_rho_match`, the two columns agree at
/// `max L(delta, a(j))`). Requires `delta <= min a` and a square matrix
/// with zero diagonal; an empty trace with a nonzero target entry is
/// `false`, not an error.
pub fn starstar_criterion(
    walker: &Walker,
    delta: &Ordinal,
    a: &[Ordinal],
    c: &PatternMatrix,
    with_rho_match: bool,
) -> Result<bool, PatternError> {
    c.validate_diagonal()?;
    if c.rows != a.len() {
        return Err(PatternError::BadPattern(format!(
            "matrix is {}x{} but the tuple has {} entries",
            c.rows,
            c.cols,
            a.len()
        )));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PatternError::FamilyShape("tuple not strictly increasing".into()));
    }
    if let Some(min_a) = a.first() {
        if delta > min_a {
            return Err(PatternError::BadPattern(format!(
                "requires delta <= min a, got delta={delta} min={min_a}"
            )));
        }
    }
    for (j, aj) in a.iter().enumerate() {
        let trace = walker.lower_trace(delta, aj)?;
        for (i, ai) in a.iter().enumerate() {
            let (_, count) = osc_columns_on(walker, ai, aj, &trace)?;
            if count as i64 != c.get(i, j) {
                return Ok(false);
            }
            if with_rho_match {
                if let Some(top) = trace.last() {
                    if walker.rho1(top, ai)? != walker.rho1(top, aj)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Membership test for the anti-pattern forcing poset: for every `eta` in
/// `cs` and every pair `alpha != beta` of members of `f` at or above
/// `eta`, one of the two one-sided oscillations must differ from 1.
pub fn poset_condition_valid(
    walker: &Walker,
    cs: &[Ordinal],
    f: &[Ordinal],
) -> Result<bool, PatternError> {
    for eta in cs {
        let members: Vec<&Ordinal> = f.iter().filter(|x| *x >= eta).collect();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let (alpha, beta) = if members[i] < members[j] {
                    (members[i], members[j])
                } else {
                    (members[j], members[i])
                };
                if alpha == beta {
                    continue;
                }
                let l_beta = walker.lower_trace(eta, beta)?;
                let (_, c1) = osc_columns_on(walker, alpha, beta, &l_beta)?;
                let l_alpha = walker.lower_trace(eta, alpha)?;
                let (_, c2) = osc_columns_on(walker, beta, alpha, &l_alpha)?;
                if c1 == 1 && c2 == 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// First violating triple `(eta, alpha, beta)` of the poset condition, if
/// any; the diagnostic companion to [`poset_condition_valid`].
pub fn poset_first_violation(
    walker: &Walker,
    cs: &[Ordinal],
    f: &[Ordinal],
) -> Result<Option<(Ordinal, Ordinal, Ordinal)>, PatternError> {
    for eta in cs {
        let members: Vec<&Ordinal> = f.iter().filter(|x| *x >= eta).collect();
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let (alpha, beta) = if members[i] < members[j] {
                    (members[i], members[j])
                } else {
                    (members[j], members[i])
                };
                let l_beta = walker.lower_trace(eta, beta)?;
                let (_, c1) = osc_columns_on(walker, alpha, beta, &l_beta)?;
                let l_alpha = walker.lower_trace(eta, alpha)?;
                let (_, c2) = osc_columns_on(walker, beta, alpha, &l_alpha)?;
                if c1 == 1 && c2 == 1 {
                    return Ok(Some((eta.clone(), alpha.clone(), beta.clone())));
                }
            }
        }
    }
    Ok(None)
}
