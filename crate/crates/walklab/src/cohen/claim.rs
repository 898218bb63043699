//! The verified one-point extension of decided oscillation data: given a
//! condition whose decided walks from a tuple `a` down to `delta` agree at
//! their trace maxima, extend it so that exactly one oscillation set (at a
//! chosen index pair) grows by exactly one new point, all others frozen.
//!
//! The search follows the constructive three-stage recipe: first redirect
//! every column's minimal trace point through a fresh planted witness,
//! then grow one column's decided sequence below `delta` to force a
//! controlled weight at a new lower-trace point `xi`, then rebalance every
//! column with weight chains meeting at a shared top point so the
//! trace-maximum agreement is restored. Every stage re-checks the decided
//! objects it claims to have produced; the found condition must pass the
//! full verifier before it is returned.

use serde::{Deserialize, Serialize};

use crate::ordinal::Ordinal;
use crate::osc::{osc_finite, FinFun};

use super::{CohenEnv, CohenError, DecidedWalk, FinCondition};

/// Instance data for the extension claim: the cut `delta`, the increasing
/// tuple `a` above it, a four-tuple `b` of designated ordinals between
/// them, and the target index pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimInstance {
    pub delta: Ordinal,
    pub a: Vec<Ordinal>,
    pub b: [Ordinal; 4],
    pub i0: usize,
    pub j0: usize,
}

impl ClaimInstance {
    fn validate(&self) -> Result<(), CohenError> {
        let k = self.a.len();
        if k < 2 {
            return Err(CohenError::InvalidInstance("tuple a needs size >= 2".into()));
        }
        if self.i0 == self.j0 {
            return Err(CohenError::InvalidInstance("i0 != j0 required".into()));
        }
        if self.i0 >= k || self.j0 >= k {
            return Err(CohenError::InvalidInstance("index pair out of range".into()));
        }
        if self.a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CohenError::InvalidInstance(
                "tuple a must be strictly increasing".into(),
            ));
        }
        if self.delta > self.a[0] {
            return Err(CohenError::InvalidInstance(
                "delta must be at most min a".into(),
            ));
        }
        if self.b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CohenError::InvalidInstance(
                "tuple b must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// One named check with its outcome and a short diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Verifier result: all five numbered requirements, literally checked
/// against decided objects.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimReport {
    pub ok: bool,
    pub checks: Vec<ClaimCheck>,
}

impl ClaimReport {
    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.ok &= ok;
        self.checks.push(ClaimCheck {
            name: name.into(),
            ok,
            detail,
        });
    }
}

fn decided_osc_set(
    env: &CohenEnv,
    p: &FinCondition,
    s_idx: &Ordinal,
    t_idx: &Ordinal,
    f: &[Ordinal],
) -> Result<Vec<Ordinal>, CohenError> {
    let mut s_vals = Vec::with_capacity(f.len());
    let mut t_vals = Vec::with_capacity(f.len());
    for nu in f {
        s_vals.push(env.decided_rho1(p, nu, s_idx)?);
        t_vals.push(env.decided_rho1(p, nu, t_idx)?);
    }
    let s = FinFun::new(f.to_vec(), s_vals).expect("lower trace is increasing");
    let t = FinFun::new(f.to_vec(), t_vals).expect("lower trace is increasing");
    let (set, _) = osc_finite(&s, &t, f).expect("columns total on f");
    Ok(set)
}

/// Checks requirements (1)-(5) of the extension claim for `q` against the
/// base condition `p_prime`.
pub fn claim_verify(
    env: &CohenEnv,
    q: &FinCondition,
    p_prime: &FinCondition,
    inst: &ClaimInstance,
) -> Result<ClaimReport, CohenError> {
    inst.validate()?;
    let k = inst.a.len();
    let mut report = ClaimReport {
        ok: true,
        checks: Vec::new(),
    };
    report.push(
        "extension",
        q.extends(p_prime),
        format!("dom {} -> {}", p_prime.len(), q.len()),
    );

    let walks_p: Vec<DecidedWalk> = inst
        .a
        .iter()
        .map(|aj| env.decided_walk(p_prime, &inst.delta, aj))
        .collect::<Result<_, _>>()?;
    let walks_q: Vec<DecidedWalk> = inst
        .a
        .iter()
        .map(|aj| env.decided_walk(q, &inst.delta, aj))
        .collect::<Result<_, _>>()?;

    // (1) every decided lower-trace point is a reached walk target from
    // every coordinate of a.
    let mut ok1 = true;
    let mut detail1 = String::new();
    for (j, wq) in walks_q.iter().enumerate() {
        for nu in &wq.lower {
            for ai in &inst.a {
                let dw = env.decided_walk(q, nu, ai)?;
                if !dw.reached(nu) {
                    ok1 = false;
                    detail1 = format!("nu={nu} not reached from a({j})-mate {ai}");
                }
            }
        }
    }
    report.push("(1) lower points reached", ok1, detail1);

    // (2) the two weight columns agree at each trace maximum.
    let mut ok2 = true;
    let mut detail2 = String::new();
    for (j, wq) in walks_q.iter().enumerate() {
        if let Some(top) = wq.lower.last() {
            let rj = env.decided_rho1(q, top, &inst.a[j])?;
            for (i, ai) in inst.a.iter().enumerate() {
                let ri = env.decided_rho1(q, top, ai)?;
                if ri != rj {
                    ok2 = false;
                    detail2 = format!("rho mismatch at max L(delta, a({j})) = {top}: a({i})={ri} vs a({j})={rj}");
                }
            }
        }
    }
    report.push("(2) trace-maximum weights agree", ok2, detail2);

    // (3) each old lower trace is a proper initial segment of the new one.
    let mut ok3 = true;
    let mut detail3 = String::new();
    for (i, (wp, wq)) in walks_p.iter().zip(&walks_q).enumerate() {
        let proper = wq.lower.len() > wp.lower.len()
            && wq.lower[..wp.lower.len()] == wp.lower[..];
        if !proper {
            ok3 = false;
            detail3 = format!(
                "L(delta, a({i})): {:?} not a proper prefix of {:?}",
                wp.lower, wq.lower
            );
        }
    }
    report.push("(3) proper initial segments", ok3, detail3);

    // (4) the minimal trace points are pairwise distinct and above b(0).
    let mins: Vec<&Ordinal> = walks_q.iter().map(|w| w.min_trace()).collect();
    let mut ok4 = true;
    let mut detail4 = String::new();
    for i in 0..k {
        if *mins[i] <= inst.b[0] {
            ok4 = false;
            detail4 = format!("min Tr(delta, a({i})) = {} not above b(0)", mins[i]);
        }
        for j in (i + 1)..k {
            if mins[i] == mins[j] {
                ok4 = false;
                detail4 = format!("min traces of a({i}) and a({j}) coincide at {}", mins[i]);
            }
        }
    }
    report.push("(4) minimal trace points distinct above b(0)", ok4, detail4);

    // (5) oscillation sets grow by exactly one new point at (i0, j0) and
    // are unchanged elsewhere.
    let mut ok5 = true;
    let mut detail5 = String::new();
    let max_lp_j0 = walks_p[inst.j0].lower.last().cloned();
    for j in 0..k {
        for i in 0..k {
            let old = decided_osc_set(env, p_prime, &inst.a[i], &inst.a[j], &walks_p[j].lower)?;
            let new = decided_osc_set(env, q, &inst.a[i], &inst.a[j], &walks_q[j].lower)?;
            if (i, j) == (inst.i0, inst.j0) {
                let grew = new.len() == old.len() + 1
                    && old.iter().all(|x| new.contains(x));
                let fresh_ok = grew && {
                    let fresh = new.iter().find(|x| !old.contains(x)).unwrap();
                    max_lp_j0.as_ref().is_none_or(|m| *fresh > *m)
                };
                if !fresh_ok {
                    ok5 = false;
                    detail5 = format!(
                        "osc at (i0,j0) did not grow by one fresh point: {old:?} -> {new:?}"
                    );
                }
            } else if new != old {
                ok5 = false;
                detail5 = format!("osc at ({i},{j}) changed: {old:?} -> {new:?}");
            }
        }
    }
    report.push("(5) one-point oscillation increment", ok5, detail5);

    Ok(report)
}

/// Search outcome: a condition passing the verifier, or the stage that ran
/// out of structure or budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ClaimSearchOutcome {
    Found { q: FinCondition },
    Starved { stage: String },
}

struct StageCtx {
    budget: u64,
}

impl StageCtx {
    fn starve(&self, stage: &str) -> ClaimSearchOutcome {
        ClaimSearchOutcome::Starved {
            stage: stage.to_string(),
        }
    }
}

/// `xi + w`: the least limit strictly above `xi`.
fn next_limit_above(xi: &Ordinal) -> Ordinal {
    let mut terms: Vec<(u32, u64)> = xi
        .terms()
        .iter()
        .copied()
        .filter(|&(e, _)| e >= 1)
        .collect();
    match terms.last_mut() {
        Some((1, c)) => *c += 1,
        _ => terms.push((1, 1)),
    }
    Ordinal::from_terms(terms).expect("canonical by construction")
}

/// Runs the three-stage extension recipe. Preconditions (the claim
/// hypotheses for `p_prime`) are checked and reported as starvation with a
/// diagnostic rather than panicking; a found condition always passes
/// [`claim_verify`].
pub fn claim_search(
    env: &CohenEnv,
    p_prime: &FinCondition,
    inst: &ClaimInstance,
    budget: u64,
) -> Result<ClaimSearchOutcome, CohenError> {
    inst.validate()?;
    let k = inst.a.len();
    let mut ctx = StageCtx { budget };

    // Hypothesis checks.
    if !CohenEnv::is_designated(&inst.delta) {
        return Ok(ctx.starve("hypotheses: delta is not a designated (double-limit) ordinal"));
    }
    if inst.b.iter().any(|x| !CohenEnv::is_designated(x)) {
        return Ok(ctx.starve("hypotheses: b must consist of designated ordinals"));
    }
    if inst.b[0] < inst.delta {
        return Ok(ctx.starve("hypotheses: b must lie above delta"));
    }
    if inst.b[3] >= *env.bound() || inst.a.last().unwrap() >= env.bound() {
        return Ok(ctx.starve("hypotheses: instance exceeds the environment bound"));
    }
    let walks_p: Vec<DecidedWalk> = inst
        .a
        .iter()
        .map(|aj| env.decided_walk(p_prime, &inst.delta, aj))
        .collect::<Result<_, _>>()?;
    let beta_prime: Vec<Ordinal> = walks_p.iter().map(|w| w.min_trace().clone()).collect();
    for (i, bp) in beta_prime.iter().enumerate() {
        if *bp <= inst.b[3] {
            return Ok(ctx.starve(&format!(
                "hypotheses: min Tr(delta, a({i})) = {bp} not above b(3)"
            )));
        }
        if !bp.is_limit() {
            return Ok(ctx.starve(&format!(
                "hypotheses: min Tr(delta, a({i})) = {bp} is a successor; its column cannot grow"
            )));
        }
        for bq in beta_prime.iter().take(i) {
            if bq == bp {
                return Ok(ctx.starve("hypotheses: minimal trace points not pairwise distinct"));
            }
        }
    }
    // (1)-(2) for p_prime. The one-point increment registers against the
    // predecessor of the new point in the lower trace, so each decided
    // lower trace must already be nonempty; an empty base condition is
    // bootstrapped by `claim_prepare` first.
    for (j, wp) in walks_p.iter().enumerate() {
        if wp.lower.is_empty() {
            return Ok(ctx.starve(&format!(
                "hypotheses: L^p'(delta, a({j})) is empty; run claim_prepare first"
            )));
        }
        for nu in &wp.lower {
            for ai in &inst.a {
                if !env.decided_walk(p_prime, nu, ai)?.reached(nu) {
                    return Ok(ctx.starve(&format!(
                        "hypotheses: (1) fails for p' at nu={nu}, a-mate {ai}"
                    )));
                }
            }
        }
        if let Some(top) = wp.lower.last() {
            let rj = env.decided_rho1(p_prime, top, &inst.a[j])?;
            for ai in &inst.a {
                if env.decided_rho1(p_prime, top, ai)? != rj {
                    return Ok(ctx.starve("hypotheses: (2) fails for p'"));
                }
            }
        }
    }

    // Stage parameters.
    // Weight ceiling: strictly above every decided maximal weight in
    // play, so freshly built chains dominate all existing step weights.
    // Positions are controlled separately by the condition domain.
    let cp_bp: Vec<Vec<Ordinal>> = beta_prime
        .iter()
        .map(|bp| env.cp_seq(p_prime, bp))
        .collect::<Result<_, _>>()?;
    let mut n0 = 0u64;
    for c in &cp_bp {
        n0 = n0.max(c.len() as u64);
    }
    for wp in &walks_p {
        n0 = n0.max(wp.rho1);
    }
    for wp in &walks_p {
        for nu in &wp.lower {
            for ai in &inst.a {
                n0 = n0.max(env.decided_rho1(p_prime, nu, ai)?);
            }
        }
    }
    n0 += 1;
    let pos_floor = p_prime.len().saturating_sub(1);

    // Stage 1: redirect every minimal trace point through a planted
    // witness in (b(2), b(3)).
    let mut betas: Vec<Ordinal> = Vec::new();
    let mut q0_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        let pos_gt = q0_positions.iter().copied().max().unwrap_or(0).max(pos_floor);
        let found = env.find_planted(
            &beta_prime[i],
            &inst.b[3],
            &inst.b[2],
            &inst.b[3],
            pos_gt,
            &betas,
            &mut ctx.budget,
        );
        match found {
            Some((pos, gamma)) => {
                q0_positions.push(pos);
                betas.push(gamma);
            }
            None => {
                return Ok(ctx.starve(&format!(
                    "stage q0: no planted witness for b(3) in column of min Tr(delta, a({i}))"
                )))
            }
        }
    }
    let q0 = p_prime.extend_with(&q0_positions, 0)?;
    for i in 0..k {
        let c = env.cp_seq(&q0, &beta_prime[i])?;
        let mut expect = cp_bp[i].clone();
        expect.push(betas[i].clone());
        if c != expect {
            return Ok(ctx.starve("stage q0: decided sequence check (6.1) failed"));
        }
        if !env.cp_seq(&q0, &betas[i])?.is_empty() {
            return Ok(ctx.starve("stage q0: fresh column not empty (6.2)"));
        }
        let dw = env.decided_walk(&q0, &inst.delta, &inst.a[i])?;
        let mut expect_tr = walks_p[i].trace.clone();
        expect_tr.push(betas[i].clone());
        if dw.trace != expect_tr || dw.lower != walks_p[i].lower {
            return Ok(ctx.starve("stage q0: trace extension check (6.3) failed"));
        }
    }

    // Stage 2: grow the j0 column below delta, creating the new lower
    // trace point xi with a controlled weight.
    let mut n1 = n0;
    for i in 0..k {
        n1 = n1.max(env.cp_seq(&q0, &beta_prime[i])?.len() as u64);
        n1 = n1.max(env.decided_walk(&q0, &inst.delta, &inst.a[i])?.rho1);
    }
    n1 += 1;
    let mut chain_lb = Ordinal::zero();
    for wp in &walks_p {
        if let Some(top) = wp.lower.last() {
            if *top > chain_lb {
                chain_lb = top.clone();
            }
        }
    }
    let col_j0 = &betas[inst.j0];
    let chain = match env.collect_chain_after(
        col_j0,
        n1 + 1,
        &chain_lb,
        &inst.delta,
        q0.len(),
        &mut ctx.budget,
    ) {
        Some(c) => c,
        None => return Ok(ctx.starve("stage q1: xi chain below delta")),
    };
    let xi = chain.last().unwrap().1.clone();
    let gamma_prime = match env.find_planted(
        col_j0,
        &inst.b[2],
        &inst.b[1],
        &inst.b[2],
        chain.last().unwrap().0,
        &[],
        &mut ctx.budget,
    ) {
        Some(pg) => pg,
        None => return Ok(ctx.starve("stage q1: no planted witness for b(2)")),
    };
    let mut q1_positions: Vec<u64> = chain.iter().map(|(p, _)| *p).collect();
    q1_positions.push(gamma_prime.0);
    let q1 = q0.extend_with(&q1_positions, 0)?;
    {
        let mut expect: Vec<Ordinal> = chain.iter().map(|(_, v)| v.clone()).collect();
        expect.push(gamma_prime.1.clone());
        if env.cp_seq(&q1, col_j0)? != expect {
            return Ok(ctx.starve("stage q1: decided sequence check (7.1) failed"));
        }
        for (i, beta) in betas.iter().enumerate() {
            if i != inst.j0 && !env.cp_seq(&q1, beta)?.is_empty() {
                return Ok(ctx.starve("stage q1: sibling column disturbed (7.1)"));
            }
        }
        if !env.cp_seq(&q1, &gamma_prime.1)?.is_empty() {
            return Ok(ctx.starve("stage q1: gamma' column not empty (7.1)"));
        }
        let dw = env.decided_walk(&q1, &inst.delta, &inst.a[inst.j0])?;
        let mut expect_lower = walks_p[inst.j0].lower.clone();
        expect_lower.push(xi.clone());
        if dw.lower != expect_lower {
            return Ok(ctx.starve("stage q1: lower trace check (7.3) failed"));
        }
        let wxi = env.decided_walk(&q1, &xi, &inst.a[inst.j0])?;
        if !wxi.reached(&xi) || wxi.rho1 != n1 {
            return Ok(ctx.starve("stage q1: weight check (7.4) failed"));
        }
    }

    // Stage 3: rebalance all columns with weight chains meeting at a
    // shared top point, then freeze each column with a final witness in
    // (b(0), b(1)).
    let mut n2 = n1 + 2;
    for (i, beta) in betas.iter().enumerate() {
        let col = if i == inst.j0 { &gamma_prime.1 } else { beta };
        n2 = n2.max(env.cp_seq(&q1, col)?.len() as u64);
    }
    n2 += 1;
    let xi_plus = next_limit_above(&xi);
    if xi_plus >= inst.delta {
        return Ok(ctx.starve("stage q: no room above xi below delta"));
    }
    // Per-column chains: (below-xi count, one mid point, above count).
    let mut col_positions: Vec<Vec<u64>> = vec![Vec::new(); k];
    let mut col_members: Vec<Vec<Ordinal>> = vec![Vec::new(); k];
    let mut last_vals: Vec<Ordinal> = Vec::new();
    for i in 0..k {
        let col = if i == inst.j0 { &gamma_prime.1 } else { &betas[i] };
        let (low_count, high_count) = if i == inst.j0 {
            (0, n2 - 1)
        } else if i == inst.i0 {
            (n1 + 1, n2 - n1 - 3)
        } else {
            (n1, n2 - n1 - 2)
        };
        let mut parts: Vec<(u64, Ordinal)> = Vec::new();
        if low_count > 0 {
            match env.collect_chain_after(col, low_count, &chain_lb, &xi, q1.len(), &mut ctx.budget)
            {
                Some(c) => parts.extend(c),
                None => return Ok(ctx.starve("stage q: low chain below xi")),
            }
        }
        if i != inst.j0 {
            match env.collect_chain_after(col, 1, &xi, &xi_plus, q1.len(), &mut ctx.budget) {
                Some(c) => parts.extend(c),
                None => return Ok(ctx.starve("stage q: mid point above xi")),
            }
        }
        if high_count > 0 {
            match env.collect_chain_after(col, high_count, &xi_plus, &inst.delta, q1.len(), &mut ctx.budget)
            {
                Some(c) => parts.extend(c),
                None => return Ok(ctx.starve("stage q: high chain below delta")),
            }
        }
        last_vals.push(parts.last().map(|(_, v)| v.clone()).unwrap_or_else(|| xi_plus.clone()));
        col_positions[i] = parts.iter().map(|(p, _)| *p).collect();
        col_members[i] = parts.into_iter().map(|(_, v)| v).collect();
    }
    // Shared top point tau: a value no rebalanced column has assigned
    // yet, so every column meets it past its chain.
    let mut tau_floor = xi_plus.clone();
    for v in &last_vals {
        if *v > tau_floor {
            tau_floor = v.clone();
        }
    }
    let tau_cols: Vec<&Ordinal> = (0..k)
        .map(|i| if i == inst.j0 { &gamma_prime.1 } else { &betas[i] })
        .collect();
    let tau_val = match env.find_fresh_common_value(&tau_cols, &tau_floor, &inst.delta, &mut ctx.budget)
    {
        Some(v) => v,
        None => return Ok(ctx.starve("stage q: shared top point candidates")),
    };
    let mut tau_poss = vec![0u64; k];
    for i in 0..k {
        let after = col_positions[i].last().copied().unwrap_or(q1.len());
        match env.find_value_at_pos_above(tau_cols[i], &tau_val, after, &mut ctx.budget) {
            Some(pos) => tau_poss[i] = pos,
            None => return Ok(ctx.starve("stage q: shared top point did not fit a column")),
        }
    }
    // Final planted witnesses in (b(0), b(1)).
    let mut gammas: Vec<Ordinal> = Vec::new();
    let mut gamma_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        let col = if i == inst.j0 { &gamma_prime.1 } else { &betas[i] };
        match env.find_planted(
            col,
            &inst.b[1],
            &inst.b[0],
            &inst.b[1],
            tau_poss[i],
            &gammas,
            &mut ctx.budget,
        ) {
            Some((pos, g)) => {
                gammas.push(g);
                gamma_positions.push(pos);
            }
            None => {
                return Ok(ctx.starve(&format!(
                    "stage q: no planted witness for b(1) in column {i}"
                )))
            }
        }
    }
    let mut q_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        q_positions.extend(&col_positions[i]);
        q_positions.push(tau_poss[i]);
        q_positions.push(gamma_positions[i]);
    }
    let q = q1.extend_with(&q_positions, 0)?;

    // Stage assertions (8.x). Every rebalanced column was empty under q1,
    // so its decided sequence is exactly chain, shared point, witness.
    for i in 0..k {
        let col = if i == inst.j0 { &gamma_prime.1 } else { &betas[i] };
        let mut expect = col_members[i].clone();
        expect.push(tau_val.clone());
        expect.push(gammas[i].clone());
        if env.cp_seq(&q, col)? != expect {
            return Ok(ctx.starve("stage q: decided sequence check (8.1) failed"));
        }
        if !env.cp_seq(&q, &gammas[i])?.is_empty() {
            return Ok(ctx.starve("stage q: final witness column not empty (8.1)"));
        }
        let w_tau = env.decided_walk(&q, &tau_val, &inst.a[i])?;
        if !w_tau.reached(&tau_val) || w_tau.rho1 != n2 - 1 {
            return Ok(ctx.starve("stage q: shared-point weight check (8.3)/(8.4) failed"));
        }
        let w_xi = env.decided_walk(&q, &xi, &inst.a[i])?;
        let expect_rho = if i == inst.i0 { n1 + 1 } else { n1 };
        if !w_xi.reached(&xi) || w_xi.rho1 != expect_rho {
            return Ok(ctx.starve("stage q: xi weight check (8.5) failed"));
        }
    }

    // The found condition must pass the full verifier.
    let report = claim_verify(env, &q, p_prime, inst)?;
    if report.ok {
        Ok(ClaimSearchOutcome::Found { q })
    } else {
        let failing = report
            .checks
            .iter()
            .find(|c| !c.ok)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .unwrap_or_default();
        Ok(ctx.starve(&format!("final verification failed: {failing}")))
    }
}

/// Bootstraps a base condition for the extension claim: extends `p` so
/// that every decided lower trace `L(delta, a(i))` is nonempty and ends at
/// one shared point where all weight columns agree. The quadruple `b`
/// plays the same role as in the claim; afterwards the minimal trace
/// points sit in `(b(0), b(1))`, so later claim applications must use
/// quadruples below `b(0)`.
pub fn claim_prepare(
    env: &CohenEnv,
    p: &FinCondition,
    delta: &Ordinal,
    a: &[Ordinal],
    b: &[Ordinal; 4],
    budget: u64,
) -> Result<ClaimSearchOutcome, CohenError> {
    let k = a.len();
    let mut ctx = StageCtx { budget };
    if k == 0 || a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CohenError::InvalidInstance(
            "tuple a must be nonempty and strictly increasing".into(),
        ));
    }
    if delta > &a[0] {
        return Err(CohenError::InvalidInstance("delta must be at most min a".into()));
    }
    if !CohenEnv::is_designated(delta) {
        return Ok(ctx.starve("prepare: delta is not a designated (double-limit) ordinal"));
    }
    if b.iter().any(|x| !CohenEnv::is_designated(x)) || b.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(ctx.starve("prepare: b must be increasing designated ordinals"));
    }
    if b[0] < *delta || b[3] >= *env.bound() || a.last().unwrap() >= env.bound() {
        return Ok(ctx.starve("prepare: instance does not fit between delta and the bound"));
    }

    let walks_p: Vec<DecidedWalk> = a
        .iter()
        .map(|aj| env.decided_walk(p, delta, aj))
        .collect::<Result<_, _>>()?;
    let beta_prime: Vec<Ordinal> = walks_p.iter().map(|w| w.min_trace().clone()).collect();
    for (i, bp) in beta_prime.iter().enumerate() {
        if *bp <= b[3] {
            return Ok(ctx.starve(&format!(
                "prepare: min Tr(delta, a({i})) = {bp} not above b(3)"
            )));
        }
        if !bp.is_limit() {
            return Ok(ctx.starve("prepare: a minimal trace point is a successor"));
        }
        for bq in beta_prime.iter().take(i) {
            if bq == bp {
                return Ok(ctx.starve("prepare: minimal trace points not pairwise distinct"));
            }
        }
    }

    let mut n0 = 0u64;
    for bp in &beta_prime {
        n0 = n0.max(env.cp_seq(p, bp)?.len() as u64);
    }
    for wp in &walks_p {
        n0 = n0.max(wp.rho1);
        for nu in &wp.lower {
            for ai in a {
                n0 = n0.max(env.decided_rho1(p, nu, ai)?);
            }
        }
    }
    n0 += 1;
    let pos_floor = p.len().saturating_sub(1);

    // Redirect stage, as in the claim.
    let mut betas: Vec<Ordinal> = Vec::new();
    let mut q0_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        let pos_gt = q0_positions.iter().copied().max().unwrap_or(0).max(pos_floor);
        match env.find_planted(&beta_prime[i], &b[3], &b[2], &b[3], pos_gt, &betas, &mut ctx.budget) {
            Some((pos, gamma)) => {
                q0_positions.push(pos);
                betas.push(gamma);
            }
            None => return Ok(ctx.starve("prepare: no planted witness for b(3)")),
        }
    }
    let q0 = p.extend_with(&q0_positions, 0)?;

    // Rebalance stage without an increment point: equal-length chains
    // meeting at one shared top point, then a final witness per column.
    let n_star = n0 + 2;
    let mut chain_lb = Ordinal::zero();
    for wp in &walks_p {
        if let Some(top) = wp.lower.last() {
            if *top > chain_lb {
                chain_lb = top.clone();
            }
        }
    }
    let mut col_positions: Vec<Vec<u64>> = vec![Vec::new(); k];
    let mut col_members: Vec<Vec<Ordinal>> = vec![Vec::new(); k];
    let mut last_vals: Vec<Ordinal> = Vec::new();
    for i in 0..k {
        match env.collect_chain_after(&betas[i], n_star - 1, &chain_lb, delta, q0.len(), &mut ctx.budget)
        {
            Some(c) => {
                last_vals.push(c.last().unwrap().1.clone());
                col_positions[i] = c.iter().map(|(p, _)| *p).collect();
                col_members[i] = c.into_iter().map(|(_, v)| v).collect();
            }
            None => return Ok(ctx.starve("prepare: weight chain below delta")),
        }
    }
    let mut tau_floor = chain_lb.clone();
    for v in &last_vals {
        if *v > tau_floor {
            tau_floor = v.clone();
        }
    }
    let tau_cols: Vec<&Ordinal> = betas.iter().collect();
    let tau_val = match env.find_fresh_common_value(&tau_cols, &tau_floor, delta, &mut ctx.budget) {
        Some(v) => v,
        None => return Ok(ctx.starve("prepare: shared top point candidates")),
    };
    let mut tau_poss = vec![0u64; k];
    for (i, beta) in betas.iter().enumerate() {
        let after = col_positions[i].last().copied().unwrap_or(q0.len());
        match env.find_value_at_pos_above(beta, &tau_val, after, &mut ctx.budget) {
            Some(pos) => tau_poss[i] = pos,
            None => return Ok(ctx.starve("prepare: shared top point did not fit a column")),
        }
    }
    let mut gammas: Vec<Ordinal> = Vec::new();
    let mut gamma_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        match env.find_planted(&betas[i], &b[1], &b[0], &b[1], tau_poss[i], &gammas, &mut ctx.budget)
        {
            Some((pos, g)) => {
                gammas.push(g);
                gamma_positions.push(pos);
            }
            None => return Ok(ctx.starve("prepare: no planted witness for b(1)")),
        }
    }
    let mut q_positions: Vec<u64> = Vec::new();
    for i in 0..k {
        q_positions.extend(&col_positions[i]);
        q_positions.push(tau_poss[i]);
        q_positions.push(gamma_positions[i]);
    }
    let q = q0.extend_with(&q_positions, 0)?;

    // Exit checks: nonempty lower traces extending the old ones, shared
    // maximum, agreeing weights, reached points.
    for (i, ai) in a.iter().enumerate() {
        let dw = env.decided_walk(&q, delta, ai)?;
        let mut expect_lower = walks_p[i].lower.clone();
        expect_lower.push(tau_val.clone());
        if dw.lower != expect_lower {
            return Ok(ctx.starve("prepare: lower trace did not extend by the shared point"));
        }
        let w_tau = env.decided_walk(&q, &tau_val, ai)?;
        if !w_tau.reached(&tau_val) || w_tau.rho1 != n_star - 1 {
            return Ok(ctx.starve("prepare: shared-point weight check failed"));
        }
        for nu in &dw.lower {
            for am in a {
                if !env.decided_walk(&q, nu, am)?.reached(nu) {
                    return Ok(ctx.starve("prepare: a lower point is not reached"));
                }
            }
        }
    }
    Ok(ClaimSearchOutcome::Found { q })
}
