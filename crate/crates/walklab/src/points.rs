//! Point functions of the walk lab: the damped-sine kernel `f`, the
//! piecewise-linear complex map `g`, the vector-space points `w_beta` and
//! field points `v_beta`, finite combinations of them, and the numeric
//! non-reality spot check.
//!
//! Each point function is a three-case formula over the ordinal comparison
//! of the coordinate and the index; below the diagonal the value composes
//! the oscillation count with the indexed reals through `frac` and `f` (or
//! `g`). Numerical discipline: equality of reals is never tested, open
//! intervals are shrunk by the scalar pad, and "inconclusive" is a
//! first-class outcome.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::osc::{osc_count, OscError};
use crate::real::{in_open_interval, Real};
use crate::theta::{ThetaError, ThetaFamily};
use crate::walks::Walker;

#[derive(Debug, Error)]
pub enum PointError {
    #[error("f undefined at 0")]
    FUndefinedAtZero,
    #[error("f unstable within pad of 0 (|x| too small at working precision)")]
    FNearPole,
    #[error("g requires x in (0, 1], got {0}")]
    GOutOfDomain(String),
    #[error("fractional part vanished at working precision (probability-zero hit)")]
    FracAtPole,
    #[error("denominator vanishes numerically")]
    DenominatorVanishes,
    #[error("linear combination requires nonzero coefficients")]
    ZeroCoefficient,
    #[error("coefficient/index length mismatch: {coeffs} vs {betas}")]
    LengthMismatch { coeffs: usize, betas: usize },
    #[error("P/Q is constant; non-constant rational function required")]
    ConstantRationalFunction,
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Osc(#[from] OscError),
}

/// Complex number over a [`Real`] scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpx<T: Real> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cpx<T> {
    pub fn real(re: T) -> Self {
        Cpx { re, im: T::zero() }
    }

    pub fn new(re: T, im: T) -> Self {
        Cpx { re, im }
    }

    pub fn zero() -> Self {
        Cpx {
            re: T::zero(),
            im: T::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Cpx {
            re: self.re.clone() + o.re.clone(),
            im: self.im.clone() + o.im.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Cpx {
            re: self.re.clone() - o.re.clone(),
            im: self.im.clone() - o.im.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Cpx {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Cpx {
            re: self.re.clone() * s.clone(),
            im: self.im.clone() * s.clone(),
        }
    }

    /// Squared modulus.
    pub fn norm2(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// Division; caller guards against numerically vanishing denominator.
    pub fn div(&self, o: &Self) -> Self {
        let n2 = o.norm2();
        let conj = Cpx {
            re: o.re.clone(),
            im: -o.im.clone(),
        };
        let num = self.mul(&conj);
        Cpx {
            re: num.re.div(&n2),
            im: num.im.div(&n2),
        }
    }
}

/// `f(x) = (1/x) sin(1/x)`, the kernel of the vector-space points.
pub fn f_eval<T: Real>(x: &T) -> Result<T, PointError> {
    if x.is_zero() {
        return Err(PointError::FUndefinedAtZero);
    }
    if x.abs() < T::pad() {
        return Err(PointError::FNearPole);
    }
    let u = x.recip();
    Ok(u.clone() * u.sin())
}

/// Exact Gaussian rational, the coefficient domain of `g`'s breakpoints and
/// of the polynomial combinations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRational {
            re: BigRational::from(BigInt::from(re)),
            im: BigRational::from(BigInt::from(im)),
        }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        GaussRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GaussRational {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn to_cpx<T: Real>(&self) -> Cpx<T> {
        Cpx {
            re: T::from_big_ratio(self.re.numer(), self.re.denom()),
            im: T::from_big_ratio(self.im.numer(), self.im.denom()),
        }
    }
}

fn cunpair(z: u64) -> (u64, u64) {
    let mut s = ((8.0 * z as f64 + 1.0).sqrt() as u64).saturating_sub(1) / 2;
    while (s + 1) * (s + 2) / 2 <= z {
        s += 1;
    }
    while s * (s + 1) / 2 > z {
        s -= 1;
    }
    let b = z - s * (s + 1) / 2;
    (s - b, b)
}

fn zigzag(n: u64) -> BigInt {
    // 0, 1, -1, 2, -2, ...
    if n.is_multiple_of(2) {
        -BigInt::from(n / 2)
    } else {
        BigInt::from(n / 2 + 1)
    }
}

/// The `m`-th rational in a fixed surjective enumeration of the rationals.
fn rational_at(m: u64) -> BigRational {
    let (a, b) = cunpair(m);
    BigRational::new(zigzag(a), BigInt::from(b + 1))
}

/// The `k`-th Gaussian rational in a fixed surjective enumeration.
pub fn gauss_rational_at(k: u64) -> GaussRational {
    let (a, b) = cunpair(k);
    GaussRational::new(rational_at(a), rational_at(b))
}

/// The piecewise-linear map from `(0, 1]` to the complex plane: identity on
/// `[1/3, 1]`, linear on each `[1/(n+1), 1/n]`, with Gaussian-rational
/// breakpoint values that cycle through every Gaussian rational infinitely
/// often (so the image of every `(0, 1/n]` is dense in the plane).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PiecewiseG {}

impl PiecewiseG {
    pub fn standard() -> Self {
        PiecewiseG {}
    }

    /// Breakpoint value `g(1/n)` for `n >= 3`; `g(1/3) = 1/3` keeps
    /// continuity with the identity piece.
    pub fn breakpoint(&self, n: u64) -> GaussRational {
        assert!(n >= 3, "breakpoints start at n = 3");
        if n == 3 {
            let third = BigRational::new(BigInt::one(), BigInt::from(3));
            return GaussRational::new(third, BigRational::zero());
        }
        // Diagonal cycling: value k is used at infinitely many n.
        let (_rep, k) = cunpair(n - 4);
        gauss_rational_at(k)
    }

    /// Exact evaluation at a rational point of `(0, 1]`.
    pub fn eval_rational(&self, x: &BigRational) -> Result<GaussRational, PointError> {
        if x <= &BigRational::zero() || x > &BigRational::one() {
            return Err(PointError::GOutOfDomain(x.to_string()));
        }
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        if *x >= third {
            return Ok(GaussRational::new(x.clone(), BigRational::zero()));
        }
        // x in [1/(n+1), 1/n] with n = floor(1/x) >= 3.
        let inv = x.recip();
        let n = inv.floor().to_integer();
        let a = BigRational::new(BigInt::one(), &n + 1);
        let b = BigRational::new(BigInt::one(), n.clone());
        let t = (x - &a) / (&b - &a);
        let n_u64 = u64::try_from(n.clone()).expect("desk-scale breakpoint index");
        let ga = self.breakpoint(n_u64 + 1);
        let gb = self.breakpoint(n_u64);
        Ok(ga.add(&gb.sub(&ga).scale(&t)))
    }

    /// Numeric evaluation. Near a breakpoint both adjacent segments agree
    /// to within the pad, so the segment choice from the rounded
    /// reciprocal is harmless.
    pub fn eval<T: Real>(&self, x: &T) -> Result<Cpx<T>, PointError> {
        if *x <= T::zero() || *x > T::one() {
            return Err(PointError::GOutOfDomain(x.to_decimal(8)));
        }
        let third = T::from_ratio(1, 3);
        if *x >= third {
            return Ok(Cpx::real(x.clone()));
        }
        let n: u64 = u64::try_from(x.recip().floor_int()).expect("desk-scale index");
        let n = n.max(3);
        let a = T::from_ratio(1, (n + 1) as i64);
        let b = T::from_ratio(1, n as i64);
        let t = (x.clone() - a.clone()).div(&(b - a));
        let ga: Cpx<T> = self.breakpoint(n + 1).to_cpx();
        let gb: Cpx<T> = self.breakpoint(n).to_cpx();
        Ok(ga.add(&gb.sub(&ga).scale(&t)))
    }
}

/// Which case of the three-case point formula applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Below,
    Diagonal,
    Above,
}

/// A point evaluation together with its defining case.
#[derive(Debug, Clone)]
pub struct PointValue<T: Real> {
    pub value: Cpx<T>,
    pub case: CaseTag,
}

/// The argument `frac(theta_alpha * osc(alpha, beta) + theta_beta)` shared
/// by both point families below the diagonal.
fn below_argument<T: Real>(
    fam: &ThetaFamily<T>,
    walker: &Walker,
    beta: &Ordinal,
    alpha: &Ordinal,
) -> Result<T, PointError> {
    let c = osc_count(walker, alpha, beta)?;
    let arg = fam.theta(alpha).mul_nat(c) + fam.theta(beta);
    let fr = arg.fract();
    if fr < T::pad() {
        return Err(PointError::FracAtPole);
    }
    Ok(fr)
}

/// Vector-space point `w_beta(alpha)`.
pub fn w_point<T: Real>(
    fam: &ThetaFamily<T>,
    walker: &Walker,
    beta: &Ordinal,
    alpha: &Ordinal,
) -> Result<PointValue<T>, PointError> {
    match alpha.cmp(beta) {
        std::cmp::Ordering::Greater => Ok(PointValue {
            value: Cpx::zero(),
            case: CaseTag::Above,
        }),
        std::cmp::Ordering::Equal => Ok(PointValue {
            value: Cpx::real(fam.theta(beta)),
            case: CaseTag::Diagonal,
        }),
        std::cmp::Ordering::Less => {
            let x = below_argument(fam, walker, beta, alpha)?;
            Ok(PointValue {
                value: Cpx::real(f_eval(&x)?),
                case: CaseTag::Below,
            })
        }
    }
}

/// Field point `v_beta(alpha)`; the family must carry pairs.
pub fn v_point<T: Real>(
    fam: &ThetaFamily<T>,
    g: &PiecewiseG,
    walker: &Walker,
    beta: &Ordinal,
    alpha: &Ordinal,
) -> Result<PointValue<T>, PointError> {
    match alpha.cmp(beta) {
        std::cmp::Ordering::Greater => Ok(PointValue {
            value: Cpx::new(fam.theta(beta), fam.theta_prime(beta)?),
            case: CaseTag::Above,
        }),
        std::cmp::Ordering::Equal => Ok(PointValue {
            value: Cpx::real(fam.theta(beta)),
            case: CaseTag::Diagonal,
        }),
        std::cmp::Ordering::Less => {
            let x = below_argument(fam, walker, beta, alpha)?;
            Ok(PointValue {
                value: g.eval(&x)?,
                case: CaseTag::Below,
            })
        }
    }
}

/// Multivariate polynomial with Gaussian-rational coefficients; one
/// exponent entry per variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<(GaussRational, Vec<u32>)>,
}

impl Poly {
    pub fn constant(c: GaussRational) -> Self {
        Poly {
            terms: vec![(c, Vec::new())],
        }
    }

    /// The single variable `z_i`.
    pub fn var(i: usize) -> Self {
        let mut exps = vec![0; i + 1];
        exps[i] = 1;
        Poly {
            terms: vec![(GaussRational::from_ints(1, 0), exps)],
        }
    }

    pub fn eval<T: Real>(&self, args: &[Cpx<T>]) -> Cpx<T> {
        let mut acc = Cpx::zero();
        for (coeff, exps) in &self.terms {
            let mut term: Cpx<T> = coeff.to_cpx();
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&args[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Exact symbolic evaluation at Gaussian-rational arguments; used by
    /// tests as an independent oracle.
    pub fn eval_exact(&self, args: &[GaussRational]) -> GaussRational {
        let mut acc = GaussRational::zero();
        for (coeff, exps) in &self.terms {
            let mut term = coeff.clone();
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&args[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Canonical monomial map (merged duplicate exponent vectors, zero
    /// coefficients dropped, exponent vectors trimmed).
    fn canonical(&self) -> Vec<(Vec<u32>, GaussRational)> {
        let mut map: std::collections::BTreeMap<Vec<u32>, GaussRational> =
            std::collections::BTreeMap::new();
        for (c, exps) in &self.terms {
            let mut e = exps.clone();
            while e.last() == Some(&0) {
                e.pop();
            }
            let entry = map.entry(e).or_insert_with(GaussRational::zero);
            *entry = entry.add(c);
        }
        map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn is_zero_poly(&self) -> bool {
        self.canonical().is_empty()
    }
}

/// Exact check that `p/q` is a constant rational function, i.e. the
/// canonical coefficient vectors are proportional over the Gaussian
/// rationals (or `p` is identically zero).
pub fn rational_function_is_constant(p: &Poly, q: &Poly) -> bool {
    let cp = p.canonical();
    let cq = q.canonical();
    if cp.is_empty() || cq.is_empty() {
        return true;
    }
    // Cross-proportionality over the union of monomials: p_i q_j = p_j q_i.
    let mut all: Vec<&Vec<u32>> = Vec::new();
    for (e, _) in cp.iter().chain(cq.iter()) {
        if !all.contains(&e) {
            all.push(e);
        }
    }
    let find = |canon: &[(Vec<u32>, GaussRational)], e: &Vec<u32>| -> GaussRational {
        canon
            .iter()
            .find(|(ee, _)| ee == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussRational::zero)
    };
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let (pi, qi) = (find(&cp, all[i]), find(&cq, all[i]));
            let (pj, qj) = (find(&cp, all[j]), find(&cq, all[j]));
            if pi.mul(&qj) != pj.mul(&qi) {
                return false;
            }
        }
    }
    true
}

/// A finite combination of point functions.
pub enum Combo {
    /// `sum_j r_j * w_{beta_j}(alpha)` with nonzero rational coefficients.
    Linear { coeffs: Vec<BigRational> },
    /// `P(v_{beta_0}(alpha), ...) / Q(...)`.
    RationalFn { p: Poly, q: Poly },
}

/// Evaluates a combination at coordinate `alpha`.
pub fn combo_eval<T: Real>(
    fam: &ThetaFamily<T>,
    g: &PiecewiseG,
    walker: &Walker,
    combo: &Combo,
    betas: &[Ordinal],
    alpha: &Ordinal,
) -> Result<Cpx<T>, PointError> {
    match combo {
        Combo::Linear { coeffs } => {
            if coeffs.len() != betas.len() {
                return Err(PointError::LengthMismatch {
                    coeffs: coeffs.len(),
                    betas: betas.len(),
                });
            }
            if coeffs.iter().any(|c| c.is_zero()) {
                return Err(PointError::ZeroCoefficient);
            }
            let mut acc = Cpx::zero();
            for (r, beta) in coeffs.iter().zip(betas) {
                let wv = w_point(fam, walker, beta, alpha)?;
                let r_t = T::from_big_ratio(r.numer(), r.denom());
                acc = acc.add(&wv.value.scale(&r_t));
            }
            Ok(acc)
        }
        Combo::RationalFn { p, q } => {
            let vs: Vec<Cpx<T>> = betas
                .iter()
                .map(|b| v_point(fam, g, walker, b, alpha).map(|pv| pv.value))
                .collect::<Result<_, _>>()?;
            let qv = q.eval(&vs);
            if qv.norm2() < T::pad() {
                return Err(PointError::DenominatorVanishes);
            }
            Ok(p.eval(&vs).div(&qv))
        }
    }
}

/// Outcome of the numeric non-reality spot check.
#[derive(Debug, Clone)]
pub enum NrOutcome<T: Real> {
    /// Imaginary part exceeded the tolerance; the margin is `|Im|`.
    Nonreal { margin: T },
    /// Nothing can be asserted: the evaluation stayed within tolerance of
    /// the real line or the denominator vanished numerically. Reality is
    /// never asserted.
    Inconclusive { reason: String },
}

/// Evaluates `P/Q` at the paired points `theta_{b(j)} + theta'_{b(j)} i`
/// and reports whether the imaginary part is numerically bounded away from
/// zero. Requires `p/q` non-constant (checked exactly).
pub fn nr_check<T: Real>(
    fam: &ThetaFamily<T>,
    b: &[Ordinal],
    p: &Poly,
    q: &Poly,
    tol: &T,
) -> Result<NrOutcome<T>, PointError> {
    if rational_function_is_constant(p, q) {
        return Err(PointError::ConstantRationalFunction);
    }
    let args: Vec<Cpx<T>> = b
        .iter()
        .map(|beta| {
            Ok(Cpx::new(
                fam.theta(beta),
                fam.theta_prime(beta)?,
            ))
        })
        .collect::<Result<_, PointError>>()?;
    let qv = q.eval(&args);
    if qv.norm2() < T::pad() {
        return Ok(NrOutcome::Inconclusive {
            reason: "denominator vanishes numerically".into(),
        });
    }
    let val = p.eval(&args).div(&qv);
    let margin = val.im.abs();
    if margin > tol.clone() {
        Ok(NrOutcome::Nonreal { margin })
    } else {
        Ok(NrOutcome::Inconclusive {
            reason: format!("|Im| = {} within tolerance", margin.to_decimal(12)),
        })
    }
}

/// Which separation inequality to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationMode {
    /// `w_{b(j)}(alpha) > sin 3` for some `j < 2`.
    Vector,
    /// `v_{b(j)}(alpha)` real and in `(1/3, 1)` for some `j < 2`.
    Field,
}

/// The two-point separation statistic behind the closed-discrete-set
/// arguments: true iff one of the pair's coordinates satisfies the mode's
/// inequality. Requires `alpha < b0 < b1`.
pub fn separation_stat<T: Real>(
    fam: &ThetaFamily<T>,
    g: &PiecewiseG,
    walker: &Walker,
    alpha: &Ordinal,
    pair: (&Ordinal, &Ordinal),
    mode: SeparationMode,
) -> Result<bool, PointError> {
    assert!(alpha < pair.0 && pair.0 < pair.1, "requires alpha < b0 < b1");
    let sin3 = T::from_int(3).sin();
    for beta in [pair.0, pair.1] {
        match mode {
            SeparationMode::Vector => {
                let wv = w_point(fam, walker, beta, alpha)?;
                if wv.value.re > sin3.clone() + T::pad() {
                    return Ok(true);
                }
            }
            SeparationMode::Field => {
                let vv = v_point(fam, g, walker, beta, alpha)?;
                let third = T::from_ratio(1, 3);
                if vv.value.im.abs() < T::pad()
                    && in_open_interval(&vv.value.re, &third, &T::one())
                {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cseq::Canonical;
    use crate::real::Fix;
    use std::sync::Arc;

    type F = Fix<304>;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn walker() -> Walker {
        Walker::new(Arc::new(Canonical))
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn f_reference_values() {
        let x1: F = F::from_int(1);
        assert!(f_eval(&x1).unwrap().to_decimal(6).starts_with("0.841470"));
        let half = F::from_ratio(1, 2);
        assert!(f_eval(&half).unwrap().to_decimal(6).starts_with("1.818594"));
        // f(2/pi) = pi/2.
        let two_over_pi = F::from_int(2).div(&F::pi());
        let v = f_eval(&two_over_pi).unwrap();
        assert!((v - F::pi().div(&F::from_int(2))).abs() < F::pad());
        assert!(matches!(
            f_eval(&F::from_int(0)),
            Err(PointError::FUndefinedAtZero)
        ));
    }

    #[test]
    fn g_identity_piece_and_linearity() {
        let g = PiecewiseG::standard();
        let half = rat(1, 2);
        assert_eq!(
            g.eval_rational(&half).unwrap(),
            GaussRational::new(rat(1, 2), rat(0, 1))
        );
        // Midpoint of [1/5, 1/4] maps to the mean of the two breakpoints.
        let mid = rat(9, 40);
        let expect = g.breakpoint(5).add(&g.breakpoint(4)).scale(&rat(1, 2));
        assert_eq!(g.eval_rational(&mid).unwrap(), expect);
        // Breakpoint value is the configured enumeration value.
        let quarter = rat(1, 4);
        assert_eq!(g.eval_rational(&quarter).unwrap(), g.breakpoint(4));
        // Out of domain.
        assert!(g.eval_rational(&rat(0, 1)).is_err());
        assert!(g.eval_rational(&rat(3, 2)).is_err());
    }

    #[test]
    fn g_continuity_at_breakpoints_exact() {
        let g = PiecewiseG::standard();
        for n in 3..200u64 {
            // Left and right evaluations at 1/n agree exactly; at n = 3 the
            // right side is the identity piece.
            let x = BigRational::new(BigInt::one(), BigInt::from(n));
            let left_val = g.eval_rational(&x).unwrap();
            let right_val = if n == 3 {
                GaussRational::new(x.clone(), BigRational::zero())
            } else {
                // Evaluate on the segment [1/n, 1/(n-1)] at its left end.
                let a = BigRational::new(BigInt::one(), BigInt::from(n));
                let b = BigRational::new(BigInt::one(), BigInt::from(n - 1));
                let t = (&x - &a) / (&b - &a);
                let ga = g.breakpoint(n);
                let gb = g.breakpoint(n - 1);
                ga.add(&gb.sub(&ga).scale(&t))
            };
            assert_eq!(left_val, right_val, "discontinuity at 1/{n}");
        }
        assert_eq!(
            g.breakpoint(3),
            GaussRational::new(rat(1, 3), rat(0, 1))
        );
    }

    #[test]
    fn g_numeric_agrees_with_rational() {
        let g = PiecewiseG::standard();
        for (num, den) in [(1i64, 2i64), (9, 40), (1, 7), (3, 22), (1, 100)] {
            let exact = g.eval_rational(&rat(num, den)).unwrap();
            let numeric = g.eval(&F::from_ratio(num, den)).unwrap();
            let exact_cpx: Cpx<F> = exact.to_cpx();
            assert!((numeric.re - exact_cpx.re).abs() < F::pad());
            assert!((numeric.im - exact_cpx.im).abs() < F::pad());
        }
    }

    #[test]
    fn g_density_via_enumeration() {
        // Every Gaussian rational value recurs as a breakpoint beyond any
        // index: read the cycling enumeration directly.
        let g = PiecewiseG::standard();
        for k in 0..6u64 {
            let q = gauss_rational_at(k);
            let mut hits = 0;
            for rep in 0..4u64 {
                let n = 4 + (rep + k) * (rep + k + 1) / 2 + k;
                assert!(n >= 4);
                if g.breakpoint(n) == q {
                    hits += 1;
                }
            }
            assert!(hits >= 4, "value {k} does not recur");
        }
    }

    #[test]
    fn w_case_tags() {
        let fam: ThetaFamily<F> = ThetaFamily::sqrt_primes(false);
        let w = walker();
        let beta = ord("w*2");
        // Diagonal.
        let d = w_point(&fam, &w, &beta, &beta).unwrap();
        assert_eq!(d.case, CaseTag::Diagonal);
        assert_eq!(d.value.re, fam.theta(&beta));
        // Above.
        let a = w_point(&fam, &w, &beta, &ord("w*3")).unwrap();
        assert_eq!(a.case, CaseTag::Above);
        assert!(a.value.re.is_zero() && a.value.im.is_zero());
        // Below: osc(5, w) = 0, so the value is f(frac(theta_w)).
        let fam2: ThetaFamily<F> = ThetaFamily::sqrt_primes(false);
        let b = w_point(&fam2, &w, &ord("w"), &ord("5")).unwrap();
        assert_eq!(b.case, CaseTag::Below);
        let expect = f_eval(&fam2.theta(&ord("w")).fract()).unwrap();
        assert_eq!(b.value.re, expect);
    }

    #[test]
    fn v_case_tags() {
        let fam: ThetaFamily<F> = ThetaFamily::seeded(5, true);
        let g = PiecewiseG::standard();
        let w = walker();
        let beta = ord("w^2");
        let above = v_point(&fam, &g, &w, &beta, &ord("w^2+1")).unwrap();
        assert_eq!(above.case, CaseTag::Above);
        assert_eq!(above.value.re, fam.theta(&beta));
        assert_eq!(above.value.im, fam.theta_prime(&beta).unwrap());
        let diag = v_point(&fam, &g, &w, &beta, &beta).unwrap();
        assert_eq!(diag.case, CaseTag::Diagonal);
        assert!(diag.value.im.is_zero());
        let below = v_point(&fam, &g, &w, &ord("w"), &ord("5")).unwrap();
        assert_eq!(below.case, CaseTag::Below);
        let expect = g.eval(&fam.theta(&ord("w")).fract()).unwrap();
        assert_eq!(below.value.re, expect.re);
    }

    #[test]
    fn combo_linear_degenerate_cases() {
        let fam: ThetaFamily<F> = ThetaFamily::sqrt_primes(false);
        let g = PiecewiseG::standard();
        let w = walker();
        let betas = vec![ord("w"), ord("w*2")];
        // Single beta with r = 1 equals the point itself.
        let single = combo_eval(
            &fam,
            &g,
            &w,
            &Combo::Linear { coeffs: vec![rat(1, 1)] },
            &betas[..1],
            &ord("3"),
        )
        .unwrap();
        let direct = w_point(&fam, &w, &betas[0], &ord("3")).unwrap();
        assert_eq!(single.re, direct.value.re);
        // Above all betas the combination vanishes.
        let above = combo_eval(
            &fam,
            &g,
            &w,
            &Combo::Linear { coeffs: vec![rat(2, 1), rat(-3, 1)] },
            &betas,
            &ord("w^2"),
        )
        .unwrap();
        assert!(above.re.is_zero() && above.im.is_zero());
        // Zero coefficients rejected.
        assert!(matches!(
            combo_eval(
                &fam,
                &g,
                &w,
                &Combo::Linear { coeffs: vec![rat(0, 1)] },
                &betas[..1],
                &ord("3"),
            ),
            Err(PointError::ZeroCoefficient)
        ));
    }

    #[test]
    fn combo_rational_identity() {
        let fam: ThetaFamily<F> = ThetaFamily::seeded(87, true);
        let g = PiecewiseG::standard();
        let w = walker();
        let betas = vec![ord("w")];
        let combo = Combo::RationalFn {
            p: Poly::var(0),
            q: Poly::constant(GaussRational::from_ints(1, 0)),
        };
        let got = combo_eval(&fam, &g, &w, &combo, &betas, &ord("w*2")).unwrap();
        let direct = v_point(&fam, &g, &w, &betas[0], &ord("w*2")).unwrap();
        assert_eq!(got.re, direct.value.re);
        assert_eq!(got.im, direct.value.im);
    }

    #[test]
    fn nr_check_basic() {
        let fam: ThetaFamily<F> = ThetaFamily::seeded(11, true);
        let b = vec![ord("w"), ord("w*2")];
        let tol = F::from_ratio(1, 1_000_000);
        // P = z0: margin is theta'_{b(0)}.
        let out = nr_check(
            &fam,
            &b,
            &Poly::var(0),
            &Poly::constant(GaussRational::from_ints(1, 0)),
            &tol,
        )
        .unwrap();
        match out {
            NrOutcome::Nonreal { margin } => {
                assert_eq!(margin, fam.theta_prime(&b[0]).unwrap());
            }
            other => panic!("expected nonreal, got {other:?}"),
        }
        // P = z0 * z1 stays nonreal for generic seeds.
        let p = Poly {
            terms: vec![(GaussRational::from_ints(1, 0), vec![1, 1])],
        };
        let out = nr_check(
            &fam,
            &b,
            &p,
            &Poly::constant(GaussRational::from_ints(1, 0)),
            &tol,
        )
        .unwrap();
        assert!(matches!(out, NrOutcome::Nonreal { .. }));
        // Degenerate constant P/Q is a precondition violation.
        assert!(matches!(
            nr_check(
                &fam,
                &b,
                &Poly::constant(GaussRational::from_ints(2, 0)),
                &Poly::constant(GaussRational::from_ints(1, 0)),
                &tol,
            ),
            Err(PointError::ConstantRationalFunction)
        ));
        // P = z0 - z0 is the zero polynomial, also constant.
        let zero = Poly {
            terms: vec![
                (GaussRational::from_ints(1, 0), vec![1]),
                (GaussRational::from_ints(-1, 0), vec![1]),
            ],
        };
        assert!(matches!(
            nr_check(
                &fam,
                &b,
                &zero,
                &Poly::constant(GaussRational::from_ints(1, 0)),
                &tol
            ),
            Err(PointError::ConstantRationalFunction)
        ));
    }

    #[test]
    fn proportional_rational_functions_are_constant() {
        // (2 z0 + 4 z1) / (z0 + 2 z1) = 2.
        let p = Poly {
            terms: vec![
                (GaussRational::from_ints(2, 0), vec![1]),
                (GaussRational::from_ints(4, 0), vec![0, 1]),
            ],
        };
        let q = Poly {
            terms: vec![
                (GaussRational::from_ints(1, 0), vec![1]),
                (GaussRational::from_ints(2, 0), vec![0, 1]),
            ],
        };
        assert!(rational_function_is_constant(&p, &q));
        let q2 = Poly {
            terms: vec![
                (GaussRational::from_ints(1, 0), vec![1]),
                (GaussRational::from_ints(3, 0), vec![0, 1]),
            ],
        };
        assert!(!rational_function_is_constant(&p, &q2));
    }

    #[test]
    fn f_dominates_sin3_on_middle_interval() {
        // Dense scan of f on (1/3, 1): every value exceeds sin 3, the
        // inequality behind the vector-space separation.
        let sin3: F = F::from_int(3).sin();
        let mut min_margin: Option<F> = None;
        for i in 1..2000u64 {
            let x = F::from_ratio(1, 3)
                + F::from_ratio(2, 3).mul_nat(i).div(&F::from_int(2000));
            if x >= F::from_int(1) {
                break;
            }
            let v = f_eval(&x).unwrap();
            let margin = v - sin3.clone();
            assert!(margin > F::from_int(0), "f({}) <= sin 3", x.to_decimal(8));
            if min_margin.as_ref().is_none_or(|m| margin < *m) {
                min_margin = Some(margin);
            }
        }
        // The minimum margin approaches 3 sin 3 - sin 3 = 2 sin 3 ~ 0.282
        // at the left end of the x-interval (u -> 3).
        let mm = min_margin.unwrap().approx_f64();
        assert!(mm > 0.28 && mm < 0.30, "min margin {mm}");
    }

    #[test]
    fn separation_stat_modes() {
        let fam: ThetaFamily<F> = ThetaFamily::seeded(21, true);
        let g = PiecewiseG::standard();
        let w = walker();
        // Field mode sanity on a small sample; no claim that it holds for
        // every triple, just that evaluation succeeds and is boolean.
        let alpha = ord("3");
        let b0 = ord("w");
        let b1 = ord("w*2");
        let _ = separation_stat(&fam, &g, &w, &alpha, (&b0, &b1), SeparationMode::Vector)
            .unwrap();
        let _ = separation_stat(&fam, &g, &w, &alpha, (&b0, &b1), SeparationMode::Field)
            .unwrap();
    }
}
