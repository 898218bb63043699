//! Ordinals below w^w in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents and positive coefficients; the empty sum is 0. This
//! is the universe for every walk computation in the crate. The module also
//! provides the canonical enumeration of `[0, alpha)` used by the splitting
//! scan and by the forcing environment's bijections.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("not a successor: {0}")]
    NotASuccessor(Ordinal),
    #[error("index {index} out of range for finite ordinal {alpha}")]
    IndexOutOfRange { alpha: Ordinal, index: u64 },
    #[error("ordinal parse error: {0}")]
    Parse(String),
}

/// Exponent of a CNF term. Bounded by the w^w universe: exponents are
/// naturals, never ordinals themselves.
pub type Exp = u32;

/// Coefficient of a CNF term, at least 1 in canonical form.
pub type Coeff = u64;

/// An ordinal below w^w in Cantor normal form.
///
/// Terms are `(exponent, coefficient)` pairs sorted by strictly decreasing
/// exponent. Equality is term-list identity; the derived lexicographic order
/// on the term list coincides with ordinal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    terms: Vec<(Exp, Coeff)>,
}

/// Classification used by the C-sequence case split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrdinalClass {
    Zero,
    Successor,
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Ordinal { terms: vec![(1, 1)] }
    }

    /// `w^e * c`; zero when `c == 0`.
    pub fn omega_power(e: Exp, c: Coeff) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Builds from terms, which must be canonical (strictly decreasing
    /// exponents, coefficients >= 1).
    pub fn from_terms(terms: Vec<(Exp, Coeff)>) -> Result<Self, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::Parse(format!(
                    "exponents not strictly decreasing: w^{} before w^{}",
                    w[0].0, w[1].0
                )));
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(OrdinalError::Parse("zero coefficient".into()));
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(Exp, Coeff)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The natural `n` if this ordinal is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn classify(&self) -> OrdinalClass {
        match self.terms.last() {
            None => OrdinalClass::Zero,
            Some((0, _)) => OrdinalClass::Successor,
            Some(_) => OrdinalClass::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == OrdinalClass::Limit
    }

    pub fn successor(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += 1,
            _ => terms.push((0, 1)),
        }
        Ordinal { terms }
    }

    pub fn predecessor(&self) -> Result<Ordinal, OrdinalError> {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) if *c > 1 => {
                *c -= 1;
                Ok(Ordinal { terms })
            }
            Some((0, _)) => {
                terms.pop();
                Ok(Ordinal { terms })
            }
            _ => Err(OrdinalError::NotASuccessor(self.clone())),
        }
    }

    /// `self + n` for a natural `n`.
    pub fn add_nat(&self, n: u64) -> Ordinal {
        if n == 0 {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += n,
            _ => terms.push((0, n)),
        }
        Ordinal { terms }
    }

    /// Splits a limit ordinal as `base + w^e` where `w^e` is one copy of the
    /// last CNF term: for `gamma + w^e*c` returns `(gamma + w^e*(c-1), e)`.
    pub(crate) fn peel_limit(&self) -> Option<(Ordinal, Exp)> {
        match self.terms.last() {
            Some(&(e, c)) if e >= 1 => {
                let mut terms = self.terms.clone();
                if c == 1 {
                    terms.pop();
                } else {
                    terms.last_mut().unwrap().1 = c - 1;
                }
                Some((Ordinal { terms }, e))
            }
            _ => None,
        }
    }

    /// `self + w^e*c` requiring `e` below this ordinal's last exponent, so
    /// the concatenation stays canonical.
    pub(crate) fn append_term(&self, e: Exp, c: Coeff) -> Ordinal {
        if c == 0 {
            return self.clone();
        }
        debug_assert!(self.terms.last().is_none_or(|&(le, _)| le > e));
        let mut terms = self.terms.clone();
        terms.push((e, c));
        Ordinal { terms }
    }

    /// Coefficient of the last CNF term, 0 for the zero ordinal. Drives the
    /// round-robin channel assignment of the forcing environment.
    pub fn last_coeff(&self) -> Coeff {
        self.terms.last().map_or(0, |&(_, c)| c)
    }

    /// Canonical code of this ordinal under the global bijection with the
    /// naturals: the CNF coefficient vector, leading digit first (with 1
    /// subtracted, so the leading zero is impossible), folded through the
    /// pairing function. Leading-digit-first keeps the codes of the simple
    /// high ordinals (`w^2*c`, `w^3*c`) small, which the forcing
    /// environment's position rows rely on.
    pub fn code(&self) -> u128 {
        if self.terms.is_empty() {
            return 0;
        }
        let top = self.terms[0].0;
        let mut acc: u128 = 0;
        let coeff_at = |e: Exp| -> u128 {
            for &(te, tc) in &self.terms {
                if te == e {
                    return tc as u128;
                }
            }
            0
        };
        for e in 0..=top {
            let mut c = coeff_at(e);
            if e == top {
                c -= 1;
            }
            acc = 1 + cpair(c, acc);
        }
        acc
    }

    /// Inverse of [`Ordinal::code`].
    pub fn decode(mut code: u128) -> Ordinal {
        let mut raw: Vec<u128> = Vec::new();
        while code > 0 {
            let (h, t) = cunpair(code - 1);
            raw.push(h);
            code = t;
        }
        if raw.is_empty() {
            return Ordinal::zero();
        }
        raw[0] += 1;
        let top = raw.len() - 1;
        let mut terms: Vec<(Exp, Coeff)> = Vec::new();
        for (i, &c) in raw.iter().enumerate() {
            if c > 0 {
                terms.push(((top - i) as Exp, c as Coeff));
            }
        }
        Ordinal { terms }
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

fn triangle(n: u128) -> u128 {
    n * (n + 1) / 2
}

/// Cantor pairing.
fn cpair(a: u128, b: u128) -> u128 {
    triangle(a + b) + b
}

fn cunpair(z: u128) -> (u128, u128) {
    // Largest s with triangle(s) <= z, via integer sqrt plus adjustment.
    let mut s = ((8.0 * z as f64 + 1.0).sqrt() as u128).saturating_sub(1) / 2;
    while triangle(s + 1) <= z {
        s += 1;
    }
    while triangle(s) > z {
        s -= 1;
    }
    let b = z - triangle(s);
    (s - b, b)
}

/// Deterministic bijection from the naturals onto `[0, alpha)`.
///
/// Index order is induced by the global CNF code, so the enumeration is a
/// fixed interleaving over CNF digits: finite ordinals appear in order, and
/// every ordinal below `alpha` is hit exactly once. The inverse is available
/// through [`Enumeration::index_of`].
pub struct Enumeration {
    alpha: Ordinal,
    hits: Vec<Ordinal>,
    index_of: HashMap<Ordinal, u64>,
    next_code: u128,
}

impl Enumeration {
    /// Requires `alpha > 0`.
    pub fn new(alpha: Ordinal) -> Self {
        assert!(!alpha.is_zero(), "enumeration requires alpha > 0");
        Enumeration {
            alpha,
            hits: Vec::new(),
            index_of: HashMap::new(),
            next_code: 0,
        }
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }

    fn extend_to(&mut self, i: u64) -> Result<(), OrdinalError> {
        while (self.hits.len() as u64) <= i {
            if let Some(n) = self.alpha.as_nat() {
                if self.hits.len() as u64 >= n {
                    return Err(OrdinalError::IndexOutOfRange {
                        alpha: self.alpha.clone(),
                        index: i,
                    });
                }
            }
            let cand = Ordinal::decode(self.next_code);
            self.next_code += 1;
            if cand < self.alpha {
                self.index_of.insert(cand.clone(), self.hits.len() as u64);
                self.hits.push(cand);
            }
        }
        Ok(())
    }

    /// The `i`-th ordinal below `alpha`. Errors only for finite `alpha`
    /// with `i >= alpha`.
    pub fn get(&mut self, i: u64) -> Result<Ordinal, OrdinalError> {
        self.extend_to(i)?;
        Ok(self.hits[i as usize].clone())
    }

    /// Index of `xi` in the enumeration. Requires `xi < alpha`.
    pub fn index_of(&mut self, xi: &Ordinal) -> u64 {
        assert!(*xi < self.alpha, "index_of requires xi < alpha");
        loop {
            if let Some(&i) = self.index_of.get(xi) {
                return i;
            }
            let next = self.hits.len() as u64;
            self.extend_to(next).expect("xi < alpha guarantees progress");
        }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "w*{c}")?,
                _ => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    /// Parses the textual syntax `w^k*c + ... + n`, e.g. `w^2*3+w*1+4`.
    /// Also accepts the shorthands `w` and `w^k` for coefficient 1.
    fn from_str(s: &str) -> Result<Self, OrdinalError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(OrdinalError::Parse("empty ordinal".into()));
        }
        if compact == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms = Vec::new();
        for part in compact.split('+') {
            terms.push(parse_term(part)?);
        }
        Ordinal::from_terms(terms)
    }
}

fn parse_term(part: &str) -> Result<(Exp, Coeff), OrdinalError> {
    let bad = |msg: &str| OrdinalError::Parse(format!("bad term {part:?}: {msg}"));
    if part.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(rest) = part.strip_prefix('w') {
        let (exp_part, coeff_part) = match rest.split_once('*') {
            Some((e, c)) => (e, Some(c)),
            None => (rest, None),
        };
        let e: Exp = if exp_part.is_empty() {
            1
        } else {
            let digits = exp_part
                .strip_prefix('^')
                .ok_or_else(|| bad("expected ^ after w"))?;
            digits.parse().map_err(|_| bad("bad exponent"))?
        };
        if e == 0 {
            return Err(bad("w^0 is not canonical; write a plain number"));
        }
        let c: Coeff = match coeff_part {
            Some(digits) => digits.parse().map_err(|_| bad("bad coefficient"))?,
            None => 1,
        };
        Ok((e, c))
    } else {
        let c: Coeff = part.parse().map_err(|_| bad("expected digits"))?;
        Ok((0, c))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_basics() {
        assert_eq!(compare(&Ordinal::from_nat(5), &Ordinal::omega()), Ordering::Less);
        assert_eq!(compare(&ord("w*2+1"), &ord("w*2+1")), Ordering::Equal);
        assert_eq!(compare(&ord("w^2*3"), &ord("w^3*1")), Ordering::Less);
    }

    #[test]
    fn compare_agrees_with_small_scale_enumeration() {
        // Brute-force order below w^3 at small scale: build w^2*a + w*b + c
        // for digits < 4 in increasing digit order and check compare matches.
        let mut all = Vec::new();
        for a in 0..4u64 {
            for b in 0..4u64 {
                for c in 0..4u64 {
                    let mut terms = Vec::new();
                    if a > 0 {
                        terms.push((2, a));
                    }
                    if b > 0 {
                        terms.push((1, b));
                    }
                    if c > 0 {
                        terms.push((0, c));
                    }
                    all.push(((a, b, c), Ordinal::from_terms(terms).unwrap()));
                }
            }
        }
        for (da, oa) in &all {
            for (db, ob) in &all {
                assert_eq!(da.cmp(db), compare(oa, ob), "{oa} vs {ob}");
            }
        }
    }

    #[test]
    fn classify_basics() {
        assert_eq!(Ordinal::zero().classify(), OrdinalClass::Zero);
        assert_eq!(ord("w+1").classify(), OrdinalClass::Successor);
        assert_eq!(ord("w^2").classify(), OrdinalClass::Limit);
    }

    #[test]
    fn successor_predecessor() {
        assert_eq!(Ordinal::omega().successor(), ord("w+1"));
        assert_eq!(ord("w+1").predecessor().unwrap(), Ordinal::omega());
        assert_eq!(
            Ordinal::omega().predecessor(),
            Err(OrdinalError::NotASuccessor(Ordinal::omega()))
        );
        assert_eq!(
            Ordinal::zero().predecessor(),
            Err(OrdinalError::NotASuccessor(Ordinal::zero()))
        );
    }

    #[test]
    fn roundtrip_succ_pred() {
        for s in ["0", "7", "w", "w*3+2", "w^3*2+w^2*1+5"] {
            let a = ord(s);
            assert_eq!(a.successor().predecessor().unwrap(), a);
        }
    }

    #[test]
    fn enumerate_omega_is_identity() {
        let mut e = Enumeration::new(Ordinal::omega());
        for i in 0..1000 {
            assert_eq!(e.get(i).unwrap(), Ordinal::from_nat(i));
            assert_eq!(e.index_of(&Ordinal::from_nat(i)), i);
        }
    }

    #[test]
    fn enumerate_finite_out_of_range() {
        let mut e = Enumeration::new(Ordinal::from_nat(5));
        for i in 0..5 {
            assert!(e.get(i).is_ok());
        }
        assert!(matches!(
            e.get(7),
            Err(OrdinalError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn enumerate_interleaves_and_inverts() {
        let bound = ord("w*2");
        let mut e = Enumeration::new(bound);
        let mut seen = std::collections::HashSet::new();
        let mut omega_index = None;
        for i in 0..400 {
            let x = e.get(i).unwrap();
            assert!(seen.insert(x.clone()), "enumeration repeated {x}");
            assert_eq!(e.index_of(&x), i);
            if x == Ordinal::omega() {
                omega_index = Some(i);
            }
        }
        // The interleaving reaches w quickly, well before exhausting the
        // naturals.
        assert!(omega_index.unwrap() <= 4, "w found at {omega_index:?}");
        // Surjectivity sample: both blocks keep showing up.
        for n in 0..50u64 {
            assert!(seen.contains(&Ordinal::from_nat(n)));
        }
        for n in 0..10u64 {
            assert!(seen.contains(&Ordinal::omega().add_nat(n)));
        }
    }

    #[test]
    fn code_roundtrip() {
        for k in 0..5000u128 {
            let o = Ordinal::decode(k);
            assert_eq!(o.code(), k);
        }
    }

    #[test]
    fn parse_print_roundtrip() {
        for s in ["0", "4", "w", "w*1", "w*2+1", "w^2*3+w*1+4", "w^4*7+3"] {
            let a = ord(s);
            let b: Ordinal = a.to_string().parse().unwrap();
            assert_eq!(a, b);
        }
        assert!("w^0*2".parse::<Ordinal>().is_err());
        assert!("w*0".parse::<Ordinal>().is_err());
        assert!("1+w".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
    }
}
