//! Polynomials over F₂ in the two variables `U` and `V`, with Laurent
//! exponents allowed.
//!
//! Coefficients live in F₂, so a polynomial is nothing more than its set of
//! monomials: adding a monomial that is already present cancels it.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use crate::error::CoreError;

/// `U^u V^v`. Exponents may be negative; whether that is legal is decided by
/// the complex the monomial ends up in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub u: i64,
    pub v: i64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { u: 0, v: 0 };

    pub fn new(u: i64, v: i64) -> Self {
        Monomial { u, v }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.u >= 0 && self.v >= 0
    }

    /// `Û^n = (UV)^n`
    pub fn uhat(n: i64) -> Self {
        Monomial { u: n, v: n }
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial { u: self.u + rhs.u, v: self.v + rhs.v }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn factor(f: &mut fmt::Formatter<'_>, var: char, e: i64) -> fmt::Result {
            if e == 1 {
                write!(f, "{var}")
            } else {
                write!(f, "{var}^{e}")
            }
        }
        match (self.u, self.v) {
            (0, 0) => write!(f, "1"),
            (u, 0) => factor(f, 'U', u),
            (0, v) => factor(f, 'V', v),
            (u, v) => {
                factor(f, 'U', u)?;
                write!(f, "*")?;
                factor(f, 'V', v)
            }
        }
    }
}

/// What a substitution does to one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRule {
    Keep,
    Zero,
    One,
}

/// A ring map out of F₂[U,V]. With `collapse_to_uhat` set, the single
/// surviving variable is renamed `Û`; the exponent of `Û` is stored in the
/// `u` slot of the resulting monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub u: VarRule,
    pub v: VarRule,
    pub collapse_to_uhat: bool,
}

impl Substitution {
    pub const U_ZERO: Substitution =
        Substitution { u: VarRule::Zero, v: VarRule::Keep, collapse_to_uhat: false };
    pub const V_ZERO: Substitution =
        Substitution { u: VarRule::Keep, v: VarRule::Zero, collapse_to_uhat: false };
    pub const V_ONE: Substitution =
        Substitution { u: VarRule::Keep, v: VarRule::One, collapse_to_uhat: false };
    pub const U_ONE: Substitution =
        Substitution { u: VarRule::One, v: VarRule::Keep, collapse_to_uhat: false };
    pub const BOTH_ZERO: Substitution =
        Substitution { u: VarRule::Zero, v: VarRule::Zero, collapse_to_uhat: false };

    pub fn collapsed(mut self) -> Self {
        self.collapse_to_uhat = true;
        self
    }
}

/// An element of F₂[U,V] (or its Laurent extension).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeSet<Monomial>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::monomial(Monomial::ONE)
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Poly { terms }
    }

    pub fn u_pow(a: i64) -> Self {
        Poly::monomial(Monomial::new(a, 0))
    }

    pub fn v_pow(b: i64) -> Self {
        Poly::monomial(Monomial::new(0, b))
    }

    pub fn from_terms<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for m in terms {
            p.toggle(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.iter()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// The unique monomial, if the polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() == 1 {
            self.terms.iter().next().copied()
        } else {
            None
        }
    }

    /// Adds (equivalently, removes) a single monomial.
    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(Monomial::is_nonnegative)
    }

    pub fn mul_monomial(&self, m: Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|t| *t * m).collect() }
    }

    /// Formal ∂/∂U: `U^a V^b ↦ a·U^{a-1} V^b` with `a` read mod 2.
    pub fn d_du(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|m| m.u.rem_euclid(2) == 1)
                .map(|m| Monomial::new(m.u - 1, m.v)),
        )
    }

    /// Formal ∂/∂V.
    pub fn d_dv(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|m| m.v.rem_euclid(2) == 1)
                .map(|m| Monomial::new(m.u, m.v - 1)),
        )
    }

    pub fn substitute(&self, rule: Substitution) -> Poly {
        let mut out = Poly::zero();
        for m in &self.terms {
            let u = match rule.u {
                VarRule::Zero if m.u != 0 => continue,
                VarRule::One => 0,
                _ => m.u,
            };
            let v = match rule.v {
                VarRule::Zero if m.v != 0 => continue,
                VarRule::One => 0,
                _ => m.v,
            };
            let image = if rule.collapse_to_uhat {
                // exactly one of u, v can survive a collapse
                Monomial::new(u + v, 0)
            } else {
                Monomial::new(u, v)
            };
            out.toggle(image);
        }
        out
    }
}

impl From<Monomial> for Poly {
    fn from(m: Monomial) -> Self {
        Poly::monomial(m)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for m in &rhs.terms {
            self.toggle(*m);
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly { terms: self.terms.symmetric_difference(&rhs.terms).copied().collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.terms {
            for b in &rhs.terms {
                out.toggle(*a * *b);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Parses one monomial factor list such as `U^2*V`, `V^-1` or `1`.
pub(crate) fn parse_monomial(text: &str) -> Result<Monomial, String> {
    let mut m = Monomial::ONE;
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor == "1" {
            continue;
        }
        let (var, exp) = match factor.split_once('^') {
            Some((var, exp)) => {
                let e = exp.trim().parse::<i64>().map_err(|_| format!("bad exponent `{exp}`"))?;
                (var.trim(), e)
            }
            None => (factor, 1),
        };
        match var {
            "U" => m.u += exp,
            "V" => m.v += exp,
            _ => return Err(format!("unknown factor `{factor}`")),
        }
    }
    Ok(m)
}

impl FromStr for Poly {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut p = Poly::zero();
        for term in s.split('+') {
            let m = parse_monomial(term).map_err(|msg| CoreError::Syntax {
                line: 1,
                column: 1,
                message: msg,
            })?;
            p.toggle(m);
        }
        Ok(p)
    }
}
