//! Secondary invariants of pairs of principal-invariant elements.
//!
//! Every question is a boundary test in one finite slice of the `A = 0`
//! part of CFK^∞: `τ` in `I(n)`, `τ'` in `L(m, τ)`, `V_k` in `R(0, -k)`,
//! `κ₀` and `κ` in `I(n - 2g)`, and `Υ(t)` in the half-plane filtration
//! `t·j + (2 - t)·i ≥ -s`.

use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::complex::{Element, KnotComplex};
use crate::disk::{DiskElement, Side};
use crate::error::{CoreError, Result};
use crate::linalg::{BitVec, ImageBasis};
use crate::maps::same_complex;
use crate::poly::Monomial;
use crate::shape::{is_boundary, lattice_degree, SubQuotientShape};

pub const SEARCH_CAP_ENV: &str = "CFLKIT_SEARCH_CAP";

/// Limits for the minimal-`n` searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SearchConfig {
    /// Search up to `max genus + slack`; default slack is the generator
    /// count of the ambient complex plus 8.
    pub slack: Option<i64>,
    /// Largest `m` tried for `τ'`; by default the first `m` after which
    /// `L(m, τ)` no longer changes.
    pub tau_prime_cap: Option<i64>,
}

impl SearchConfig {
    /// Reads the slack from `CFLKIT_SEARCH_CAP` when set.
    pub fn from_env() -> Result<SearchConfig> {
        match std::env::var(SEARCH_CAP_ENV) {
            Ok(v) => {
                let slack = v
                    .trim()
                    .parse::<i64>()
                    .ok()
                    .filter(|s| *s >= 0)
                    .ok_or_else(|| CoreError::InvalidParameter(format!("{SEARCH_CAP_ENV} must be a non-negative integer")))?;
                Ok(SearchConfig { slack: Some(slack), ..Default::default() })
            }
            Err(_) => Ok(SearchConfig::default()),
        }
    }

    fn cap(&self, c: &KnotComplex, max_genus: i64) -> i64 {
        max_genus + self.slack.unwrap_or(c.len() as i64 + 8)
    }
}

fn check_pair(e1: &DiskElement, e2: &DiskElement, side: Side) -> Result<()> {
    if !same_complex(e1.complex(), e2.complex()) {
        return Err(CoreError::ComplexMismatch);
    }
    for e in [e1, e2] {
        if !e.serves_as(side) {
            return Err(CoreError::InvalidElement(format!("expected a {side:?}-side element")));
        }
    }
    Ok(())
}

/// `V^{-g} e1 + V^{-g'} e2`, an element of the `A = 0` part of CFK^∞.
fn z_difference(e1: &DiskElement, e2: &DiskElement) -> Element {
    let a = e1.element().mul_monomial(Monomial::new(0, -i64::from(e1.genus())));
    let b = e2.element().mul_monomial(Monomial::new(0, -i64::from(e2.genus())));
    a.add(&b)
}

pub fn tau(e1: &DiskElement, e2: &DiskElement) -> Result<i64> {
    tau_with(e1, e2, &SearchConfig::default())
}

/// Least `n ≥ max(g, g')` with `V^{n-g} e1 = V^{n-g'} e2` in `HFK⁻_{U=0}`.
pub fn tau_with(e1: &DiskElement, e2: &DiskElement, cfg: &SearchConfig) -> Result<i64> {
    check_pair(e1, e2, Side::Z)?;
    let c = e1.complex();
    let delta = z_difference(e1, e2);
    let start = i64::from(e1.genus().max(e2.genus()));
    let cap = cfg.cap(c, start);
    for n in start..=cap {
        if is_boundary(c, &SubQuotientShape::I { n }, &delta)? {
            return Ok(n);
        }
    }
    Err(CoreError::SearchCapExceeded { invariant: "tau", cap })
}

/// `τ'`: `None` stands for `-∞`.
pub fn tau_prime(e1: &DiskElement, e2: &DiskElement) -> Result<Option<i64>> {
    tau_prime_with(e1, e2, &SearchConfig::default())
}

pub fn tau_prime_with(e1: &DiskElement, e2: &DiskElement, cfg: &SearchConfig) -> Result<Option<i64>> {
    let t = tau_with(e1, e2, cfg)?;
    let c = e1.complex();
    let delta = z_difference(e1, e2);
    // beyond m = max A - τ the L-shape picks up no new basis monomials
    let stable = (c.max_alexander() - t).max(0);
    let cap = cfg.tau_prime_cap.unwrap_or(stable);
    for m in 1..=cap {
        if !is_boundary(c, &SubQuotientShape::L { m, n: t }, &delta)? {
            return Ok(Some(-(m - 1)));
        }
    }
    Ok(None)
}

pub fn nu(e1: &DiskElement, e2: &DiskElement) -> Result<i64> {
    nu_with(e1, e2, &SearchConfig::default())
}

pub fn nu_with(e1: &DiskElement, e2: &DiskElement, cfg: &SearchConfig) -> Result<i64> {
    let t = tau_with(e1, e2, cfg)?;
    Ok(match tau_prime_with(e1, e2, cfg)? {
        None => t,
        Some(_) => t + 1,
    })
}

pub fn v_k(e1: &DiskElement, e2: &DiskElement, k: i64) -> Result<i64> {
    v_k_with(e1, e2, k, &SearchConfig::default())
}

/// Least `n` with `Û^n V^{-g}(e1 + e2)` a boundary in `A_k⁻ = C(K, R(0, -k))`.
pub fn v_k_with(e1: &DiskElement, e2: &DiskElement, k: i64, cfg: &SearchConfig) -> Result<i64> {
    check_pair(e1, e2, Side::Z)?;
    if e1.genus() != e2.genus() {
        return Err(CoreError::GenusMismatch(e1.genus(), e2.genus()));
    }
    let g = i64::from(e1.genus());
    if k < g {
        return Err(CoreError::InvalidParameter(format!("V_k needs k >= genus = {g}, got {k}")));
    }
    let c = e1.complex();
    let delta = z_difference(e1, e2);
    let shape = SubQuotientShape::R { i: 0, j: -k };
    let cap = cfg.cap(c, g);
    for n in 0..=cap {
        if is_boundary(c, &shape, &delta.mul_monomial(Monomial::uhat(n)))? {
            return Ok(n);
        }
    }
    Err(CoreError::SearchCapExceeded { invariant: "V_k", cap })
}

fn w_search(c: &KnotComplex, e: &Element, g: i64, cfg: &SearchConfig, name: &'static str) -> Result<i64> {
    let shifted = e.mul_monomial(Monomial::new(0, g));
    let cap = cfg.cap(c, g);
    for n in g..=cap {
        if is_boundary(c, &SubQuotientShape::I { n: n - 2 * g }, &shifted)? {
            return Ok(n);
        }
    }
    Err(CoreError::SearchCapExceeded { invariant: name, cap })
}

pub fn kappa0(e: &DiskElement) -> Result<i64> {
    kappa0_with(e, &SearchConfig::default())
}

/// Least `n ≥ g` with `V^{n-g} e = 0` in `HFK⁻_{U=0}`; 0 for disks.
pub fn kappa0_with(e: &DiskElement, cfg: &SearchConfig) -> Result<i64> {
    if !e.serves_as(Side::W) {
        return Err(CoreError::InvalidElement("expected a W-side element".into()));
    }
    if e.genus() == 0 {
        return Ok(0);
    }
    w_search(e.complex(), e.element(), i64::from(e.genus()), cfg, "kappa0")
}

pub fn kappa(e1: &DiskElement, e2: &DiskElement) -> Result<i64> {
    kappa_with(e1, e2, &SearchConfig::default())
}

pub fn kappa_with(e1: &DiskElement, e2: &DiskElement, cfg: &SearchConfig) -> Result<i64> {
    if e1.genus() != e2.genus() {
        return Err(CoreError::GenusMismatch(e1.genus(), e2.genus()));
    }
    if e1.genus() == 0 {
        return Err(CoreError::GenusZero);
    }
    check_pair(e1, e2, Side::W)?;
    let sum = e1.element().add(e2.element());
    w_search(e1.complex(), &sum, i64::from(e1.genus()), cfg, "kappa")
}

/// `Υ(t)` for `0 < t < 2`.
pub fn upsilon(e1: &DiskElement, e2: &DiskElement, t: Rational64) -> Result<Rational64> {
    check_pair(e1, e2, Side::Z)?;
    let zero = Rational64::from_integer(0);
    let two = Rational64::from_integer(2);
    if t < zero || t > two {
        return Err(CoreError::InvalidParameter(format!("t = {t} is outside [0, 2]")));
    }
    if t == zero || t == two {
        return Err(CoreError::InfiniteSlice(format!("the filtration at t = {t} is degenerate")));
    }
    let c = e1.complex();
    let floor = t * Rational64::from_integer(i64::from(e1.genus().max(e2.genus())));
    let delta = z_difference(e1, e2);
    let Some(d) = lattice_degree(c, &delta)? else {
        return Ok(floor);
    };
    // one candidate monomial per generator in degree d + 1, ordered by the
    // least s at which it enters the filtration
    let level = |i: i64, j: i64| -(t * Rational64::from_integer(j) + (two - t) * Rational64::from_integer(i));
    let mut candidates: Vec<(Rational64, usize, i64, i64)> = (0..c.len())
        .filter_map(|y| {
            let g = c.generator(y);
            let diff = g.gr_w - d - 1;
            diff.is_even().then(|| {
                let i = diff / 2;
                let j = i - g.alexander;
                (level(i, j), y, i, j)
            })
        })
        .collect();
    candidates.sort();
    let n = c.len();
    let mut target = BitVec::zeros(n);
    for (g, _) in delta.terms() {
        target.flip(g);
    }
    let mut basis = ImageBasis::empty(n, candidates.len());
    let mut k = 0;
    while k < candidates.len() {
        let s = candidates[k].0;
        while k < candidates.len() && candidates[k].0 == s {
            let (_, y, _, _) = candidates[k];
            let mut col = BitVec::zeros(n);
            for z in c.differential(y).keys() {
                col.flip(*z);
            }
            basis.add_column(k, col);
            k += 1;
        }
        if basis.contains(&target) {
            return Ok(s.max(floor));
        }
    }
    Err(CoreError::SearchCapExceeded { invariant: "upsilon", cap: candidates.len() as i64 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpsilonCurve {
    /// `(k/q, Υ(k/q))` for `k = 1, ..., 2q - 1`.
    pub samples: Vec<(Rational64, Rational64)>,
    /// Sample points where the slopes to the left and right differ.
    pub breakpoints: Vec<Rational64>,
    /// `Υ(0)`, which is always 0.
    pub at_zero: Rational64,
}

pub fn upsilon_curve(e1: &DiskElement, e2: &DiskElement, q: i64) -> Result<UpsilonCurve> {
    if q < 2 {
        return Err(CoreError::InvalidParameter(format!("grid denominator must be at least 2, got {q}")));
    }
    let ts: Vec<Rational64> = (1..2 * q).map(|k| Rational64::new(k, q)).collect();
    let values = ts.par_iter().map(|t| upsilon(e1, e2, *t)).collect::<Result<Vec<_>>>()?;
    let at_zero = Rational64::from_integer(0);
    let mut points = vec![(at_zero, at_zero)];
    points.extend(ts.iter().copied().zip(values.iter().copied()));
    let breakpoints = points
        .windows(3)
        .filter(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) != (w[2].1 - w[1].1) / (w[2].0 - w[1].0))
        .map(|w| w[1].0)
        .collect();
    Ok(UpsilonCurve { samples: ts.into_iter().zip(values).collect(), breakpoints, at_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::SpunContext;
    use crate::library::builtin;
    use crate::maps::{roll_map, ChainMap};
    use num_traits::Signed;
    use std::sync::Arc;

    fn fig8_pair() -> (DiskElement, DiskElement) {
        let c = Arc::new(builtin("figure8").unwrap());
        let ctx = SpunContext::new(c.clone()).unwrap();
        (ctx.disk(&ChainMap::identity(&c)).unwrap(), ctx.disk(&roll_map(&c, 1).unwrap()).unwrap())
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn figure_eight_pair() {
        let (id, roll) = fig8_pair();
        assert_eq!(tau(&id, &roll).unwrap(), 1);
        assert_eq!(v_k(&id, &roll, 0).unwrap(), 1);
        assert_eq!(v_k(&id, &roll, 1).unwrap(), 0);
        let tp = tau_prime(&id, &roll).unwrap();
        assert!(tp.map_or(true, |v| v <= 0));
        let n = nu(&id, &roll).unwrap();
        assert!((1..=2).contains(&n));
    }

    #[test]
    fn identical_elements() {
        let (id, _) = fig8_pair();
        assert_eq!(tau(&id, &id).unwrap(), 0);
        assert_eq!(tau_prime(&id, &id).unwrap(), None);
        assert_eq!(nu(&id, &id).unwrap(), 0);
        assert_eq!(v_k(&id, &id, 0).unwrap(), 0);
        assert_eq!(upsilon(&id, &id, r(1, 3)).unwrap(), r(0, 1));
        let z = id.stabilize(0, 2).unwrap();
        assert_eq!(tau(&z, &z).unwrap(), 2);
    }

    #[test]
    fn upsilon_slope_near_zero() {
        let (id, roll) = fig8_pair();
        for q in [8, 16, 32, 64] {
            assert_eq!(upsilon(&id, &roll, r(1, q)).unwrap(), r(1, q));
        }
        assert_eq!(upsilon(&roll, &id, r(1, 32)).unwrap(), r(1, 32));
    }

    #[test]
    fn upsilon_parameter_errors() {
        let (id, roll) = fig8_pair();
        assert!(matches!(upsilon(&id, &roll, r(0, 1)), Err(CoreError::InfiniteSlice(_))));
        assert!(matches!(upsilon(&id, &roll, r(2, 1)), Err(CoreError::InfiniteSlice(_))));
        assert!(matches!(upsilon(&id, &roll, r(5, 2)), Err(CoreError::InvalidParameter(_))));
        assert!(upsilon_curve(&id, &roll, 1).is_err());
    }

    #[test]
    fn upsilon_curve_shape() {
        let (id, roll) = fig8_pair();
        let curve = upsilon_curve(&id, &roll, 16).unwrap();
        assert_eq!(curve.samples.len(), 31);
        assert_eq!(curve.samples[0].1, r(1, 16));
        for w in curve.samples.windows(2) {
            // slopes are bounded by 2 on the A = 0 lattice
            assert!((w[1].1 - w[0].1).abs() <= r(2, 16));
        }
        assert!(curve.samples.iter().all(|(_, v)| *v >= r(0, 1)));
        let flat = upsilon_curve(&id, &id, 4).unwrap();
        assert!(flat.samples.iter().all(|(_, v)| *v == r(0, 1)));
        assert!(flat.breakpoints.is_empty());
    }

    #[test]
    fn kappa_and_kappa0_on_stabilized_disks() {
        let (id, roll) = fig8_pair();
        assert_eq!(kappa0(&id).unwrap(), 0);
        for g in 1..4 {
            let w = id.stabilize(g, 0).unwrap();
            assert_eq!(kappa0(&w).unwrap(), i64::from(g));
        }
        let w1 = id.stabilize(1, 0).unwrap();
        let w2 = roll.stabilize(1, 0).unwrap();
        assert_eq!(kappa(&w1, &w2).unwrap(), 1);
        assert_eq!(kappa(&w1, &w1).unwrap(), 1);
        assert!(kappa(&w1, &w2).unwrap() <= kappa0(&w1).unwrap().max(kappa0(&w2).unwrap()));
        assert_eq!(kappa(&id, &roll), Err(CoreError::GenusZero));
        let w3 = id.stabilize(2, 0).unwrap();
        assert_eq!(kappa(&w1, &w3), Err(CoreError::GenusMismatch(1, 2)));
    }

    #[test]
    fn side_and_complex_checks() {
        let (id, roll) = fig8_pair();
        let w = id.stabilize(1, 0).unwrap();
        assert!(tau(&w, &roll).is_err());
        let z = id.stabilize(0, 1).unwrap();
        assert!(kappa0(&z).is_err());
        let c = Arc::new(builtin("T34").unwrap());
        let other = SpunContext::new(c.clone()).unwrap().disk(&ChainMap::identity(&c)).unwrap();
        assert_eq!(tau(&id, &other), Err(CoreError::ComplexMismatch));
        assert!(v_k(&z, &z, 0).is_err());
    }

    #[test]
    fn stabilized_pairs() {
        // z-side stabilization: τ(V e1, V e2) = max(τ(e1, e2), 1)
        let (id, roll) = fig8_pair();
        let a = id.stabilize(0, 1).unwrap();
        let b = roll.stabilize(0, 1).unwrap();
        assert_eq!(tau(&a, &b).unwrap(), 1);
        assert_eq!(v_k(&a, &b, 1).unwrap(), 0);
        // mixed genus
        assert_eq!(tau(&a, &roll).unwrap(), tau(&roll, &a).unwrap());
    }

    #[test]
    fn search_cap_overrun_is_reported() {
        // a single non-torsion class never agrees with zero
        let (id, _) = fig8_pair();
        let c = id.complex().clone();
        let zero = DiskElement::new(c, Element::zero(), 0, Side::Z).unwrap();
        let cfg = SearchConfig { slack: Some(3), ..Default::default() };
        assert_eq!(tau_with(&id, &zero, &cfg), Err(CoreError::SearchCapExceeded { invariant: "tau", cap: 3 }));
    }
}
