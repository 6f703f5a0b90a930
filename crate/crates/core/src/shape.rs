//! Sub-quotient shapes of the `A = 0` part of CFK^∞ and the finite F₂
//! slices they cut out.
//!
//! The F₂-basis of `CFK^∞` in Alexander grading 0 is `{U^i V^j x : j = i - A(x)}`
//! and `gr_w(U^i V^j x) = gr_w(x) - 2i`. In a fixed Maslov degree each
//! generator therefore contributes at most one basis monomial, so a
//! `(shape, degree)` slice has at most as many basis vectors as the complex
//! has generators.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use parking_lot::RwLock;

use crate::complex::{Element, KnotComplex};
use crate::error::{CoreError, Result};
use crate::linalg::{BitMatrix, BitVec, ImageBasis};
use crate::poly::Monomial;

type Predicate = dyn Fn(i64, i64) -> bool + Send + Sync;

/// A user-supplied lattice predicate. Compared by label and identity of the
/// closure.
#[derive(Clone)]
pub struct CustomShape {
    pub label: String,
    predicate: Arc<Predicate>,
}

impl CustomShape {
    pub fn new(label: impl Into<String>, predicate: impl Fn(i64, i64) -> bool + Send + Sync + 'static) -> Self {
        CustomShape { label: label.into(), predicate: Arc::new(predicate) }
    }
}

impl fmt::Debug for CustomShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Custom({})", self.label)
    }
}

impl PartialEq for CustomShape {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && Arc::ptr_eq(&self.predicate, &other.predicate)
    }
}

impl Eq for CustomShape {}

impl Hash for CustomShape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.label.hash(state);
        (Arc::as_ptr(&self.predicate) as *const () as usize).hash(state);
    }
}

/// A set of exponent pairs `(i, j)` closed under rectangles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SubQuotientShape {
    /// `i' ≥ i, j' ≥ j`
    R { i: i64, j: i64 },
    /// `{0} × [-n, ∞)`
    I { n: i64 },
    /// `I(n) ∪ [0, m] × {-n}`
    L { m: i64, n: i64 },
    /// `j ≥ c`
    H { c: i64 },
    /// `i ≥ k, j = r`
    T { r: i64, k: i64 },
    /// `H(r + 1) ∪ T(r, k)`
    Z { r: i64, k: i64 },
    /// `t·j + (2 - t)·i ≥ -s`
    HalfPlane { t: Rational64, s: Rational64 },
    Custom(CustomShape),
}

impl SubQuotientShape {
    pub fn contains(&self, i: i64, j: i64) -> bool {
        use SubQuotientShape::*;
        match self {
            R { i: a, j: b } => i >= *a && j >= *b,
            I { n } => i == 0 && j >= -n,
            L { m, n } => (i == 0 && j >= -n) || (j == -n && (0..=*m).contains(&i)),
            H { c } => j >= *c,
            T { r, k } => i >= *k && j == *r,
            Z { r, k } => j > *r || (j == *r && i >= *k),
            HalfPlane { t, s } => {
                *t * Rational64::from_integer(j) + (Rational64::from_integer(2) - *t) * Rational64::from_integer(i) >= -*s
            }
            Custom(c) => (c.predicate)(i, j),
        }
    }

    /// Membership in the smallest upward-closed set containing the shape;
    /// `None` when unknown.
    pub fn hull_contains(&self, i: i64, j: i64) -> Option<bool> {
        use SubQuotientShape::*;
        Some(match self {
            R { .. } | HalfPlane { .. } | H { .. } => self.contains(i, j),
            I { n } | L { n, .. } => i >= 0 && j >= -n,
            T { r, k } => i >= *k && j >= *r,
            Z { r, k } => j > *r || (i >= *k && j >= *r),
            Custom(_) => return None,
        })
    }

    /// Bounds on `i` for basis monomials `U^i V^{i-a} x` with `A(x) = a`.
    /// `None` means unbounded (or unknown for custom shapes).
    fn i_bounds(&self, a: i64) -> (Option<i64>, Option<i64>) {
        use SubQuotientShape::*;
        match self {
            R { i, j } => (Some((*i).max(j + a)), None),
            I { .. } => (Some(0), Some(0)),
            L { m, .. } => (Some(0), Some((*m).max(0))),
            H { c } => (Some(c + a), None),
            T { r, .. } => (Some(r + a), Some(r + a)),
            Z { r, .. } => (Some(r + a), None),
            HalfPlane { t, s } => {
                let lo = (*t * Rational64::from_integer(a) - *s) / Rational64::from_integer(2);
                (Some(lo.ceil().to_integer()), None)
            }
            Custom(_) => (None, None),
        }
    }
}

impl fmt::Display for SubQuotientShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SubQuotientShape::*;
        match self {
            R { i, j } => write!(f, "R({i},{j})"),
            I { n } => write!(f, "I({n})"),
            L { m, n } => write!(f, "L({m},{n})"),
            H { c } => write!(f, "H({c})"),
            T { r, k } => write!(f, "T({r},{k})"),
            Z { r, k } => write!(f, "Z({r},{k})"),
            HalfPlane { t, s } => write!(f, "G[t={t}](s={s})"),
            Custom(c) => write!(f, "{}", c.label),
        }
    }
}

/// Checks the rectangle condition on the window `[-radius, radius]²`.
pub fn is_subquotient_on_window(shape: &SubQuotientShape, radius: i64) -> bool {
    let pts: Vec<(i64, i64)> = (-radius..=radius)
        .flat_map(|i| (-radius..=radius).map(move |j| (i, j)))
        .filter(|&(i, j)| shape.contains(i, j))
        .collect();
    for &(i, j) in &pts {
        for &(m, n) in &pts {
            if i <= m && j <= n {
                for a in i..=m {
                    for b in j..=n {
                        if !shape.contains(a, b) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Basis monomial `U^i V^j x` of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub gen: usize,
    pub i: i64,
    pub j: i64,
}

/// Inclusive Maslov-degree window; an open side is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GrWindow {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl GrWindow {
    pub fn new(lo: i64, hi: i64) -> Self {
        GrWindow { lo: Some(lo), hi: Some(hi) }
    }

    pub fn unbounded() -> Self {
        GrWindow::default()
    }
}

/// The induced differential of `C(K, S)` on the basis monomials in a window.
/// Entry `(r, c)` is set when `labels[r]` occurs in `∂ labels[c]`.
#[derive(Clone, Debug)]
pub struct ShapeSlice {
    pub labels: Vec<BasisLabel>,
    pub degrees: Vec<i64>,
    pub matrix: BitMatrix,
}

impl ShapeSlice {
    pub fn dimension_in_degree(&self, d: i64) -> usize {
        self.degrees.iter().filter(|x| **x == d).count()
    }
}

/// Basis index of `U^i V^{i - A(x)} x` for degree `d`, when it exists.
fn degree_exponent(c: &KnotComplex, gen: usize, d: i64) -> Option<i64> {
    let diff = c.generator(gen).gr_w - d;
    diff.is_even().then_some(diff / 2)
}

pub fn shape_slice(c: &KnotComplex, shape: &SubQuotientShape, window: GrWindow) -> Result<ShapeSlice> {
    let mut labels = Vec::new();
    for (g, gen) in c.generators().iter().enumerate() {
        let (shape_lo, shape_hi) = shape.i_bounds(gen.alexander);
        // degree ≥ lo  ⟺  i ≤ (gr_w - lo)/2
        let win_hi = window.lo.map(|lo| (gen.gr_w - lo).div_euclid(2));
        let win_lo = window.hi.map(|hi| -((hi - gen.gr_w).div_euclid(2)));
        let lo = match (shape_lo, win_lo) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return Err(CoreError::InfiniteSlice(format!("{shape} is unbounded below the window for {}", gen.name)))
            }
        };
        let hi = match (shape_hi, win_hi) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => {
                return Err(CoreError::InfiniteSlice(format!("{shape} is unbounded above the window for {}", gen.name)))
            }
        };
        for i in lo..=hi {
            let j = i - gen.alexander;
            if shape.contains(i, j) {
                labels.push(BasisLabel { gen: g, i, j });
            }
        }
    }
    let degree = |l: &BasisLabel| c.generator(l.gen).gr_w - 2 * l.i;
    labels.sort_by_key(|l| (-degree(l), l.gen));
    let pos: HashMap<BasisLabel, usize> = labels.iter().enumerate().map(|(k, l)| (*l, k)).collect();
    let mut entries = Vec::new();
    for (col, l) in labels.iter().enumerate() {
        for (t, p) in c.differential(l.gen) {
            for m in p.terms() {
                let target = BasisLabel { gen: *t, i: l.i + m.u, j: l.j + m.v };
                if let Some(&row) = pos.get(&target) {
                    entries.push((row, col));
                }
            }
        }
    }
    let n = labels.len();
    let degrees = labels.iter().map(degree).collect();
    Ok(ShapeSlice { labels, degrees, matrix: BitMatrix::from_entries(n, n, entries) })
}

/// Boundaries of one `(shape, degree)` slice, ready for membership tests.
pub(crate) struct Probe {
    /// generator → row in degree `d`
    rows: Vec<Option<usize>>,
    row_count: usize,
    /// columns: basis monomials in degree `d + 1`
    cols: Vec<BasisLabel>,
    image: ImageBasis,
}

impl Probe {
    fn build(c: &KnotComplex, shape: &SubQuotientShape, d: i64) -> Probe {
        let mut rows = vec![None; c.len()];
        let mut row_count = 0;
        for g in 0..c.len() {
            if let Some(i) = degree_exponent(c, g, d) {
                if shape.contains(i, i - c.generator(g).alexander) {
                    rows[g] = Some(row_count);
                    row_count += 1;
                }
            }
        }
        let mut cols = Vec::new();
        for g in 0..c.len() {
            if let Some(i) = degree_exponent(c, g, d + 1) {
                let j = i - c.generator(g).alexander;
                if shape.contains(i, j) {
                    cols.push(BasisLabel { gen: g, i, j });
                }
            }
        }
        let mut image = ImageBasis::empty(row_count, cols.len());
        for (k, l) in cols.iter().enumerate() {
            let mut v = BitVec::zeros(row_count);
            for (t, p) in c.differential(l.gen) {
                for m in p.terms() {
                    if shape.contains(l.i + m.u, l.j + m.v) {
                        if let Some(r) = rows[*t] {
                            v.flip(r);
                        }
                    }
                }
            }
            image.add_column(k, v);
        }
        Probe { rows, row_count, cols, image }
    }
}

/// Per-complex memo of slice probes keyed by `(shape, degree)`.
#[derive(Clone, Default)]
pub(crate) struct SliceCache(Arc<RwLock<HashMap<(SubQuotientShape, i64), Arc<Probe>>>>);

impl fmt::Debug for SliceCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SliceCache({} entries)", self.0.read().len())
    }
}

impl SliceCache {
    fn probe(&self, c: &KnotComplex, shape: &SubQuotientShape, d: i64) -> Arc<Probe> {
        let key = (shape.clone(), d);
        if let Some(p) = self.0.read().get(&key) {
            return p.clone();
        }
        let built = Arc::new(Probe::build(c, shape, d));
        self.0.write().entry(key).or_insert(built).clone()
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.0.read().len()
    }
}

/// Maslov degree of an element of the `A = 0` part of CFK^∞, `None` if zero.
pub fn lattice_degree(c: &KnotComplex, e: &Element) -> Result<Option<i64>> {
    for (g, m) in e.terms() {
        if c.generator(g).alexander + m.v - m.u != 0 {
            return Err(CoreError::InvalidElement(format!(
                "term {m}*{} is not in Alexander grading 0",
                c.generator(g).name
            )));
        }
    }
    Ok(e.bigrading(c)?.map(|(gr, _)| gr))
}

fn rhs(c: &KnotComplex, shape: &SubQuotientShape, e: &Element, probe: &Probe) -> Result<BitVec> {
    let mut b = BitVec::zeros(probe.row_count);
    for (g, m) in e.terms() {
        if let Some(false) = shape.hull_contains(m.u, m.v) {
            return Err(CoreError::InvalidElement(format!(
                "term {m}*{} lies outside the filtered hull of {shape}",
                c.generator(g).name
            )));
        }
        if shape.contains(m.u, m.v) {
            // homogeneity puts the term on the generator's degree-d monomial
            let r = probe.rows[g].expect("homogeneous term has a row");
            b.flip(r);
        }
    }
    Ok(b)
}

/// Whether the image of `e` in `C(K, S)` is a boundary. `e` must be a
/// homogeneous chain in Alexander grading 0 supported in the hull of `S`.
pub fn is_boundary(c: &KnotComplex, shape: &SubQuotientShape, e: &Element) -> Result<bool> {
    let Some(d) = lattice_degree(c, e)? else {
        return Ok(true);
    };
    let probe = c.slices.probe(c, shape, d);
    let b = rhs(c, shape, e, &probe)?;
    Ok(probe.image.contains(&b))
}

/// Some `y` with `∂y = e` in `C(K, S)`, if one exists.
pub fn boundary_preimage(c: &KnotComplex, shape: &SubQuotientShape, e: &Element) -> Result<Option<Element>> {
    let Some(d) = lattice_degree(c, e)? else {
        return Ok(Some(Element::zero()));
    };
    let probe = c.slices.probe(c, shape, d);
    let b = rhs(c, shape, e, &probe)?;
    Ok(probe.image.solve(&b).map(|x| {
        Element::from_terms(x.ones().map(|k| {
            let l = probe.cols[k];
            (l.gen, Monomial::new(l.i, l.j))
        }))
    }))
}

/// Whether `∂e` vanishes after projecting to `C(K, S)`.
pub fn is_cycle_in_shape(c: &KnotComplex, shape: &SubQuotientShape, e: &Element) -> Result<bool> {
    lattice_degree(c, e)?;
    Ok(e.boundary(c).terms().all(|(_, m)| !shape.contains(m.u, m.v)))
}

/// A shape together with the complex it will be evaluated on.
#[derive(Clone, Debug)]
pub struct BoundShape<'a> {
    pub complex: &'a KnotComplex,
    pub shape: SubQuotientShape,
}

impl BoundShape<'_> {
    pub fn basis_in_degree(&self, d: i64) -> Vec<BasisLabel> {
        (0..self.complex.len())
            .filter_map(|g| {
                let i = degree_exponent(self.complex, g, d)?;
                let j = i - self.complex.generator(g).alexander;
                self.shape.contains(i, j).then_some(BasisLabel { gen: g, i, j })
            })
            .collect()
    }

    pub fn is_boundary(&self, e: &Element) -> Result<bool> {
        is_boundary(self.complex, &self.shape, e)
    }
}

/// `A_k^-(K) = C(K, R(0, -k))`.
pub fn a_k_minus(c: &KnotComplex, k: i64) -> Result<BoundShape<'_>> {
    if k < 0 {
        return Err(CoreError::InvalidParameter(format!("A_k needs k >= 0, got {k}")));
    }
    Ok(BoundShape { complex: c, shape: SubQuotientShape::R { i: 0, j: -k } })
}
