//! Chain maps, the endomorphisms Φ and Ψ, null-homotopies and the
//! deformation maps used to build spun disks.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{entry_shift, forced_monomial, Element, Flavor, KnotComplex, Shift};
use crate::error::{CoreError, Result};
use crate::linalg::{BitVec, ImageBasis};
use crate::poly::{Monomial, Poly};

/// Same complex: shared allocation, same identity, or equal content.
pub fn same_complex(a: &KnotComplex, b: &KnotComplex) -> bool {
    std::ptr::eq(a, b) || a.id() == b.id() || a == b
}

/// A homogeneous F₂[U,V]-linear map. `entry(x, y)` is the coefficient of
/// `y` in `f(x)`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: Arc<KnotComplex>,
    target: Arc<KnotComplex>,
    rows: Vec<BTreeMap<usize, Poly>>,
    shift: Shift,
}

impl PartialEq for ChainMap {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.shift == other.shift
            && same_complex(&self.source, &other.source)
            && same_complex(&self.target, &other.target)
    }
}

fn derive_shift(
    source: &KnotComplex,
    target: &KnotComplex,
    rows: &[BTreeMap<usize, Poly>],
    declared: Option<Shift>,
) -> Result<Option<Shift>> {
    let mut shift = declared;
    for (x, row) in rows.iter().enumerate() {
        for (y, p) in row {
            for m in p.terms() {
                let s = entry_shift(source.generator(x), target.generator(*y), *m);
                match shift {
                    None => shift = Some(s),
                    Some(prev) if prev != s => {
                        return Err(CoreError::NonHomogeneous(format!(
                            "entry {} -> {} ({m}) has shift ({}, {}), expected ({}, {})",
                            source.generator(x).name,
                            target.generator(*y).name,
                            s.gr_w,
                            s.alexander,
                            prev.gr_w,
                            prev.alexander
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(shift)
}

impl ChainMap {
    /// Builds a map from `(source gen, target gen, coefficient)` triples.
    /// The shift is checked against `declared`, or derived from the entries
    /// (an empty map then gets `fallback`).
    pub fn from_entries(
        source: Arc<KnotComplex>,
        target: Arc<KnotComplex>,
        entries: impl IntoIterator<Item = (usize, usize, Poly)>,
        declared: Option<Shift>,
        fallback: Shift,
    ) -> Result<ChainMap> {
        let mut rows = vec![BTreeMap::<usize, Poly>::new(); source.len()];
        for (x, y, p) in entries {
            if x >= source.len() || y >= target.len() {
                return Err(CoreError::ShapeMismatch(format!("entry ({x}, {y}) out of range")));
            }
            *rows[x].entry(y).or_default() += &p;
        }
        for row in &mut rows {
            row.retain(|_, p| !p.is_zero());
        }
        let shift = derive_shift(&source, &target, &rows, declared)?.unwrap_or(fallback);
        Ok(ChainMap { source, target, rows, shift })
    }

    pub fn identity(c: &Arc<KnotComplex>) -> ChainMap {
        let rows = (0..c.len()).map(|i| [(i, Poly::one())].into_iter().collect()).collect();
        ChainMap { source: c.clone(), target: c.clone(), rows, shift: Shift::ZERO }
    }

    pub fn zero(source: &Arc<KnotComplex>, target: &Arc<KnotComplex>, shift: Shift) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), rows: vec![BTreeMap::new(); source.len()], shift }
    }

    pub fn source(&self) -> &Arc<KnotComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<KnotComplex> {
        &self.target
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn entry(&self, x: usize, y: usize) -> Option<&Poly> {
        self.rows[x].get(&y)
    }

    pub fn row(&self, x: usize) -> &BTreeMap<usize, Poly> {
        &self.rows[x]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> + '_ {
        self.rows.iter().enumerate().flat_map(|(x, row)| row.iter().map(move |(y, p)| (x, *y, p)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BTreeMap::is_empty)
    }

    /// All exponents non-negative.
    pub fn is_filtered(&self) -> bool {
        self.entries().all(|(_, _, p)| p.is_nonnegative())
    }

    pub fn apply(&self, e: &Element) -> Element {
        let mut out = Element::zero();
        for (x, p) in e.coords() {
            for (y, q) in &self.rows[*x] {
                out.add_poly(*y, &(p * q));
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap> {
        if !same_complex(&other.target, &self.source) {
            return Err(CoreError::ShapeMismatch("composition of incompatible maps".into()));
        }
        let mut rows = vec![BTreeMap::<usize, Poly>::new(); other.source.len()];
        for (x, row) in other.rows.iter().enumerate() {
            for (y, p) in row {
                for (z, q) in &self.rows[*y] {
                    *rows[x].entry(*z).or_default() += &(p * q);
                }
            }
            rows[x].retain(|_, p| !p.is_zero());
        }
        Ok(ChainMap {
            source: other.source.clone(),
            target: self.target.clone(),
            rows,
            shift: self.shift.compose(other.shift),
        })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if !same_complex(&self.source, &other.source) || !same_complex(&self.target, &other.target) {
            return Err(CoreError::ShapeMismatch("sum of maps between different complexes".into()));
        }
        let shift = if other.is_zero() {
            self.shift
        } else if self.is_zero() {
            other.shift
        } else if self.shift == other.shift {
            self.shift
        } else {
            return Err(CoreError::NonHomogeneous("summands have different shifts".into()));
        };
        let mut rows = self.rows.clone();
        for (x, row) in other.rows.iter().enumerate() {
            for (y, p) in row {
                *rows[x].entry(*y).or_default() += p;
            }
            rows[x].retain(|_, p| !p.is_zero());
        }
        Ok(ChainMap { source: self.source.clone(), target: self.target.clone(), rows, shift })
    }

    pub fn mul_monomial(&self, m: Monomial) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(y, p)| (*y, p.mul_monomial(m))).collect())
                .collect(),
            shift: self.shift.compose(Shift::of_monomial(m)),
        }
    }

    /// `f ⊗ g : A ⊗ B → A' ⊗ B'` on the given tensor complexes, with
    /// `(f ⊗ g)(a ⊗ b) = f(a) ⊗ g(b)`.
    pub fn tensor_on(
        f: &ChainMap,
        g: &ChainMap,
        source: &Arc<KnotComplex>,
        target: &Arc<KnotComplex>,
    ) -> Result<ChainMap> {
        let (n_b, n_b2) = (g.source.len(), g.target.len());
        if source.len() != f.source.len() * n_b || target.len() != f.target.len() * n_b2 {
            return Err(CoreError::ShapeMismatch("tensor factors do not match the given complexes".into()));
        }
        let mut rows = vec![BTreeMap::<usize, Poly>::new(); source.len()];
        for (a, frow) in f.rows.iter().enumerate() {
            for (b, grow) in g.rows.iter().enumerate() {
                let row = &mut rows[a * n_b + b];
                for (a2, p) in frow {
                    for (b2, q) in grow {
                        *row.entry(a2 * n_b2 + b2).or_default() += &(p * q);
                    }
                }
                row.retain(|_, p| !p.is_zero());
            }
        }
        Ok(ChainMap { source: source.clone(), target: target.clone(), rows, shift: f.shift.compose(g.shift) })
    }

    /// `f ⊗ g` on freshly built tensor complexes.
    pub fn tensor(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
        let s = Arc::new(f.source.tensor(&g.source)?);
        let t = if Arc::ptr_eq(&f.source, &f.target) && Arc::ptr_eq(&g.source, &g.target) {
            s.clone()
        } else {
            Arc::new(f.target.tensor(&g.target)?)
        };
        ChainMap::tensor_on(f, g, &s, &t)
    }

    /// `∂f + f∂`, as a map of shift `shift + (-1, 0)`.
    pub fn commutator_with_differential(&self) -> ChainMap {
        let mut rows = vec![BTreeMap::<usize, Poly>::new(); self.source.len()];
        for (x, row) in rows.iter_mut().enumerate() {
            for (y, p) in &self.rows[x] {
                for (z, q) in self.target.differential(*y) {
                    *row.entry(*z).or_default() += &(p * q);
                }
            }
            for (w, p) in self.source.differential(x) {
                for (z, q) in &self.rows[*w] {
                    *row.entry(*z).or_default() += &(p * q);
                }
            }
            row.retain(|_, p| !p.is_zero());
        }
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            rows,
            shift: self.shift.compose(Shift::DIFFERENTIAL),
        }
    }

    /// `∂f = f∂` exactly.
    pub fn is_chain_map(&self) -> bool {
        self.commutator_with_differential().is_zero()
    }

    /// Applies `V = 1` followed by `Û^i ↦ U^i V^i`, then multiplies by
    /// `V^k` where `k` is the Alexander shift. Both complexes must sit in
    /// Alexander grading 0.
    pub fn kn_red_v1(&self) -> Result<ChainMap> {
        if self.source.generators().iter().chain(self.target.generators()).any(|g| g.alexander != 0) {
            return Err(CoreError::InvalidParameter("knotification needs complexes in Alexander grading 0".into()));
        }
        let k = self.shift.alexander;
        let entries = self
            .entries()
            .map(|(x, y, p)| {
                let reduced = Poly::from_terms(p.terms().map(|m| Monomial::uhat(m.u)));
                (x, y, reduced.mul_monomial(Monomial::new(0, k)))
            })
            .collect::<Vec<_>>();
        ChainMap::from_entries(self.source.clone(), self.target.clone(), entries, None, self.shift)
    }
}

fn derivative_map(c: &Arc<KnotComplex>, by_u: bool) -> Result<ChainMap> {
    let entries = c
        .entries()
        .map(|(x, y, p)| (x, y, if by_u { p.d_du() } else { p.d_dv() }))
        .collect::<Vec<_>>();
    let fallback = if by_u { Shift::new(1, 1) } else { Shift::new(-1, -1) };
    ChainMap::from_entries(c.clone(), c.clone(), entries, None, fallback)
}

/// `Φ`: the formal `U`-derivative of the differential.
pub fn phi(c: &Arc<KnotComplex>) -> Result<ChainMap> {
    derivative_map(c, true)
}

/// `Ψ`: the formal `V`-derivative of the differential.
pub fn psi(c: &Arc<KnotComplex>) -> Result<ChainMap> {
    derivative_map(c, false)
}

pub fn phi_psi(c: &Arc<KnotComplex>) -> Result<ChainMap> {
    phi(c)?.compose(&psi(c)?)
}

/// `(id + ΦΨ)^l = id + (l mod 2) ΦΨ`.
pub fn roll_map(c: &Arc<KnotComplex>, l: u32) -> Result<ChainMap> {
    let id = ChainMap::identity(c);
    if l % 2 == 0 {
        Ok(id)
    } else {
        id.add(&phi_psi(c)?)
    }
}

/// `Sw(x ⊗ y) = y ⊗ x` on `C ⊗ C`.
pub fn swap_factors(cc: &Arc<KnotComplex>, n: usize) -> Result<ChainMap> {
    if cc.len() != n * n {
        return Err(CoreError::ShapeMismatch("complex is not a tensor square".into()));
    }
    let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i * n + j, j * n + i, Poly::one()))).collect::<Vec<_>>();
    ChainMap::from_entries(cc.clone(), cc.clone(), entries, Some(Shift::ZERO), Shift::ZERO)
}

/// The four homotopy-conjugate chain-level forms of the summand swap; each
/// is `Sw ∘ (id ⊗ id + A + B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwapVariant {
    /// `id ⊗ ΦΨ + Ψ ⊗ Φ`
    IdPhiPsiPsiPhi,
    /// `id ⊗ ΦΨ + Φ ⊗ Ψ`
    IdPhiPsiPhiPsi,
    /// `ΦΨ ⊗ id + Ψ ⊗ Φ`
    PhiPsiIdPsiPhi,
    /// `ΦΨ ⊗ id + Φ ⊗ Ψ`
    PhiPsiIdPhiPsi,
}

impl SwapVariant {
    pub const ALL: [SwapVariant; 4] = [
        SwapVariant::IdPhiPsiPsiPhi,
        SwapVariant::IdPhiPsiPhiPsi,
        SwapVariant::PhiPsiIdPsiPhi,
        SwapVariant::PhiPsiIdPhiPsi,
    ];
}

/// The summand swap of `K # K` on `cc = C ⊗ C`.
pub fn summand_swap_on(c: &Arc<KnotComplex>, cc: &Arc<KnotComplex>, variant: SwapVariant) -> Result<ChainMap> {
    let id = ChainMap::identity(c);
    let (f, p) = (phi(c)?, psi(c)?);
    let fp = f.compose(&p)?;
    let t = |a: &ChainMap, b: &ChainMap| ChainMap::tensor_on(a, b, cc, cc);
    let (fp_term, mixed) = match variant {
        SwapVariant::IdPhiPsiPsiPhi => (t(&id, &fp)?, t(&p, &f)?),
        SwapVariant::IdPhiPsiPhiPsi => (t(&id, &fp)?, t(&f, &p)?),
        SwapVariant::PhiPsiIdPsiPhi => (t(&fp, &id)?, t(&p, &f)?),
        SwapVariant::PhiPsiIdPhiPsi => (t(&fp, &id)?, t(&f, &p)?),
    };
    let inner = ChainMap::identity(cc).add(&fp_term)?.add(&mixed)?;
    swap_factors(cc, c.len())?.compose(&inner)
}

/// The summand swap on a freshly built `C ⊗ C`.
pub fn summand_swap(c: &Arc<KnotComplex>, variant: SwapVariant) -> Result<ChainMap> {
    let cc = Arc::new(c.tensor(c)?);
    summand_swap_on(c, &cc, variant)
}

/// Some `H` with `∂H + H∂ = f`, or `None`. Over the minus flavor `H` is
/// required to have non-negative exponents.
pub fn null_homotopy(f: &ChainMap) -> Result<Option<ChainMap>> {
    if !f.is_chain_map() {
        return Err(CoreError::NotAChainMap("∂f + f∂ != 0".into()));
    }
    let (s, t) = (f.source.clone(), f.target.clone());
    let (ns, nt) = (s.len(), t.len());
    let h_shift = Shift::new(f.shift.gr_w + 1, f.shift.alexander);
    let minus = s.flavor() == Flavor::Minus && t.flavor() == Flavor::Minus;

    let mut unknowns: Vec<(usize, usize, Monomial)> = Vec::new();
    for x in 0..ns {
        for y in 0..nt {
            if let Some(m) = forced_monomial(s.generator(x), t.generator(y), h_shift) {
                if !minus || m.is_nonnegative() {
                    unknowns.push((x, y, m));
                }
            }
        }
    }
    // equations: one per (x, z); column k flips the pairs h_{x,y} reaches
    let eq = |x: usize, z: usize| x * nt + z;
    let mut basis = ImageBasis::empty(ns * nt, unknowns.len());
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); ns];
    for w in 0..ns {
        for x in s.differential(w).keys() {
            incoming[*x].push(w);
        }
    }
    for (k, &(x, y, _)) in unknowns.iter().enumerate() {
        let mut col = BitVec::zeros(ns * nt);
        for z in t.differential(y).keys() {
            col.flip(eq(x, *z));
        }
        for &w in &incoming[x] {
            col.flip(eq(w, y));
        }
        basis.add_column(k, col);
    }
    let mut rhs = BitVec::zeros(ns * nt);
    for (x, z, p) in f.entries() {
        for _ in p.terms() {
            rhs.flip(eq(x, z));
        }
    }
    let Some(sol) = basis.solve(&rhs) else {
        return Ok(None);
    };
    let entries = sol.ones().map(|k| {
        let (x, y, m) = unknowns[k];
        (x, y, Poly::monomial(m))
    });
    let h = ChainMap::from_entries(s, t, entries.collect::<Vec<_>>(), Some(h_shift), h_shift)?;
    let check = h.commutator_with_differential();
    let diff = check.add(&ChainMap { shift: check.shift, ..f.clone() })?;
    if !diff.is_zero() {
        return Err(CoreError::NotAChainMap("homotopy witness failed verification".into()));
    }
    Ok(Some(h))
}

pub fn is_null_homotopic(f: &ChainMap) -> Result<bool> {
    Ok(null_homotopy(f)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{builtin, builtin_names, knot_names};

    fn arc(name: &str) -> Arc<KnotComplex> {
        Arc::new(builtin(name).unwrap())
    }

    #[test]
    fn phi_and_psi_of_figure_eight() {
        let c = arc("figure8");
        let f = phi(&c).unwrap();
        assert_eq!(f.entries().map(|(x, y, p)| (x, y, p.clone())).collect::<Vec<_>>(), vec![(3, 0, Poly::one()), (4, 1, Poly::one())]);
        assert_eq!(f.shift(), Shift::new(1, 1));
        let p = psi(&c).unwrap();
        assert_eq!(p.shift(), Shift::new(-1, -1));
        assert_eq!(p.entries().count(), 2);
    }

    #[test]
    fn phi_of_unknot_is_zero() {
        let u = arc("unknot");
        assert!(phi(&u).unwrap().is_zero());
        assert!(psi(&u).unwrap().is_zero());
    }

    #[test]
    fn hopf_model_maps() {
        let h = arc("hopf_neg_model");
        let p = psi(&h).unwrap();
        assert_eq!(p.entry(0, 1), Some(&Poly::one()));
        let fp = phi(&h).unwrap().compose(&p).unwrap();
        assert!(fp.is_zero());
        let witness = null_homotopy(&fp).unwrap().unwrap();
        assert!(witness.is_zero());
    }

    #[test]
    fn phi_and_psi_anticommute_with_the_differential() {
        for name in builtin_names() {
            let c = arc(name);
            assert!(phi(&c).unwrap().is_chain_map(), "{name}");
            assert!(psi(&c).unwrap().is_chain_map(), "{name}");
        }
    }

    #[test]
    fn squares_are_null_homotopic() {
        for name in builtin_names() {
            let c = arc(name);
            for f in [phi(&c).unwrap(), psi(&c).unwrap()] {
                let sq = f.compose(&f).unwrap();
                assert!(null_homotopy(&sq).unwrap().is_some(), "{name}");
            }
        }
    }

    #[test]
    fn identity_is_not_null_homotopic() {
        let c = arc("figure8");
        assert!(!is_null_homotopic(&ChainMap::identity(&c)).unwrap());
    }

    #[test]
    fn uhat_phi_psi_is_null_homotopic_on_every_knot() {
        for name in knot_names() {
            let c = arc(name);
            let m = phi_psi(&c).unwrap().mul_monomial(Monomial::uhat(1));
            assert!(is_null_homotopic(&m).unwrap(), "{name}");
        }
        // on 4₁ either H(x3) = V x4 or H(x0) = V x1 works
        let c = arc("figure8");
        let upp = phi_psi(&c).unwrap().mul_monomial(Monomial::uhat(1));
        let h = null_homotopy(&upp).unwrap().unwrap();
        let found = h.entries().map(|(x, y, p)| (x, y, p.clone())).collect::<Vec<_>>();
        assert!(found == vec![(3, 4, Poly::v_pow(1))] || found == vec![(0, 1, Poly::v_pow(1))], "{found:?}");
        for (x, y) in [(3, 4), (0, 1)] {
            let hand = ChainMap::from_entries(c.clone(), c.clone(), vec![(x, y, Poly::v_pow(1))], None, Shift::ZERO).unwrap();
            assert_eq!(hand.commutator_with_differential(), upp);
        }
    }

    #[test]
    fn roll_maps() {
        let c = arc("figure8");
        assert_eq!(roll_map(&c, 0).unwrap(), ChainMap::identity(&c));
        assert_eq!(roll_map(&c, 2).unwrap(), ChainMap::identity(&c));
        let r = roll_map(&c, 1).unwrap();
        let extra = r.add(&ChainMap::identity(&c)).unwrap();
        assert_eq!(extra.entries().map(|(x, y, p)| (x, y, p.clone())).collect::<Vec<_>>(), vec![(3, 1, Poly::one())]);
        for name in builtin_names() {
            let c = arc(name);
            let r = roll_map(&c, 1).unwrap();
            assert!(r.is_chain_map() && r.is_filtered(), "{name}");
        }
    }

    #[test]
    fn map_algebra() {
        let c = arc("T34");
        let f = phi(&c).unwrap();
        assert_eq!(f.compose(&ChainMap::identity(&c)).unwrap(), f);
        assert!(f.add(&f).unwrap().is_zero());
        let a1 = ChainMap::identity(&c).mul_monomial(Monomial::new(0, 1));
        let a2 = ChainMap::identity(&c).mul_monomial(Monomial::new(0, 2));
        assert_eq!(a1.compose(&a2).unwrap().shift().alexander, 3);
        let other = arc("figure8");
        assert!(f.compose(&phi(&other).unwrap()).is_err());
    }

    #[test]
    fn non_homogeneous_entries_are_rejected() {
        let c = arc("figure8");
        let err = ChainMap::from_entries(
            c.clone(),
            c.clone(),
            vec![(0, 0, Poly::one()), (1, 1, Poly::u_pow(1))],
            None,
            Shift::ZERO,
        );
        assert!(matches!(err, Err(CoreError::NonHomogeneous(_))));
    }

    #[test]
    fn swap_on_unknot_is_identity() {
        let u = arc("unknot");
        let s = summand_swap(&u, SwapVariant::IdPhiPsiPsiPhi).unwrap();
        assert_eq!(s, ChainMap::identity(s.source()));
    }

    #[test]
    fn swap_is_a_filtered_chain_map_and_squares_to_the_roll() {
        for name in ["trefoil_right", "figure8", "T34", "T45"] {
            let c = arc(name);
            let cc = Arc::new(c.tensor(&c).unwrap());
            let roll = roll_map(&cc, 1).unwrap();
            for v in SwapVariant::ALL {
                let s = summand_swap_on(&c, &cc, v).unwrap();
                assert!(s.is_chain_map() && s.is_filtered(), "{name} {v:?}");
                assert_eq!(s.shift(), Shift::ZERO);
                let diff = s.compose(&s).unwrap().add(&roll).unwrap();
                assert!(is_null_homotopic(&diff).unwrap(), "{name} {v:?}");
            }
        }
    }

    #[test]
    fn knotify_on_unknot_type_complexes() {
        // a two-generator complex over F₂[Û] in Alexander grading 0
        let gens = vec![
            crate::complex::Generator::new("a", 0, 0),
            crate::complex::Generator::new("b", -1, 0),
            crate::complex::Generator::new("c", -2, 0),
        ];
        let c = Arc::new(
            KnotComplex::new("u", Flavor::Minus, gens, vec![(0, 1, Poly::monomial(Monomial::uhat(0)))]).unwrap(),
        );
        // maps of Alexander degree k: V^k times a Û-power
        for k in 0..3 {
            let f = ChainMap::identity(&c).mul_monomial(Monomial::new(1, 1 + k));
            let back = f.kn_red_v1().unwrap();
            assert_eq!(back, f);
            let diff = back.add(&f).unwrap();
            assert!(is_null_homotopic(&diff).unwrap());
        }
    }
}
