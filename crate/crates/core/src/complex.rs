//! Finitely generated free bigraded complexes over F₂[U,V].
//!
//! A generator `x` carries the Maslov grading `gr_w` and the Alexander grading
//! `A`; `gr_z = gr_w - 2A`. Multiplication by `U` lowers `gr_w` by 2 and `A` by
//! 1, multiplication by `V` raises `A` by 1. The differential lowers `gr_w` by
//! one and preserves `A`, which forces the exponents of every entry: a valid
//! entry is always a single monomial.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{CoreError, Result};
use crate::poly::{Monomial, Poly, Substitution};
use crate::shape::SliceCache;

static NEXT_COMPLEX_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub gr_w: i64,
    pub alexander: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, gr_w: i64, alexander: i64) -> Self {
        Generator { name: name.into(), gr_w, alexander }
    }

    pub fn gr_z(&self) -> i64 {
        self.gr_w - 2 * self.alexander
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Coefficients in F₂[U,V].
    Minus,
    /// Coefficients in F₂[U,V,U⁻¹,V⁻¹].
    Infinity,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Minus => "minus",
            Flavor::Infinity => "infinity",
        }
    }
}

/// The bigrading change `(Δgr_w, ΔA)` of a homogeneous map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Shift {
    pub gr_w: i64,
    pub alexander: i64,
}

impl Shift {
    pub const ZERO: Shift = Shift { gr_w: 0, alexander: 0 };
    pub const DIFFERENTIAL: Shift = Shift { gr_w: -1, alexander: 0 };

    pub fn new(gr_w: i64, alexander: i64) -> Self {
        Shift { gr_w, alexander }
    }

    pub fn of_monomial(m: Monomial) -> Self {
        Shift { gr_w: -2 * m.u, alexander: m.v - m.u }
    }

    pub fn compose(self, other: Shift) -> Shift {
        Shift { gr_w: self.gr_w + other.gr_w, alexander: self.alexander + other.alexander }
    }
}

/// The only monomial `U^a V^b` that a homogeneous map of the given shift can
/// use on the entry `source → target`, or `None` if parity rules it out.
pub fn forced_monomial(source: &Generator, target: &Generator, shift: Shift) -> Option<Monomial> {
    let twice_a = target.gr_w - source.gr_w - shift.gr_w;
    if twice_a % 2 != 0 {
        return None;
    }
    let a = twice_a / 2;
    let b = source.alexander + shift.alexander - target.alexander + a;
    Some(Monomial::new(a, b))
}

/// The shift a monomial entry `source → target` would have.
pub fn entry_shift(source: &Generator, target: &Generator, m: Monomial) -> Shift {
    Shift {
        gr_w: target.gr_w - 2 * m.u - source.gr_w,
        alexander: target.alexander + m.v - m.u - source.alexander,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Empty,
    DuplicateName(String),
    UnknownGenerator(usize),
    SquareNonZero { source: String, target: String, coefficient: Poly },
    Grading { source: String, target: String, monomial: Monomial },
    NegativeExponent { source: String, target: String, monomial: Monomial },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty complex"),
            Violation::DuplicateName(n) => write!(f, "duplicate generator `{n}`"),
            Violation::UnknownGenerator(i) => write!(f, "differential refers to generator #{i}"),
            Violation::SquareNonZero { source, target, coefficient } => {
                write!(f, "d^2 != 0: ({source} -> {target}) has coefficient {coefficient}")
            }
            Violation::Grading { source, target, monomial } => {
                write!(f, "grading violation at ({source} -> {target}): {monomial}")
            }
            Violation::NegativeExponent { source, target, monomial } => {
                write!(f, "negative exponent in minus complex at ({source} -> {target}): {monomial}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// A free complex over F₂[U,V] (or its Laurent extension) on finitely many
/// homogeneous generators. Immutable once built.
#[derive(Clone, Debug)]
pub struct KnotComplex {
    name: String,
    flavor: Flavor,
    gens: Vec<Generator>,
    diff: Vec<BTreeMap<usize, Poly>>,
    index: HashMap<String, usize>,
    id: u64,
    pub(crate) slices: SliceCache,
}

impl PartialEq for KnotComplex {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.flavor == other.flavor && self.gens == other.gens && self.diff == other.diff
    }
}

impl KnotComplex {
    /// Assembles a complex without validating it. Repeated entries add.
    pub fn from_parts(
        name: impl Into<String>,
        flavor: Flavor,
        gens: Vec<Generator>,
        entries: impl IntoIterator<Item = (usize, usize, Poly)>,
    ) -> Self {
        let mut diff = vec![BTreeMap::<usize, Poly>::new(); gens.len()];
        for (s, t, p) in entries {
            if s >= gens.len() {
                continue;
            }
            let slot = diff[s].entry(t).or_default();
            *slot += &p;
        }
        for row in &mut diff {
            row.retain(|_, p| !p.is_zero());
        }
        let index = gens.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect();
        KnotComplex {
            name: name.into(),
            flavor,
            gens,
            diff,
            index,
            id: NEXT_COMPLEX_ID.fetch_add(1, Ordering::Relaxed),
            slices: SliceCache::default(),
        }
    }

    /// Assembles and validates.
    pub fn new(
        name: impl Into<String>,
        flavor: Flavor,
        gens: Vec<Generator>,
        entries: impl IntoIterator<Item = (usize, usize, Poly)>,
    ) -> Result<Self> {
        let c = KnotComplex::from_parts(name, flavor, gens, entries);
        c.validate().map_err(CoreError::Validation)?;
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Identity used to key slice caches. Clones share it.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// `∂x_i` as a map target → coefficient.
    pub fn differential(&self, i: usize) -> &BTreeMap<usize, Poly> {
        &self.diff[i]
    }

    pub fn entry(&self, source: usize, target: usize) -> Option<&Poly> {
        self.diff[source].get(&target)
    }

    /// All nonzero entries `(source, target, coefficient)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> + '_ {
        self.diff.iter().enumerate().flat_map(|(s, row)| row.iter().map(move |(t, p)| (s, *t, p)))
    }

    pub fn max_alexander(&self) -> i64 {
        self.gens.iter().map(|g| g.alexander).max().unwrap_or(0)
    }

    /// Checks `∂² = 0`, the grading law entry by entry, and the exponent law
    /// of the minus flavor. Every violation is reported.
    pub fn validate(&self) -> std::result::Result<(), ValidationReport> {
        let mut report = ValidationReport::default();
        if self.gens.is_empty() {
            report.violations.push(Violation::Empty);
        }
        let mut seen = HashMap::new();
        for g in &self.gens {
            if seen.insert(g.name.as_str(), ()).is_some() {
                report.violations.push(Violation::DuplicateName(g.name.clone()));
            }
        }
        let n = self.gens.len();
        for (s, t, p) in self.entries() {
            if t >= n {
                report.violations.push(Violation::UnknownGenerator(t));
                continue;
            }
            let (src, tgt) = (&self.gens[s], &self.gens[t]);
            for m in p.terms() {
                if entry_shift(src, tgt, *m) != Shift::DIFFERENTIAL {
                    report.violations.push(Violation::Grading {
                        source: src.name.clone(),
                        target: tgt.name.clone(),
                        monomial: *m,
                    });
                }
                if self.flavor == Flavor::Minus && !m.is_nonnegative() {
                    report.violations.push(Violation::NegativeExponent {
                        source: src.name.clone(),
                        target: tgt.name.clone(),
                        monomial: *m,
                    });
                }
            }
        }
        if report.violations.iter().any(|v| matches!(v, Violation::UnknownGenerator(_))) {
            return Err(report);
        }
        for x in 0..n {
            let mut square: BTreeMap<usize, Poly> = BTreeMap::new();
            for (y, p) in &self.diff[x] {
                for (z, q) in &self.diff[*y] {
                    *square.entry(*z).or_default() += &(p * q);
                }
            }
            for (z, coefficient) in square {
                if !coefficient.is_zero() {
                    report.violations.push(Violation::SquareNonZero {
                        source: self.gens[x].name.clone(),
                        target: self.gens[z].name.clone(),
                        coefficient,
                    });
                }
            }
        }
        if report.is_ok() {
            Ok(())
        } else {
            Err(report)
        }
    }

    /// `Hom(C, R)`: gradings negated and the differential transposed.
    pub fn dual(&self) -> KnotComplex {
        let gens = self
            .gens
            .iter()
            .map(|g| Generator::new(dual_name(&g.name), -g.gr_w, -g.alexander))
            .collect();
        let entries = self.entries().map(|(s, t, p)| (t, s, p.clone())).collect::<Vec<_>>();
        let name = match self.name.strip_prefix("dual(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("dual({})", self.name),
        };
        KnotComplex::from_parts(name, self.flavor, gens, entries)
    }

    /// `C₁ ⊗ C₂` over F₂[U,V]. Generator `(i, j)` sits at index
    /// `i * other.len() + j`.
    pub fn tensor(&self, other: &KnotComplex) -> Result<KnotComplex> {
        if self.flavor != other.flavor {
            return Err(CoreError::ShapeMismatch("tensor factors have different flavors".into()));
        }
        let n2 = other.len();
        let mut gens = Vec::with_capacity(self.len() * n2);
        for a in &self.gens {
            for b in &other.gens {
                gens.push(Generator::new(
                    pair_name(&a.name, &b.name),
                    a.gr_w + b.gr_w,
                    a.alexander + b.alexander,
                ));
            }
        }
        let mut entries = Vec::new();
        for i in 0..self.len() {
            for j in 0..n2 {
                let src = i * n2 + j;
                for (t, p) in &self.diff[i] {
                    entries.push((src, t * n2 + j, p.clone()));
                }
                for (t, p) in &other.diff[j] {
                    entries.push((src, i * n2 + t, p.clone()));
                }
            }
        }
        Ok(KnotComplex::from_parts(
            format!("tensor({},{})", self.name, other.name),
            self.flavor,
            gens,
            entries,
        ))
    }

    /// Base change to a quotient (or localization) of F₂[U,V].
    pub fn reduce(&self, reduction: Reduction) -> Result<ReducedComplex> {
        if self.flavor != Flavor::Minus {
            return Err(CoreError::InvalidParameter("reductions are defined on minus complexes".into()));
        }
        let gens = self
            .gens
            .iter()
            .map(|g| match reduction {
                Reduction::VOne => ReducedGenerator {
                    name: g.name.clone(),
                    grading: g.gr_w,
                    alexander: None,
                    filtration: Some(g.alexander),
                },
                Reduction::UOne => ReducedGenerator {
                    name: g.name.clone(),
                    grading: g.gr_z(),
                    alexander: None,
                    filtration: Some(g.alexander),
                },
                _ => ReducedGenerator {
                    name: g.name.clone(),
                    grading: g.gr_w,
                    alexander: Some(g.alexander),
                    filtration: None,
                },
            })
            .collect();
        let rule = reduction.substitution();
        let diff = self
            .diff
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(t, p)| (*t, p.substitute(rule)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect()
            })
            .collect();
        Ok(ReducedComplex { name: format!("{}[{}]", self.name, reduction.label()), reduction, gens, diff })
    }

    /// `Σ (-1)^{gr_w} t^A` over the generators, as exponent → coefficient.
    pub fn graded_euler_characteristic(&self) -> BTreeMap<i64, i64> {
        let mut chi = BTreeMap::new();
        for g in &self.gens {
            let sign = if g.gr_w.rem_euclid(2) == 0 { 1 } else { -1 };
            *chi.entry(g.alexander).or_insert(0) += sign;
        }
        chi.retain(|_, c| *c != 0);
        chi
    }
}

/// Name of the dual generator; dualizing twice gives the original name back.
pub fn dual_name(name: &str) -> String {
    match name.strip_suffix("^v") {
        Some(inner) => unwrap_parens(inner).to_string(),
        None if name.contains('|') => format!("({name})^v"),
        None => format!("{name}^v"),
    }
}

fn unwrap_parens(s: &str) -> &str {
    s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).filter(|r| r.contains('|')).unwrap_or(s)
}

pub fn pair_name(a: &str, b: &str) -> String {
    let wrap = |s: &str| if s.contains('|') && !s.ends_with("^v") { format!("({s})") } else { s.to_string() };
    format!("{}|{}", wrap(a), wrap(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    /// F₂[V]
    UZero,
    /// F₂[U]
    VZero,
    /// F₂[Û], Alexander grading kept only as a filtration
    VOne,
    /// F₂[Û], graded by gr_z
    UOne,
    /// F₂
    BothZero,
}

impl Reduction {
    pub fn substitution(self) -> Substitution {
        match self {
            Reduction::UZero => Substitution::U_ZERO,
            Reduction::VZero => Substitution::V_ZERO,
            Reduction::VOne => Substitution::V_ONE.collapsed(),
            Reduction::UOne => Substitution::U_ONE.collapsed(),
            Reduction::BothZero => Substitution::BOTH_ZERO,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Reduction::UZero => "U=0",
            Reduction::VZero => "V=0",
            Reduction::VOne => "V=1",
            Reduction::UOne => "U=1",
            Reduction::BothZero => "U=V=0",
        }
    }

    pub fn is_uhat_ring(self) -> bool {
        matches!(self, Reduction::VOne | Reduction::UOne)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGenerator {
    pub name: String,
    /// gr_w, or gr_z after setting `U = 1`
    pub grading: i64,
    pub alexander: Option<i64>,
    /// Alexander grading retained as filtration metadata after `V = 1` or `U = 1`.
    pub filtration: Option<i64>,
}

/// A complex over one of the quotient rings of F₂[U,V]. For the F₂[Û]
/// rings the exponent of Û is stored in the `u` slot of each monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedComplex {
    pub name: String,
    pub reduction: Reduction,
    pub gens: Vec<ReducedGenerator>,
    pub diff: Vec<BTreeMap<usize, Poly>>,
}

impl ReducedComplex {
    pub fn entry(&self, source: usize, target: usize) -> Option<&Poly> {
        self.diff[source].get(&target)
    }

    pub fn is_zero_differential(&self) -> bool {
        self.diff.iter().all(BTreeMap::is_empty)
    }

    /// Applies a further substitution to every entry.
    pub fn substitute(&self, rule: Substitution, reduction: Reduction) -> ReducedComplex {
        ReducedComplex {
            name: self.name.clone(),
            reduction,
            gens: self.gens.clone(),
            diff: self
                .diff
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(t, p)| (*t, p.substitute(rule)))
                        .filter(|(_, p)| !p.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    /// Ranks of the F₂ homology, by grading, after the remaining variable is
    /// set to 1.
    pub fn homology_ranks_at_one(&self) -> BTreeMap<i64, usize> {
        use crate::linalg::BitMatrix;
        let to_one = Substitution { u: crate::poly::VarRule::One, v: crate::poly::VarRule::One, collapse_to_uhat: false };
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            by_degree.entry(g.grading).or_default().push(i);
        }
        let rank_of = |from: i64| -> usize {
            let (Some(src), Some(dst)) = (by_degree.get(&from), by_degree.get(&(from - 1))) else {
                return 0;
            };
            let pos: HashMap<usize, usize> = dst.iter().enumerate().map(|(k, g)| (*g, k)).collect();
            let mut entries = Vec::new();
            for (c, s) in src.iter().enumerate() {
                for (t, p) in &self.diff[*s] {
                    if let Some(&r) = pos.get(t) {
                        if !p.substitute(to_one).is_zero() {
                            entries.push((r, c));
                        }
                    }
                }
            }
            BitMatrix::from_entries(dst.len(), src.len(), entries).rank()
        };
        let mut out = BTreeMap::new();
        for (&d, gens) in &by_degree {
            let h = gens.len() - rank_of(d) - rank_of(d + 1);
            if h > 0 {
                out.insert(d, h);
            }
        }
        out
    }

    /// `C ⊗_{F₂[Û]} F₂[U,V]`: each `Û^i` becomes `U^i V^i` and every
    /// generator is placed in Alexander grading 0.
    pub fn knotify(&self) -> Result<KnotComplex> {
        if !self.reduction.is_uhat_ring() {
            return Err(CoreError::InvalidParameter(format!(
                "knotification needs a complex over F2[Û], got {}",
                self.reduction.label()
            )));
        }
        let gens = self.gens.iter().map(|g| Generator::new(g.name.clone(), g.grading, 0)).collect();
        let entries = self
            .diff
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |(t, p)| (s, *t, uhat_to_uv(p))))
            .collect::<Vec<_>>();
        KnotComplex::new(format!("Kn({})", self.name), Flavor::Minus, gens, entries)
    }
}

/// `Û^i ↦ U^i V^i` for polynomials stored in the collapsed convention.
pub fn uhat_to_uv(p: &Poly) -> Poly {
    Poly::from_terms(p.terms().map(|m| Monomial::uhat(m.u)))
}

/// A chain in a complex: generator → coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Element {
    coords: BTreeMap<usize, Poly>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Monomial)>) -> Self {
        let mut e = Element::zero();
        for (g, m) in terms {
            e.add_term(g, m);
        }
        e
    }

    pub fn generator(g: usize) -> Self {
        Element::from_terms([(g, Monomial::ONE)])
    }

    pub fn add_term(&mut self, g: usize, m: Monomial) {
        let slot = self.coords.entry(g).or_default();
        slot.toggle(m);
        if slot.is_zero() {
            self.coords.remove(&g);
        }
    }

    pub fn add_poly(&mut self, g: usize, p: &Poly) {
        let slot = self.coords.entry(g).or_default();
        *slot += p;
        if slot.is_zero() {
            self.coords.remove(&g);
        }
    }

    pub fn coords(&self) -> &BTreeMap<usize, Poly> {
        &self.coords
    }

    pub fn coefficient(&self, g: usize) -> Poly {
        self.coords.get(&g).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Monomial)> + '_ {
        self.coords.iter().flat_map(|(g, p)| p.terms().map(move |m| (*g, *m)))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (g, p) in &other.coords {
            out.add_poly(*g, p);
        }
        out
    }

    pub fn mul_monomial(&self, m: Monomial) -> Element {
        Element { coords: self.coords.iter().map(|(g, p)| (*g, p.mul_monomial(m))).collect() }
    }

    pub fn boundary(&self, c: &KnotComplex) -> Element {
        let mut out = Element::zero();
        for (g, p) in &self.coords {
            for (t, q) in c.differential(*g) {
                out.add_poly(*t, &(p * q));
            }
        }
        out
    }

    pub fn is_cycle(&self, c: &KnotComplex) -> bool {
        self.boundary(c).is_zero()
    }

    /// The common `(gr_w, A)` of all terms; `None` for the zero element.
    pub fn bigrading(&self, c: &KnotComplex) -> Result<Option<(i64, i64)>> {
        let mut found: Option<(i64, i64)> = None;
        for (g, m) in self.terms() {
            let gen = c.generator(g);
            let here = (gen.gr_w - 2 * m.u, gen.alexander + m.v - m.u);
            match found {
                None => found = Some(here),
                Some(prev) if prev != here => {
                    return Err(CoreError::InvalidElement(format!(
                        "element is not homogeneous: {prev:?} vs {here:?}"
                    )))
                }
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn display(&self, c: &KnotComplex) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(g, m)| {
                if m == Monomial::ONE {
                    c.generator(g).name.clone()
                } else {
                    format!("{m}*{}", c.generator(g).name)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
