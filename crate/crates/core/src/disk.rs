//! Principal-invariant elements of deform-spun disks and their
//! stabilizations.

use std::sync::Arc;

use crate::complex::{Element, KnotComplex, Shift};
use crate::error::{CoreError, Result};
use crate::maps::{same_complex, ChainMap};
use crate::poly::Monomial;

/// Which extremal decoration an element models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    W,
    Z,
}

/// A cycle together with the genus of the surface it comes from. Its
/// Alexander grading is `+genus` on the z-side and `-genus` on the w-side;
/// genus-zero elements serve as either side.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskElement {
    complex: Arc<KnotComplex>,
    element: Element,
    genus: u32,
    side: Side,
}

impl DiskElement {
    pub fn new(complex: Arc<KnotComplex>, element: Element, genus: u32, side: Side) -> Result<DiskElement> {
        if element.coords().keys().any(|g| *g >= complex.len()) {
            return Err(CoreError::InvalidElement("element refers to a missing generator".into()));
        }
        if !element.is_cycle(&complex) {
            return Err(CoreError::NotACycle);
        }
        let expected = match side {
            Side::Z => i64::from(genus),
            Side::W => -i64::from(genus),
        };
        if let Some((_, a)) = element.bigrading(&complex)? {
            if a != expected {
                return Err(CoreError::InvalidElement(format!(
                    "element has Alexander grading {a}, expected {expected} for genus {genus}"
                )));
            }
        }
        Ok(DiskElement { complex, element, genus, side })
    }

    pub fn complex(&self) -> &Arc<KnotComplex> {
        &self.complex
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn serves_as(&self, side: Side) -> bool {
        self.genus == 0 || self.side == side
    }

    /// Multiplies by `U^dw V^dz`. A disk can be stabilized on one side only;
    /// a positive-genus element only on its own side.
    pub fn stabilize(&self, dw: u32, dz: u32) -> Result<DiskElement> {
        if dw == 0 && dz == 0 {
            return Ok(self.clone());
        }
        let side = match (dw > 0, dz > 0) {
            (true, true) => {
                return Err(CoreError::InvalidParameter("stabilize one decoration side at a time".into()))
            }
            (true, false) => Side::W,
            _ => Side::Z,
        };
        if self.genus > 0 && self.side != side {
            return Err(CoreError::InvalidParameter(format!(
                "a {:?}-side element cannot be stabilized on the {side:?} side",
                self.side
            )));
        }
        let element = self.element.mul_monomial(Monomial::new(i64::from(dw), i64::from(dz)));
        DiskElement::new(self.complex.clone(), element, self.genus + dw + dz, side)
    }
}

/// `dual(C) ⊗ C`, the presentation of `-K # K` that spun disks live in.
#[derive(Clone, Debug)]
pub struct SpunContext {
    base: Arc<KnotComplex>,
    ambient: Arc<KnotComplex>,
}

impl SpunContext {
    pub fn new(base: Arc<KnotComplex>) -> Result<SpunContext> {
        let ambient = Arc::new(base.dual().tensor(&base)?);
        Ok(SpunContext { base, ambient })
    }

    pub fn base(&self) -> &Arc<KnotComplex> {
        &self.base
    }

    pub fn ambient(&self) -> &Arc<KnotComplex> {
        &self.ambient
    }

    /// `Σ x^∨ ⊗ x`.
    pub fn cotrace(&self) -> Element {
        let n = self.base.len();
        Element::from_terms((0..n).map(|i| (i * n + i, Monomial::ONE)))
    }

    /// `(id ⊗ d)(cotrace)` for an endomorphism `d` of the base complex.
    pub fn disk(&self, d: &ChainMap) -> Result<DiskElement> {
        if !same_complex(d.source(), &self.base) || !same_complex(d.target(), &self.base) {
            return Err(CoreError::ComplexMismatch);
        }
        if d.shift() != Shift::ZERO {
            return Err(CoreError::InvalidParameter("deformation must preserve both gradings".into()));
        }
        let n = self.base.len();
        let mut e = Element::zero();
        for (i, j, p) in d.entries() {
            e.add_poly(i * n + j, p);
        }
        DiskElement::new(self.ambient.clone(), e, 0, Side::Z)
    }
}

/// The cotrace element together with the complex `dual(c) ⊗ c` it lives in.
pub fn cotrace(c: &Arc<KnotComplex>) -> Result<(Arc<KnotComplex>, Element)> {
    let ctx = SpunContext::new(c.clone())?;
    Ok((ctx.ambient.clone(), ctx.cotrace()))
}

pub fn deform_spun_disk(c: &Arc<KnotComplex>, d: &ChainMap) -> Result<DiskElement> {
    SpunContext::new(c.clone())?.disk(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{builtin, knot_names};
    use crate::maps::{roll_map, summand_swap_on, SwapVariant};
    use crate::shape::{is_boundary, SubQuotientShape};

    fn arc(name: &str) -> Arc<KnotComplex> {
        Arc::new(builtin(name).unwrap())
    }

    #[test]
    fn cotrace_is_a_cycle_in_grading_zero() {
        for name in knot_names() {
            let c = arc(name);
            let (amb, e) = cotrace(&c).unwrap();
            assert!(e.is_cycle(&amb), "{name}");
            assert_eq!(e.bigrading(&amb).unwrap(), Some((0, 0)));
            assert_eq!(e.coords().len(), c.len());
        }
        let (amb, e) = cotrace(&arc("unknot")).unwrap();
        assert_eq!(e.display(&amb), "x^v|x");
    }

    #[test]
    fn identity_disk_is_the_cotrace() {
        let c = arc("figure8");
        let ctx = SpunContext::new(c.clone()).unwrap();
        let d = ctx.disk(&ChainMap::identity(&c)).unwrap();
        assert_eq!(d.element(), &ctx.cotrace());
        assert_eq!(d.genus(), 0);
    }

    #[test]
    fn roll_disk_differs_by_x3_dual_tensor_x1() {
        let c = arc("figure8");
        let ctx = SpunContext::new(c.clone()).unwrap();
        let id = ctx.disk(&ChainMap::identity(&c)).unwrap();
        let roll = ctx.disk(&roll_map(&c, 1).unwrap()).unwrap();
        let diff = id.element().add(roll.element());
        assert_eq!(diff.display(ctx.ambient()), "x3^v|x1");
        let roll2 = ctx.disk(&roll_map(&c, 2).unwrap()).unwrap();
        assert_eq!(roll2, id);
    }

    #[test]
    fn swap_disk_on_tensor_square() {
        let c = arc("T34");
        let cc = Arc::new(c.tensor(&c).unwrap());
        let ctx = SpunContext::new(cc.clone()).unwrap();
        let sw = summand_swap_on(&c, &cc, SwapVariant::IdPhiPsiPsiPhi).unwrap();
        let d = ctx.disk(&sw).unwrap();
        assert_eq!(ctx.ambient().len(), 625);
        assert!(d.element().is_cycle(ctx.ambient()));
    }

    #[test]
    fn homotopic_deformations_give_homologous_elements() {
        // roll^1 and id + ΦΨ + (∂H + H∂) for the witness of Û·ΦΨ: compare
        // d = id with d' = id + ∂K + K∂ for K = the homotopy of Û·ΦΨ
        let c = arc("figure8");
        let ctx = SpunContext::new(c.clone()).unwrap();
        let upp = crate::maps::phi_psi(&c).unwrap().mul_monomial(Monomial::uhat(1));
        let h = crate::maps::null_homotopy(&upp).unwrap().unwrap();
        let d1 = ChainMap::identity(&c).mul_monomial(Monomial::uhat(1));
        let d2 = d1.add(&h.commutator_with_differential()).unwrap();
        let n = c.len();
        let lift = |d: &ChainMap| {
            let mut e = Element::zero();
            for (i, j, p) in d.entries() {
                e.add_poly(i * n + j, p);
            }
            e
        };
        let diff = lift(&d1).add(&lift(&d2));
        assert!(!diff.is_zero());
        // the difference is exact: Û·(x ⊗ y) sits in A = 0 at degree -2
        assert!(is_boundary(ctx.ambient(), &SubQuotientShape::R { i: 0, j: 0 }, &diff).unwrap());
    }

    #[test]
    fn stabilization() {
        let c = arc("figure8");
        let ctx = SpunContext::new(c.clone()).unwrap();
        let id = ctx.disk(&ChainMap::identity(&c)).unwrap();
        assert_eq!(id.stabilize(0, 0).unwrap(), id);
        let z = id.stabilize(0, 1).unwrap();
        assert_eq!((z.genus(), z.side()), (1, Side::Z));
        assert_eq!(z.element(), &id.element().mul_monomial(Monomial::new(0, 1)));
        let w = id.stabilize(1, 0).unwrap();
        assert_eq!((w.genus(), w.side()), (1, Side::W));
        assert!(id.stabilize(1, 1).is_err());
        assert!(w.stabilize(0, 1).is_err());
        assert_eq!(w.stabilize(2, 0).unwrap().genus(), 3);
    }

    #[test]
    fn rejects_non_cycles_and_wrong_gradings() {
        let c = arc("figure8");
        let ctx = SpunContext::new(c.clone()).unwrap();
        let amb = ctx.ambient().clone();
        let x3x3 = amb.index_of("x3^v|x3").unwrap();
        assert_eq!(
            DiskElement::new(amb.clone(), Element::generator(x3x3), 0, Side::Z),
            Err(CoreError::NotACycle)
        );
        let e = ctx.cotrace();
        assert!(DiskElement::new(amb, e, 1, Side::Z).is_err());
        let other = arc("T34");
        assert_eq!(ctx.disk(&ChainMap::identity(&other)), Err(CoreError::ComplexMismatch));
    }
}
