//! Built-in complexes.

use crate::complex::{Flavor, Generator, KnotComplex};
use crate::error::{CoreError, Result};
use crate::poly::{Monomial, Poly};

pub struct LibraryEntry {
    pub name: &'static str,
    pub provenance: &'static str,
    /// Knot complexes take part in knot-only invariants; the Hopf model does not.
    pub is_knot: bool,
    gens: &'static [(&'static str, i64, i64)],
    /// `(source, target, U exponent, V exponent)`
    diff: &'static [(usize, usize, i64, i64)],
}

impl LibraryEntry {
    pub fn complex(&self) -> KnotComplex {
        let gens = self.gens.iter().map(|(n, gr, a)| Generator::new(*n, *gr, *a)).collect();
        let entries = self
            .diff
            .iter()
            .map(|(s, t, u, v)| (*s, *t, Poly::monomial(Monomial::new(*u, *v))))
            .collect::<Vec<_>>();
        KnotComplex::new(self.name, Flavor::Minus, gens, entries).expect("built-in complex validates")
    }
}

pub const LIBRARY: &[LibraryEntry] = &[
    LibraryEntry {
        name: "unknot",
        provenance: "one generator in bigrading (0,0)",
        is_knot: true,
        gens: &[("x", 0, 0)],
        diff: &[],
    },
    LibraryEntry {
        name: "trefoil_right",
        provenance: "(2,3) staircase with steps of length one",
        is_knot: true,
        gens: &[("x0", -2, -1), ("x1", -1, 0), ("x2", 0, 1)],
        diff: &[(1, 0, 0, 1), (1, 2, 1, 0)],
    },
    LibraryEntry {
        name: "figure8",
        provenance: "figure-eight knot, box plus an isolated generator",
        is_knot: true,
        gens: &[("x0", 1, 1), ("x1", 0, 0), ("x2", 0, 0), ("x3", 0, 0), ("x4", -1, -1)],
        diff: &[(0, 1, 0, 1), (3, 4, 0, 1), (3, 0, 1, 0), (4, 1, 1, 0)],
    },
    LibraryEntry {
        name: "T34",
        provenance: "(3,4) torus knot staircase 1,2,2,1",
        is_knot: true,
        gens: &[("x0", -6, -3), ("x1", -5, -2), ("x2", -2, 0), ("x3", -1, 2), ("x4", 0, 3)],
        diff: &[(1, 0, 0, 1), (1, 2, 2, 0), (3, 2, 0, 2), (3, 4, 1, 0)],
    },
    LibraryEntry {
        name: "T45",
        provenance: "(4,5) torus knot staircase 1,3,2,2,3,1",
        is_knot: true,
        gens: &[
            ("x0", -12, -6),
            ("x1", -11, -5),
            ("x2", -6, -2),
            ("x3", -5, 0),
            ("x4", -2, 2),
            ("x5", -1, 5),
            ("x6", 0, 6),
        ],
        diff: &[(1, 0, 0, 1), (1, 2, 3, 0), (3, 2, 0, 2), (3, 4, 2, 0), (5, 4, 0, 3), (5, 6, 1, 0)],
    },
    LibraryEntry {
        name: "hopf_neg_model",
        provenance: "negative Hopf link model with both components' variables identified",
        is_knot: false,
        gens: &[("x1", 0, 0), ("x2", -1, -1), ("x3", -2, -2), ("x4", -1, -1)],
        diff: &[(0, 1, 0, 1), (0, 3, 0, 1), (2, 1, 1, 0), (2, 3, 1, 0)],
    },
];

pub fn entry(name: &str) -> Result<&'static LibraryEntry> {
    LIBRARY.iter().find(|e| e.name == name).ok_or_else(|| CoreError::UnknownName(name.to_string()))
}

pub fn builtin(name: &str) -> Result<KnotComplex> {
    entry(name).map(LibraryEntry::complex)
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    LIBRARY.iter().map(|e| e.name)
}

pub fn knot_names() -> impl Iterator<Item = &'static str> {
    LIBRARY.iter().filter(|e| e.is_knot).map(|e| e.name)
}

/// Symmetrized Alexander polynomials, exponent → coefficient.
pub fn alexander_polynomial(name: &str) -> Option<Vec<(i64, i64)>> {
    Some(match name {
        "unknot" => vec![(0, 1)],
        "trefoil_right" => vec![(-1, 1), (0, -1), (1, 1)],
        "figure8" => vec![(-1, -1), (0, 3), (1, -1)],
        "T34" => vec![(-3, 1), (-2, -1), (0, 1), (2, -1), (3, 1)],
        "T45" => vec![(-6, 1), (-5, -1), (-2, 1), (0, -1), (2, 1), (5, -1), (6, 1)],
        _ => return None,
    })
}
