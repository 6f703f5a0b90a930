//! Knot Floer complexes over F₂[U,V] and secondary invariants of pairs of
//! slice disks and surfaces.

pub mod cli;
pub mod complex;
pub mod disk;
pub mod error;
pub mod filtration;
pub mod invariants;
pub mod io;
pub mod library;
pub mod linalg;
pub mod maps;
pub mod poly;
pub mod shape;

pub use complex::{Element, Flavor, Generator, KnotComplex, Reduction, Shift};
pub use disk::{DiskElement, Side, SpunContext};
pub use error::{CoreError, Result};
pub use maps::{ChainMap, SwapVariant};
pub use poly::{Monomial, Poly};
pub use shape::SubQuotientShape;
