//! Jordan-Lie algebras, the projective line over a matrix *-algebra, its
//! octahedral symmetry group, the unitary torsor and geometric time
//! evolution.
//!
//! All algebras are realized as `M(n, C)` with double precision entries.

pub mod algebra;
pub mod error;
pub mod evolution;
pub mod jordanlie;
pub mod linalg;
pub mod octahedron;
pub mod projline;
pub mod unitary;

pub use algebra::{AlgebraElement, PositivityReport, RingExtensionElement, StarAlgebra};
pub use error::{Error, Result};
pub use evolution::{CotangentVector, FlowResult, LeftInvariantField, TangentVector};
pub use jordanlie::{AxiomReport, ConversionParams, JordanLieStructure, MatrixJordanLie};
pub use linalg::CMat;
pub use octahedron::{OctElement, OctGroup, PoleSet};
pub use projline::{FormMatrix, MoebiusMap, Point};
pub use unitary::{Obstate, UnitaryGroupSpec, UnitarySetting};
