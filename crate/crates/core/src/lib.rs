//! Exact-arithmetic computational engine for truncated pro-algebra towers,
//! noncommutative differential forms and X-complex homology over Q and F_p.
//!
//! The crate is organized in layers: exact sparse linear algebra
//! ([`linalg`]), structure-constant algebras and their truncated
//! constructions ([`algebra`]), noncommutative differential forms and their
//! operators ([`forms`]), supercomplexes and homology ([`complexes`]), the
//! homotopy machinery of power spans and connections ([`homotopy`]), and
//! executable verification jobs ([`checks`]).

pub mod algebra;
pub mod checks;
pub mod complexes;
pub mod error;
pub mod field;
pub mod forms;
pub mod homotopy;
pub mod label;
pub mod linalg;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use label::Label;
