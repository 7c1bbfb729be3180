//! Exact computations with the Steenrod cup-i coalgebra of a simplicial
//! complex, the assembly of chain-complex-valued presheaves, and the
//! reconstruction of presheaf morphisms from strict comodule morphisms.
//!
//! The crate is organised bottom-up:
//!
//! - [`complex`]: ordered simplicial complexes and their face poset.
//! - [`lincomb`] and [`gradedalg`]: exact sparse linear algebra over `Z` and `F_2`.
//! - [`cupi`]: Alexander–Whitney, join and the cup-i coproducts.
//! - [`squares`]: Steenrod squares on mod 2 cohomology.
//! - [`presheaf`]: presheaves of chain complexes and their morphisms.
//! - [`assembly`]: the assembly functor and its lifted coaction.
//! - [`reconstruct`]: recovering presheaf morphisms from comodule morphisms.
//! - [`io`]: JSON file formats consumed and produced by the `cupi` binary.
//! - [`cli`]: the `cupi` command line.

pub mod assembly;
pub mod cli;
pub mod complex;
pub mod cupi;
pub mod examples;
pub mod gradedalg;
pub mod io;
pub mod lincomb;
pub mod linsolve;
pub mod par;
pub mod presheaf;
pub mod reconstruct;
pub mod squares;

pub use assembly::{AssemblyComplex, ComoduleMorphism};
pub use complex::{Simplex, SimplicialComplex, VertexId};
pub use cupi::{CupStructure, TensorChain};
pub use gradedalg::{ChainComplexData, GradedBasis, GradedMatrix};
pub use lincomb::LinComb;
pub use presheaf::{Presheaf, PresheafMorphism};

/// Coefficient ring for all integral computations.
pub type Coeff = i64;

/// Errors raised by exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithmeticError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}
