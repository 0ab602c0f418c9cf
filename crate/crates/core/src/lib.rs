//! Exact computation of Dolbeault, Bott-Chern, Aeppli and de Rham cohomology
//! of left-invariant complex structures on Lie algebras.

pub mod catalog;
pub mod cohomology;
pub mod dsl;
pub mod exterior;
pub mod linalg;
pub mod model;
pub mod report;
pub mod scalar;
mod syntax;

pub use exterior::{Form, MultiIndex};
pub use linalg::{Matrix, Subspace};
pub use scalar::{GaussianRational, Rational};
pub use syntax::{ParamPoly, ParseError};
