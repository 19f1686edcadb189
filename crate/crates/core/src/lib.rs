//! Exact symbolic engine for noncommutative differential operators on
//! differential graded algebras presented by structure-constant data.
//!
//! The engine works over the computable coefficient field Q(i)(p1,...,pm)
//! and provides: the tensor algebra of vector fields with its associative
//! bullet product, module actions and curvature, the relation generator
//! for the sheaf of differential operators, a complex-structure layer
//! with holomorphic operator calculus, and built-in verified calculi
//! (classical plane, complex plane, quantum SU(2) 3D, Podles sphere).

pub mod aelem;
pub mod calculus;
pub mod complex;
pub mod diffop;
pub mod error;
pub mod file;
pub mod library;
pub mod linalg;
pub mod scalar;
pub mod verify;

pub use aelem::{parse_aelem, AElem};
pub use error::EngineError;
pub use scalar::{parse_scalar, GaussianRational, Monomial, MultiPoly, Scalar, VarSet};
