//! Exact arithmetic in Q(i)(p1,...,pm) and the expression grammar used
//! by calculus files.

mod field;
mod gaussian;
mod parse;
mod poly;

pub use field::Scalar;
pub use gaussian::GaussianRational;
pub use parse::parse_scalar;
pub use poly::{poly_gcd, Monomial, MultiPoly, VarSet};
