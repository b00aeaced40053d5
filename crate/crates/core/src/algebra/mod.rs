//! Exact polynomial arithmetic over the rationals.
//!
//! Everything that touches a closing condition is built here with exact
//! [`Scalar`] coefficients: dense univariate polynomials ([`Poly1`]), sparse
//! bivariate polynomials ([`Poly2`]), rational functions, Sylvester
//! resultants and Sturm-sequence real-root isolation. Floating point only
//! appears in the final refinement of isolated roots.

mod poly1;
mod poly2;
mod ratfn;
mod resultant;
mod roots;
mod scalar;
mod zpoly;

pub use poly1::Poly1;
pub use poly2::{Poly2, Poly2F64, Var};
pub use ratfn::{RationalFn, RationalFn1};
pub use resultant::resultant;
pub use roots::{count_roots, isolate_real_roots, squarefree, sturm_sequence, RealRoot};
pub use scalar::{parse_scalar, scalar_from_f64, scalar_to_f64, Scalar};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division leaves a nonzero remainder")]
    NonzeroRemainder,
    #[error("polynomial has degree zero in the eliminated variable")]
    DegreeZero,
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("invalid scalar literal {0:?}")]
    InvalidScalar(String),
}
