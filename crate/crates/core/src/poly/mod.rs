//! Polynomial algebra over exact rationals or doubles: Sylvester resultants,
//! discriminants, root finding and three-polynomial elimination.

mod bi;
mod linalg;
mod resultant;
mod roots;
mod scalar;
mod uni;

pub use bi::{BiPoly, Variable};
pub use linalg::{determinant_bareiss, determinant_f64};
pub use resultant::{
    discriminant, eliminate_three, resultant, resultant_formal, resultant_in, resultant_in_formal,
    sylvester_matrix, sylvester_matrix_formal, Elimination,
};
pub use roots::{polish_root, real_roots, roots};
pub use scalar::Scalar;
pub use uni::UniPoly;

use num_rational::BigRational;

pub type QPoly = UniPoly<BigRational>;
pub type FPoly = UniPoly<f64>;
pub type QBiPoly = BiPoly<BigRational>;

/// Shorthand for an exact rational `p/q`.
pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}
