//! Exact computer algebra for Macdonald polynomials and multivariable
//! basic hypergeometric summations.
//!
//! The crate is organised around one scalar abstraction and eight feature
//! modules:
//!
//! * [`scalar`] - the `Scalar` trait with the two concrete instances used
//!   everywhere: exact rationals ([`Rat`]) and arbitrary-precision complex
//!   numbers ([`Cx`])
//! * [`qkernel`] - q-shifted factorials of integer and complex order,
//!   validated (q, t) evaluation points, seeded parameter draws
//! * [`partitions`] - integer partitions, conjugation, the combinatorial
//!   constants attached to them, and complex-part extensions
//! * [`symfun`] - sparse symmetric polynomials, the classical bases, the
//!   (q, t) scalar product, and Gram-Schmidt Macdonald polynomials
//! * [`macdrec`] - Pieri expansion and the determinant recursion for
//!   Macdonald polynomials, with their duals and restricted variants
//! * [`matinv`] - explicit multidimensional inverse matrix pairs and
//!   inverse-relation machinery
//! * [`hyperseries`] - a registry of multivariable basic hypergeometric
//!   summation identities with exact and numeric verification drivers
//! * [`complexmacd`] - evaluation of one-row-complex Macdonald polynomials
//!   and the summation formulas attached to them
//! * [`report`] - machine-readable verification reports
//!
//! Every identity check either evaluates in exact rational arithmetic or
//! carries an explicit, tested error bound; floating point never silently
//! replaces an exact path.

pub mod complex;
pub mod complexmacd;
pub mod error;
pub mod hyperseries;
pub mod macdrec;
pub mod matinv;
pub mod partitions;
pub mod qkernel;
pub mod scalar;
pub mod symfun;

pub use complex::Cx;
pub use error::{QError, QResult};
pub use scalar::{Rat, Scalar};
