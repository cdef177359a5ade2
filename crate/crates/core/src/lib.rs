//! Exact symbolic verification of the quantum MacMahon Master Theorem at a
//! fixed rank and truncation degree.
//!
//! Elements of the free algebra on `a[i,j]` carry Laurent-polynomial
//! coefficients in `q`; identities in a quotient algebra are decided by
//! graded ideal membership over `Q(q)` or at random rational values of `q`.

pub mod bosonic;
pub mod coeffs;
#[doc(hidden)]
pub mod fuzzing;
pub mod harness;
pub mod linalg;
pub mod ncpoly;
pub mod opcalc;
pub mod qdet;
pub mod relations;
