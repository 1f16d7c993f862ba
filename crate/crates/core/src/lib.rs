//! Sign-pattern analysis of feasible and stable Lotka–Volterra coexistence.
//!
//! A Lotka–Volterra system `ẋ = diag(x)(a − Bx)` is labelled by the sign pattern of
//! its parameters `(a, B)`. This crate decides whether a sign pattern can carry a
//! feasible (`x⋆ = B⁻¹a > 0`) and asymptotically stable equilibrium by lifting the
//! parameters into the Grassmannian `Gr(n, 2n)` through the matrix `[diag(a) | B]`
//! and completing the induced partial chirotope under the 3-term
//! Grassmann–Plücker relations together with feasibility and stability sign
//! constraints.
//!
//! The crate is `no_std` (it needs `alloc`). IO, JSON, the CLI and the numeric
//! eigenvalue cross-check live in the `coexist` companion crate.
//!
//! Modules:
//!
//! - [`model`]: signs, sign patterns, interaction networks, relabelling, sampling.
//! - [`linalg`]: exact rational matrices, fraction-free determinants, adjugates.
//! - [`stability`]: exact feasibility and Routh–Hurwitz verification of points.
//! - [`grassmann`]: subset ranking, Plücker vectors, partial chirotopes, GP relations.
//! - [`completion`]: constraint construction, sign propagation and branching search.
//! - [`witness`]: sampling and exact verification of witness points.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod completion;
mod error;
pub mod grassmann;
pub mod linalg;
pub mod model;
pub mod stability;
pub mod witness;

pub use error::Error;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
