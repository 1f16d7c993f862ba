//! Files, command line and numeric cross-checks around `coexist-core`.
//!
//! - [`formats`]: JSON documents and the shipped schema.
//! - [`dsl`]: pattern arguments, including the network language.
//! - [`enumerate`]: classification of all patterns of one size, CSV export.
//! - [`parallel`]: deterministic multi-threaded search and sampling.
//! - [`eigen`]: the floating-point spectrum cross-check.
//! - [`checks`]: the reference checks run by `check-paper`.
//! - [`cli`]: the subcommands.

pub mod checks;
pub mod cli;
pub mod dsl;
pub mod eigen;
pub mod enumerate;
pub mod formats;
pub mod parallel;
