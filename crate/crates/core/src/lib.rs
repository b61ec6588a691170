//! Lipschitz interpolation on finite pointed metric spaces.
//!
//! The crate computes Lipschitz-free norms by transportation, decides whether a
//! family of point pairs is Lipschitz interpolating, computes the interpolation
//! constant `M` together with its dual `N = 1/M`, and builds and optimizes
//! Beurling families of biorthogonal functions. All optimization goes through
//! the in-crate [`solver`] module, which can run in floating point or in exact
//! rational arithmetic.

#![allow(clippy::needless_range_loop)]

pub mod beurling;
pub mod error;
pub mod exec;
pub mod free_space;
pub mod interpolation;
pub mod lip;
pub mod metric;
pub mod sequences;
pub mod solver;

pub use error::{Error, Result};
pub use exec::{Execution, Options};
pub use solver::Backend;
