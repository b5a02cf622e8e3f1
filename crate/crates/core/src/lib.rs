//! Exact computations with finite-dimensional DG algebras over the rationals:
//! quiver algebras, twisted tensor products, projective resolutions, Euler
//! matrices and binary quadratic forms, plus a small workspace language.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod exactmat;
pub mod families;
pub mod ktheory;
pub mod quadform;
pub mod quiver;
pub mod report;
pub mod repmod;
pub mod twisted;

pub use error::{Error, Result};
