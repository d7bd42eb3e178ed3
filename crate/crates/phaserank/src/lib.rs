//! Phase rank analysis for complex phase matrices.
//!
//! A phase matrix has entries of modulus one; its phase rank is the smallest
//! rank of a complex matrix with the same entrywise phases and arbitrary
//! positive moduli. This crate decides phase rank exactly where exact
//! criteria exist (rank one, the 3x3 case, colopsidedness certificates,
//! torus coverage), constructs explicit rank-deficient witness matrices,
//! and computes spectral and semidefinite lower bounds together with a
//! structural upper bound.

pub mod angle;
pub mod bounds;
pub mod colop;
pub mod detvec;
pub mod error;
pub mod exec;
pub mod io;
pub mod matrix;
pub mod rank3;
pub mod raster;
pub mod scaling;
pub mod solver;
pub mod svg;
pub mod tol;

pub use angle::{canonical_angle, Angle};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, PhaseMatrix};
