//! Empirical verification of the equidistribution of dense lattice orbits
//! on spaces of frames.
//!
//! The crate enumerates elements of SL(n,Z) and Sp(n,Z) in Frobenius-norm
//! balls, counts orbit points `γ·v⁰` inside test regions, evaluates the
//! closed-form limit constants and compares the two. A separate set of
//! routines checks the volume asymptotics of norm balls in the triangular
//! group `B°_l` against independent numerical oracles.

pub mod constants;
pub mod enumerate;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod measures;
pub mod quadrature;
pub mod special;
pub mod volume_lab;

pub use error::{Error, Result};
