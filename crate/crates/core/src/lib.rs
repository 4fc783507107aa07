//! Numerical perturbation theory for the Moore-Penrose inverse.
//!
//! Dense complex matrices stand in for operators on a finite-dimensional Hilbert
//! space. The crate covers the reduced minimum modulus and perturbation bounds of
//! the pseudoinverse, rank strata and their group actions, essential codimension of
//! projection pairs, operator monotone functional calculus through the Pick
//! integral representation, and polar decompositions with their fiber charts.

pub mod error;
pub mod matcore;

pub use error::{Error, Result};
pub mod codim;
pub mod pinv;
pub mod polar;
pub mod monotone;
pub mod random;
pub mod strata;
