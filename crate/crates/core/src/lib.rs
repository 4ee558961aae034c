//! Numerical laboratory for the mixed local/nonlocal equation
//! -Δu + (-Δ)^s u = |u|^{p-2}u on a truncated periodic box.
//!
//! The crate computes ground-state candidates by a stabilized spectral
//! fixed-point iteration, evaluates the Gagliardo-Nirenberg best constant
//! through two independent routes (the L^p mass of the normalized solution
//! and the ground-state energy level), and verifies the algebraic identity
//! chain the variational structure imposes: the Nehari relation, the
//! dilation (Pohozaev) relation, the seminorm proportionalities, scaling
//! invariance of the Weinstein quotient, fibering-map roots, and the Cramer
//! determinants of the constrained system.

pub mod algebra;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod params;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use algebra::NormTriple;
pub use error::{Error, Result};
pub use field::Field;
pub use grid::GridSpec;
pub use params::{ExponentBundle, Params};
pub use solver::{petviashvili_solve, SolveReport, SolverConfig};
pub use verify::{IdentityReport, Tolerances};
