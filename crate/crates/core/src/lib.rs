//! Modular-invariant modified Weierstrass functions (σ̃, ζ̃, ℘̃, σ̃ᵢ),
//! Eisenstein's periodic completion of ζ, and lowest-Landau-level
//! wavefunctions on the torus built from σ̃.

pub mod analysis;
pub mod cli;
pub mod compensated;
pub mod elliptic;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod lll;
pub mod logval;
pub mod oracle;
pub mod reduce;
pub mod selftest;
pub mod theta;

pub use elliptic::SigmaEvaluator;
pub use error::{Error, Result};
pub use lattice::{HalfPeriodIndex, Lattice, LatticeVector};
pub use logval::LogComplex;
pub use num_complex::Complex64;
