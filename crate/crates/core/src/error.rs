use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate basis: half-periods {omega1} and {omega2} do not span the plane")]
    DegenerateBasis { omega1: Complex64, omega2: Complex64 },

    #[error("{what} did not converge within {terms} terms")]
    ConvergenceFailure { what: &'static str, terms: usize },

    #[error("basis change is not unimodular (determinant {det})")]
    NotUnimodular { det: i64 },

    #[error("pole at lattice point {pole} (z = {z})")]
    PoleAt { z: Complex64, pole: Complex64 },

    #[error("{p}·z is not a lattice point (distance {distance:e})")]
    NotCommensurate { p: u32, distance: f64 },

    #[error("incomplete zero census: winding sum {winding_sum} ({holomorphic} holomorphic, {antiholomorphic} antiholomorphic)")]
    IncompleteCensus { winding_sum: i64, holomorphic: usize, antiholomorphic: usize },

    #[error("function vanishes on the contour near {z}")]
    OnContour { z: Complex64 },

    #[error("expected {expected} zeros, got {got}")]
    CountMismatch { expected: usize, got: usize },

    #[error("expected {expected} particles, got {got}")]
    ParticleCountMismatch { expected: usize, got: usize },

    #[error("wavefunction magnitude below 1e-300 at {z}; resample")]
    NearZeroDivision { z: Complex64 },

    #[error("orbital family is linearly dependent")]
    SingularBasis,

    #[error("zero sum {zero_sum} does not match K·A/π = {expected}")]
    ConstraintViolation { zero_sum: Complex64, expected: Complex64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
