//! Symbolic and numerical toolkit for the non-Hermitian Hamiltonian of the
//! damped harmonic oscillator.

pub mod analytic;
pub mod discretize;
pub mod dynamics;
pub mod eigensolve;
pub mod evolve;
pub mod grid;
pub mod json;
pub mod linalg;
pub mod params;
pub mod parser;
pub mod weyl;

pub use grid::{Grid, WaveFunction};
pub use params::{PhysParams, Regime};
