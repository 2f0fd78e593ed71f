//! Numerical checks of integral-mean inequalities for harmonic and
//! quasiregular maps of the unit disk.
//!
//! Maps are `f = h + conj(g)` with `h`, `g` truncated power series. The
//! crate evaluates them on circles, computes integral means and Zygmund
//! type functionals, builds families of test maps, checks inequalities
//! against them with explicit error budgets and searches parameter spaces
//! for the worst-case ratio.

pub mod cli;
pub mod error;
pub mod harmonic;
pub mod laplacian;
pub mod means;
pub mod probe;
pub mod series;
pub mod verify;
pub mod zoo;

pub use error::{HqrError, Result};
pub use harmonic::HarmonicMap;
pub use series::{CircleSamples, CoefficientSeries};
