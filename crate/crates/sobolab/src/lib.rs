//! Numerical harmonic analysis on periodic grids.
//!
//! The crate provides the building blocks for empirical studies of
//! interpolation-type functional inequalities on torus approximations of
//! Euclidean space:
//!
//! - [`spectral`]: Fourier calculus — multipliers, the heat semigroup,
//!   fractional Laplacians by two independent routes, gradients, smooth
//!   cutoff decompositions, and periodic convolution;
//! - [`rearrange`]: distribution functions, the nonincreasing
//!   rearrangement, Arino–Muckenhoupt `B_p` weights and classical / weak
//!   Lorentz norms, including two-weight conditions;
//! - [`norms`]: Lebesgue, weak-Lebesgue, Sobolev, thermic Besov, Morrey
//!   and weighted norms, plus Hardy–Littlewood and heat-family maximal
//!   functions and Muckenhoupt `A_p` constants;
//! - [`harness`]: parameter algebra for the inequality catalog, corpus
//!   generation, ratio evaluation, stability studies and the Hedberg
//!   pointwise verifier.

pub mod error;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod rearrange;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};

/// Configure the global worker pool size. Call once, before any parallel
/// work; later calls return an error from the pool builder.
pub fn configure_jobs(jobs: usize) -> std::result::Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
}
