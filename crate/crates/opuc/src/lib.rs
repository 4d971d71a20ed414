//! Numerical toolkit for probability measures on the unit circle and their
//! orthogonal polynomials.
//!
//! The crate builds measures from densities, atoms, or reflection
//! coefficients, runs the Schur algorithm and the Szego recursion, and
//! evaluates the entropy function
//!
//! ```text
//! K(mu, z) = log P(mu, z) - P(log w, z),         z in the open unit disk,
//! ```
//!
//! where `P` is the Poisson (harmonic) extension and `w` is the density of
//! the absolutely continuous part of `mu`. Around that core it verifies the
//! classical identity chain numerically: the log-product form of `K` over
//! the Schur iterates, the Szego sum rule, Khrushchev's boundary formula,
//! Wall-polynomial relations, Christoffel-Darboux norm identities,
//! Bernstein-Szego approximants, and pointwise zero-scaling diagnostics for
//! the orthogonal polynomials.
//!
//! Everything is pure and deterministic: all routines are plain functions of
//! their inputs and are safe to call from many threads.

pub mod entropy;
pub mod error;
pub mod grid;
pub mod measure;
pub mod orthopoly;
pub mod pipeline;
pub mod poly;
pub mod schur;
pub mod tol;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pipeline::Lab;
