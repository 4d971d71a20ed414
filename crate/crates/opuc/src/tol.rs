//! Default numerical gates used across the crate.
//!
//! Every tolerance that an operation enforces (as opposed to one a test
//! merely asserts) is named here so the binary can override it per run.

/// Residual gate for certified polynomial roots, relative to the
/// coefficient scale.
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// Roots closer than this are merged into one cluster with multiplicity.
pub const ROOT_CLUSTER: f64 = 1e-7;

/// Iteration cap for the simultaneous root solver.
pub const ROOT_MAX_ITER: usize = 200;

/// Reflection coefficients must satisfy |a| <= 1 - UNIT_GAP.
pub const UNIT_GAP: f64 = 1e-12;

/// Densities below this floor fail the Szego gate on plain grids.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Largest admissible change of the log-density integral caused by
/// clamping near zeros of the density.
pub const CLAMP_BUDGET: f64 = 1e-6;

/// Harmonic extensions require |z| <= 1 - BOUNDARY_GAP.
pub const BOUNDARY_GAP: f64 = 1e-6;

/// Depth of the dyadic refinement next to a density zero.
pub const DYADIC_DEPTH: usize = 20;

/// Relative density threshold under which a grid minimum is probed as a
/// possible zero of the density.
pub const ZERO_SCAN: f64 = 1e-6;

/// Extra Taylor coefficients kept beyond the number of Schur steps.
pub const SERIES_RESERVE: usize = 32;

/// Wall-polynomial identities must hold to this residual.
pub const WALL_RESIDUAL: f64 = 1e-10;

/// Componentwise agreement between the Schur-algorithm and Levinson
/// extractions of the reflection coefficients.
pub const PATH_AGREEMENT: f64 = 1e-8;

/// Forward-vs-Wall iterate evaluation discrepancy contract.
pub const ITERATE_DISCREPANCY: f64 = 1e-8;

/// Agreement between the two quadrature forms of the entropy.
pub const ENTROPY_TWO_FORM: f64 = 1e-7;

/// One-step entropy chain residual.
pub const CHAIN_RESIDUAL: f64 = 1e-7;

/// Entropy of a tail measure may exceed the full entropy by at most this.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Residual between the entropy and its truncated log-product.
pub const PRODUCT_RESIDUAL: f64 = 1e-7;

/// Pointwise boundary identity residual for transformed densities.
pub const KHRUSHCHEV_RESIDUAL: f64 = 1e-8;

/// Two-path agreement for the entropy of |phi_n*|^2 dmu.
pub const TRANSFORM_AGREEMENT: f64 = 1e-6;

/// Relative error gate for the Christoffel-Darboux norm identity.
pub const CD_REL_ERROR: f64 = 1e-6;

/// Circular distance gate for the boundary argument identity.
pub const ARGUMENT_CIRCULAR: f64 = 1e-6;

/// Mass, iterate-matching and additivity gates for Bernstein-Szego
/// approximants.
pub const BS_MASS: f64 = 1e-8;
pub const BS_MATCH: f64 = 1e-6;
pub const BS_ADDITIVITY: f64 = 1e-6;

/// Finite Szego sum identity gate.
pub const SZEGO_SUM: f64 = 1e-8;

/// Default cap asserted on oscillation / BMO ratio diagnostics.
pub const RATIO_CAP: f64 = 100.0;

/// eta(z) below this floor is excluded from ratio diagnostics.
pub const ETA_FLOOR: f64 = 1e-8;

/// Jensen positivity slack: log P(w,z) - P(log w,z) >= -JENSEN_SLACK.
pub const JENSEN_SLACK: f64 = 1e-10;

/// Zeros of orthonormal polynomials must satisfy |z| <= 1 - DISK_MARGIN.
pub const DISK_MARGIN: f64 = 1e-10;

/// Winding integral must equal 2 pi n within WINDING_REL * n.
pub const WINDING_REL: f64 = 1e-8;

/// Gram matrix entries match the identity within this.
pub const GRAM: f64 = 1e-8;

/// Real part of the Wall quotient psi_n*/phi_n* may dip below zero by
/// at most this.
pub const HERGLOTZ_SLACK: f64 = 1e-9;

/// Product factors with log below this stop the tail accumulation.
pub const TAIL_TERM_CUTOFF: f64 = 1e-14;

/// Conservative constant in the tail bound for truncated log-products.
pub const TAIL_SAFETY: f64 = 4.0;

/// Boundary sampling for argument unwrapping: at least this many points
/// per winding of the Blaschke product.
pub const UNWRAP_PER_WINDING: usize = 16;
