//! End-to-end wiring: one struct holding a measure together with its Schur
//! series, reflection coefficients, and orthonormal system, so callers do
//! not rebuild the chain for every diagnostic.

use num_complex::Complex64;

use crate::entropy;
use crate::error::Result;
use crate::measure::CircleMeasure;
use crate::orthopoly::{szego_recursion, OpucSystem};
use crate::schur::{
    caratheodory_to_schur, schur_algorithm, IterateOracle, SchurSeries, VerblunskySeq,
    WallPolynomials,
};
use crate::tol;
use crate::zeros::{scaling_series, ScalingSeries};

/// A measure with its derived Schur data, built once.
#[derive(Debug)]
pub struct Lab {
    measure: CircleMeasure,
    f: SchurSeries,
    iterates: Vec<SchurSeries>,
    a: VerblunskySeq,
    sys: OpucSystem,
    n_max: usize,
}

impl Lab {
    /// Builds the chain measure -> moments -> Schur series -> reflection
    /// coefficients -> orthonormal system, with `n_max` usable degrees.
    pub fn from_measure(measure: CircleMeasure, n_max: usize) -> Result<Lab> {
        let measure = measure.normalize()?;
        // a truncation of 256 terms keeps |z|^len below 1e-11 on the whole
        // product disk |z| <= 0.9 even for slowly decaying coefficients
        let budget = (n_max + tol::SERIES_RESERVE).max(256);
        let moments = measure.moments(budget + 1)?;
        let f = caratheodory_to_schur(&moments)?;
        let out = schur_algorithm(&f, n_max)?.require_complete(n_max)?;
        let sys = szego_recursion(&out.coefficients, n_max)?;
        Ok(Lab {
            measure,
            f,
            iterates: out.iterates,
            a: out.coefficients,
            sys,
            n_max,
        })
    }

    /// Builds the chain from prescribed reflection coefficients; the
    /// measure is the matching Bernstein-Szego weight and the Schur series
    /// is the exact rational function of the finite sequence.
    pub fn from_verblunsky(a: VerblunskySeq, m: usize, n_max: usize) -> Result<Lab> {
        let measure = CircleMeasure::from_verblunsky(&a, m)?;
        let support = a.support_len();
        let f = WallPolynomials::build(&a, support.saturating_sub(1))
            .schur_series((n_max + tol::SERIES_RESERVE).max(256))?;
        let iterates = schur_algorithm(&f, n_max)?.iterates;
        let sys = szego_recursion(&a, n_max)?;
        Ok(Lab {
            measure,
            f,
            iterates,
            a,
            sys,
            n_max,
        })
    }

    pub fn measure(&self) -> &CircleMeasure {
        &self.measure
    }

    pub fn schur_series(&self) -> &SchurSeries {
        &self.f
    }

    pub fn coefficients(&self) -> &VerblunskySeq {
        &self.a
    }

    pub fn system(&self) -> &OpucSystem {
        &self.sys
    }

    pub fn wall(&self) -> &WallPolynomials {
        self.sys.wall()
    }

    pub fn degree_budget(&self) -> usize {
        self.n_max
    }

    pub fn grid_size(&self) -> usize {
        self.measure.grid_size()
    }

    /// Iterate evaluator dispatching between the Wall-inverse path and the
    /// iterate Taylor series on conditioning.
    pub fn oracle(&self) -> IterateOracle<'_> {
        IterateOracle::new(&self.f, &self.iterates, self.sys.wall())
    }

    /// f_n(z) in the open disk by the better-conditioned path.
    pub fn iterate_at(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.oracle().value(n, z)
    }

    pub fn entropy(&self, z: Complex64) -> Result<f64> {
        entropy::entropy(&self.measure, z)
    }

    pub fn entropy_product_row(
        &self,
        z: Complex64,
        n_max: usize,
    ) -> Result<entropy::ProductRow> {
        entropy::entropy_product_row(&self.measure, &self.f, &self.a, z, n_max)
    }

    pub fn entropy_report(
        &self,
        z_grid: &[Complex64],
        n_max: usize,
    ) -> Result<entropy::EntropyReport> {
        entropy::entropy_report(&self.measure, &self.f, &self.a, z_grid, n_max)
    }

    pub fn chain_step(&self, z: Complex64) -> Result<entropy::ChainStep> {
        entropy::entropy_chain_step(&self.measure, &self.f, self.wall(), z)
    }

    pub fn monotonicity(
        &self,
        z_grid: &[Complex64],
        n_max: usize,
    ) -> Result<entropy::MonotonicityReport> {
        entropy::entropy_monotonicity(&self.measure, &self.f, self.wall(), z_grid, n_max)
    }

    pub fn scaling_series(
        &self,
        xi_angle: f64,
        radial_a: f64,
        rho: f64,
        n_list: &[usize],
    ) -> Result<ScalingSeries> {
        scaling_series(
            &self.sys,
            &self.measure,
            &self.oracle(),
            xi_angle,
            radial_a,
            rho,
            n_list,
        )
    }
}
