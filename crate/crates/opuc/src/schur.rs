//! Schur algorithm on truncated Taylor series, reflection-coefficient
//! extraction by two independent paths, Wall polynomials, and pointwise
//! iterate evaluation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::tol;

/// Truncated Taylor series of a Schur-class function at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurSeries {
    taylor: Vec<Complex64>,
}

impl SchurSeries {
    pub fn new(taylor: Vec<Complex64>) -> Self {
        assert!(!taylor.is_empty(), "series needs at least one coefficient");
        SchurSeries { taylor }
    }

    /// The zero function, truncated at order `len`.
    pub fn zero(len: usize) -> Self {
        SchurSeries {
            taylor: vec![Complex64::new(0.0, 0.0); len.max(1)],
        }
    }

    pub fn constant(c: Complex64, len: usize) -> Self {
        let mut taylor = vec![Complex64::new(0.0, 0.0); len.max(1)];
        taylor[0] = c;
        SchurSeries { taylor }
    }

    /// Number of stored Taylor coefficients (the truncation order).
    pub fn len(&self) -> usize {
        self.taylor.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.taylor
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.taylor
    }

    /// Value at the origin, the next reflection coefficient.
    pub fn at_origin(&self) -> Complex64 {
        self.taylor[0]
    }

    /// True when |f(0)| is so close to one that the algorithm must stop.
    pub fn is_extreme(&self) -> bool {
        self.taylor[0].norm() >= 1.0 - tol::UNIT_GAP
    }

    /// Fails when the constant term already leaves the closed unit disk.
    pub fn validate_contraction(&self) -> Result<()> {
        let m = self.taylor[0].norm();
        if m > 1.0 + 1e-12 {
            return Err(Error::NotContractive(m));
        }
        Ok(())
    }

    /// Horner evaluation of the truncated series. Accurate inside the disk
    /// of analyticity of the underlying function; the truncation error is
    /// the caller's responsibility near |z| = 1.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.taylor.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn max_coeff(&self) -> f64 {
        self.taylor.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// How a sequence of reflection coefficients was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SchurAlgorithm,
    Levinson,
    Prescribed,
}

/// Sequence of reflection coefficients a_n = f_n(0) in the open unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskySeq {
    values: Vec<Complex64>,
    provenance: Provenance,
}

impl VerblunskySeq {
    /// Wraps an explicitly prescribed sequence, enforcing |a_n| < 1.
    pub fn prescribed(values: Vec<Complex64>) -> Result<Self> {
        for (index, a) in values.iter().enumerate() {
            let modulus = a.norm();
            if modulus >= 1.0 - tol::UNIT_GAP {
                return Err(Error::FinitelySupported { index, modulus });
            }
        }
        Ok(VerblunskySeq {
            values,
            provenance: Provenance::Prescribed,
        })
    }

    pub(crate) fn with_provenance(values: Vec<Complex64>, provenance: Provenance) -> Self {
        VerblunskySeq { values, provenance }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coefficient at index `k`, zero beyond the stored range.
    pub fn at(&self, k: usize) -> Complex64 {
        self.values
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Sum of |a_n|^2 over the stored range; finite for the Szego class.
    pub fn szego_sum(&self) -> f64 {
        self.values.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Index past the last nonzero coefficient.
    pub fn support_len(&self) -> usize {
        self.values
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .map_or(0, |p| p + 1)
    }

    /// True when the sequence is identically zero beyond index `n`.
    pub fn vanishes_from(&self, n: usize) -> bool {
        self.support_len() <= n
    }
}

/// Taylor series of the Schur function from the moments c_k = int conj(xi)^k dmu.
///
/// Inverts `(1 + z f) / (1 - z f) = 1 + 2 sum c_k z^k` by series division:
/// `f = (c_1 + c_2 z + ...) / (1 + c_1 z + c_2 z^2 + ...)`.
pub fn caratheodory_to_schur(moments: &[Complex64]) -> Result<SchurSeries> {
    if moments.is_empty() {
        return Err(Error::SeriesTooShort { needed: 2, have: 0 });
    }
    if (moments[0] - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::NotNormalized(moments[0].re));
    }
    let len = (moments.len() - 1).max(1);
    let numer = ComplexPoly::new(moments[1..].to_vec());
    let denom = ComplexPoly::new(moments.to_vec());
    let taylor = numer.divide_series(&denom, len)?;
    let f = SchurSeries::new(taylor);
    f.validate_contraction()?;
    Ok(f)
}

/// Why a Schur-algorithm run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Complete,
    /// |a_k| reached the unit circle numerically; the measure is supported
    /// on a finite set and only a partial sequence is available.
    FinitelySupported { index: usize, modulus: f64 },
}

#[derive(Debug, Clone)]
pub struct SchurAlgorithmOutput {
    pub coefficients: VerblunskySeq,
    /// Iterates f_0, f_1, ..., one per completed step plus the input.
    pub iterates: Vec<SchurSeries>,
    pub termination: Termination,
}

impl SchurAlgorithmOutput {
    /// Errors unless all `count` requested coefficients were produced.
    pub fn require_complete(self, count: usize) -> Result<Self> {
        match self.termination {
            Termination::Complete if self.coefficients.len() >= count => Ok(self),
            Termination::FinitelySupported { index, modulus } => {
                Err(Error::FinitelySupported { index, modulus })
            }
            Termination::Complete => Err(Error::SeriesTooShort {
                needed: count,
                have: self.coefficients.len(),
            }),
        }
    }
}

/// Runs `count` steps of the Schur algorithm on a truncated series.
///
/// Each step applies the Moebius map `(f - f(0)) / (1 - conj(f(0)) f)` and
/// divides by z, losing one Taylor coefficient. Stops early with a typed
/// termination when a coefficient reaches the unit circle numerically.
pub fn schur_algorithm(f: &SchurSeries, count: usize) -> Result<SchurAlgorithmOutput> {
    f.validate_contraction()?;
    if count >= f.len() {
        return Err(Error::SeriesTooShort {
            needed: count + 1,
            have: f.len(),
        });
    }

    let mut iterates = vec![f.clone()];
    let mut values = Vec::with_capacity(count);
    let mut termination = Termination::Complete;

    for k in 0..count {
        let cur = iterates.last().unwrap();
        let a = cur.at_origin();
        let modulus = a.norm();
        if modulus >= 1.0 - tol::UNIT_GAP {
            termination = Termination::FinitelySupported { index: k, modulus };
            break;
        }
        values.push(a);

        let len = cur.len();
        let mut numer: Vec<Complex64> = cur.coeffs().to_vec();
        numer[0] = Complex64::new(0.0, 0.0);
        let denom: Vec<Complex64> = cur
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let base = if j == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                base - a.conj() * c
            })
            .collect();
        let quotient = ComplexPoly::new(numer).divide_series(&ComplexPoly::new(denom), len)?;
        iterates.push(SchurSeries::new(quotient[1..].to_vec()));
    }

    Ok(SchurAlgorithmOutput {
        coefficients: VerblunskySeq::with_provenance(values, Provenance::SchurAlgorithm),
        iterates,
        termination,
    })
}

/// Reflection coefficients straight from the Toeplitz moments, by the
/// Levinson-style monic recursion. Independent of the series path above.
///
/// Maintains the monic pair `Phi_{n+1} = z Phi_n - conj(a_n) Phi_n*`,
/// `Phi_{n+1}* = Phi_n* - a_n z Phi_n` and extracts
/// `conj(a_n) = <z Phi_n, 1> / <Phi_n*, 1>` in moment form.
pub fn verblunsky_levinson(moments: &[Complex64], count: usize) -> Result<VerblunskySeq> {
    if moments.len() < count + 1 {
        return Err(Error::SeriesTooShort {
            needed: count + 1,
            have: moments.len(),
        });
    }
    if (moments[0] - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::NotNormalized(moments[0].re));
    }

    let mut phi: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut phi_star: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut values = Vec::with_capacity(count);

    for index in 0..count {
        // <z Phi_n, 1> = sum_j Phi_n[j] conj(c_{j+1});  int xi^k dmu = conj(c_k)
        let num: Complex64 = phi
            .iter()
            .enumerate()
            .map(|(j, p)| p * moments[j + 1].conj())
            .sum();
        let den: Complex64 = phi_star
            .iter()
            .enumerate()
            .map(|(j, p)| p * moments[j].conj())
            .sum();
        if !(den.re > tol::UNIT_GAP) || den.im.abs() > 1e-6 * den.re.abs().max(1.0) {
            return Err(Error::PositivityLoss { index, gap: den.re });
        }
        let a = (num / den).conj();
        let gap = 1.0 - a.norm_sqr();
        if gap <= tol::UNIT_GAP {
            return Err(Error::PositivityLoss { index, gap });
        }
        values.push(a);

        let n = phi.len();
        let mut phi_next = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut star_next = vec![Complex64::new(0.0, 0.0); n + 1];
        for j in 0..n {
            phi_next[j + 1] += phi[j];
            phi_next[j] -= a.conj() * phi_star[j];
            star_next[j] += phi_star[j];
            star_next[j + 1] -= a * phi[j];
        }
        phi = phi_next;
        phi_star = star_next;
    }

    Ok(VerblunskySeq::with_provenance(values, Provenance::Levinson))
}

/// Exact Toeplitz moments of the measure attached to a reflection
/// sequence, by running the monic recursion backwards: the orthogonality
/// of Phi_{k+1} against constants pins c_{k+1} once a_k is known.
///
/// Works to any order; coefficients beyond the sequence length count as
/// zero (the Bernstein-Szego case), whose moments generally do not vanish.
pub fn moments_from_coefficients(a: &VerblunskySeq, count: usize) -> Vec<Complex64> {
    let mut moments = vec![Complex64::new(1.0, 0.0)];
    let mut phi: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut phi_star: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut beta = 1.0f64;

    for k in 0..count {
        let ak = a.at(k);
        // <z Phi_k, 1> = conj(c_{k+1}) + sum_{j<k} Phi_k[j] conj(c_{j+1})
        let partial: Complex64 = phi
            .iter()
            .take(k)
            .enumerate()
            .map(|(j, p)| p * moments[j + 1].conj())
            .sum();
        let c_next = (ak.conj() * beta - partial).conj();
        moments.push(c_next);

        let n = phi.len();
        let mut phi_next = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut star_next = vec![Complex64::new(0.0, 0.0); n + 1];
        for j in 0..n {
            phi_next[j + 1] += phi[j];
            phi_next[j] -= ak.conj() * phi_star[j];
            star_next[j] += phi_star[j];
            star_next[j + 1] -= ak * phi[j];
        }
        phi = phi_next;
        phi_star = star_next;
        beta *= 1.0 - ak.norm_sqr();
    }
    moments
}

/// The Wall polynomial quadruple (A_n, B_n, A_n*, B_n*) for one order.
#[derive(Debug, Clone)]
pub struct WallEntry {
    pub a: ComplexPoly,
    pub b: ComplexPoly,
    pub a_star: ComplexPoly,
    pub b_star: ComplexPoly,
}

/// Wall polynomials of a reflection sequence, all orders up to a budget.
///
/// They satisfy the continued-fraction relation
/// `f = (A_n + z B_n* f_{n+1}) / (B_n + z A_n* f_{n+1})`, and on the circle
/// the determinant identity `|B_n|^2 - |A_n|^2 = prod_{k<=n} (1 - |a_k|^2)`,
/// which this type uses for cancellation-free boundary evaluation of
/// `1 - |f_n|^2`.
#[derive(Debug, Clone)]
pub struct WallPolynomials {
    coefficients: VerblunskySeq,
    entries: Vec<WallEntry>,
    gap_products: Vec<f64>,
}

impl WallPolynomials {
    /// Builds entries 0..=order; coefficients beyond the sequence length
    /// count as zero.
    pub fn build(a: &VerblunskySeq, order: usize) -> WallPolynomials {
        let a0 = a.at(0);
        let mut entries = vec![WallEntry {
            a: ComplexPoly::constant(a0),
            b: ComplexPoly::one(),
            a_star: ComplexPoly::constant(a0.conj()),
            b_star: ComplexPoly::one(),
        }];
        let mut gap_products = vec![1.0 - a0.norm_sqr()];

        for n in 0..order {
            let an1 = a.at(n + 1);
            let prev = &entries[n];
            let z_b_star = prev.b_star.shifted(1);
            let z_a_star = prev.a_star.shifted(1);
            let next = WallEntry {
                a: prev.a.add(&z_b_star.scaled(an1)),
                b: prev.b.add(&z_a_star.scaled(an1)),
                a_star: prev.b.scaled(an1.conj()).add(&z_a_star),
                b_star: prev.a.scaled(an1.conj()).add(&z_b_star),
            };
            gap_products.push(gap_products[n] * (1.0 - an1.norm_sqr()));
            entries.push(next);
        }

        WallPolynomials {
            coefficients: a.clone(),
            entries,
            gap_products,
        }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn coefficients(&self) -> &VerblunskySeq {
        &self.coefficients
    }

    pub fn entry(&self, n: usize) -> &WallEntry {
        &self.entries[n]
    }

    /// prod_{k=0}^{n} (1 - |a_k|^2).
    pub fn gap_product(&self, n: usize) -> f64 {
        self.gap_products[n]
    }

    /// Leading coefficient k_n of the degree-n orthonormal polynomial.
    pub fn leading(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            1.0 / self.gap_products[n - 1].sqrt()
        }
    }

    /// Orthonormal polynomial phi_n = k_n (z B_{n-1}* - A_{n-1}*).
    pub fn phi(&self, n: usize) -> ComplexPoly {
        if n == 0 {
            return ComplexPoly::one();
        }
        let e = &self.entries[n - 1];
        e.b_star
            .shifted(1)
            .sub(&e.a_star)
            .scaled(Complex64::new(self.leading(n), 0.0))
    }

    /// Reversed orthonormal polynomial phi_n* = k_n (B_{n-1} - z A_{n-1}).
    pub fn phi_star(&self, n: usize) -> ComplexPoly {
        if n == 0 {
            return ComplexPoly::one();
        }
        let e = &self.entries[n - 1];
        e.b.sub(&e.a.shifted(1))
            .scaled(Complex64::new(self.leading(n), 0.0))
    }

    /// Second-kind polynomial psi_n = k_n (z B_{n-1}* + A_{n-1}*).
    pub fn psi(&self, n: usize) -> ComplexPoly {
        if n == 0 {
            return ComplexPoly::one();
        }
        let e = &self.entries[n - 1];
        e.b_star
            .shifted(1)
            .add(&e.a_star)
            .scaled(Complex64::new(self.leading(n), 0.0))
    }

    /// Reversed second-kind polynomial psi_n* = k_n (B_{n-1} + z A_{n-1}).
    pub fn psi_star(&self, n: usize) -> ComplexPoly {
        if n == 0 {
            return ComplexPoly::one();
        }
        let e = &self.entries[n - 1];
        e.b.add(&e.a.shifted(1))
            .scaled(Complex64::new(self.leading(n), 0.0))
    }

    /// Taylor series of the rational approximant A_order / B_order. Exact
    /// when the reflection sequence vanishes beyond the stored order.
    pub fn schur_series(&self, len: usize) -> Result<SchurSeries> {
        let e = self.entries.last().unwrap();
        let taylor = e.a.divide_series(&e.b, len.max(1))?;
        Ok(SchurSeries::new(taylor))
    }

    /// f_n(z) in the open disk from the value f(z), by inverting the Wall
    /// relation: `f_n = (f B_{n-1} - A_{n-1}) / (z (B_{n-1}* - f A_{n-1}*))`.
    pub fn iterate_from_function(
        &self,
        n: usize,
        z: Complex64,
        f_z: Complex64,
    ) -> Result<Complex64> {
        if n == 0 {
            return Ok(f_z);
        }
        if n - 1 > self.order() {
            return Err(Error::IterateBudget {
                index: n,
                budget: self.order() + 1,
            });
        }
        if z.norm() < 1e-12 {
            // removable singularity at the origin: f_n(0) = a_n
            return Ok(self.coefficients.at(n));
        }
        let e = &self.entries[n - 1];
        let denom = e.b_star.eval(z) - f_z * e.a_star.eval(z);
        if denom.norm() < 1e-140 {
            return Err(Error::SingularPoint {
                z,
                denom: denom.norm(),
            });
        }
        Ok((f_z * e.b.eval(z) - e.a.eval(z)) / (z * denom))
    }

    /// Boundary iterate: returns `(f_n(xi), 1 - |f_n(xi)|^2)` at
    /// xi = exp(i theta) given `f(xi)` and a cancellation-free value of
    /// `1 - |f(xi)|^2`.
    pub fn boundary_iterate(
        &self,
        n: usize,
        theta: f64,
        f: Complex64,
        one_minus_f_sq: f64,
    ) -> Result<(Complex64, f64)> {
        if n == 0 {
            return Ok((f, one_minus_f_sq));
        }
        if n - 1 > self.order() {
            return Err(Error::IterateBudget {
                index: n,
                budget: self.order() + 1,
            });
        }
        let xi = Complex64::from_polar(1.0, theta);
        let e = &self.entries[n - 1];
        let denom = e.b_star.eval(xi) - f * e.a_star.eval(xi);
        let denom_sq = denom.norm_sqr();
        if denom_sq < 1e-280 {
            return Err(Error::SingularPoint {
                z: xi,
                denom: denom_sq.sqrt(),
            });
        }
        let value = (f * e.b.eval(xi) - e.a.eval(xi)) / (xi * denom);
        let gap = one_minus_f_sq * self.gap_products[n - 1] / denom_sq;
        Ok((value, gap))
    }
}

/// Pointwise forward Schur recursion at an interior point: returns
/// f_0(z), ..., f_n(z).
///
/// Amplifies error by 1/|z| per step once the true iterate is numerically
/// zero, so callers should stop at the support length for finitely
/// supported sequences.
pub fn forward_iterates(
    f0: Complex64,
    z: Complex64,
    a: &VerblunskySeq,
    n: usize,
) -> Result<Vec<Complex64>> {
    if z.norm() > 1.0 - tol::BOUNDARY_GAP {
        return Err(Error::ForwardOnBoundary);
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(f0);
    let origin = z.norm() < 1e-12;
    for k in 0..n {
        let cur = *out.last().unwrap();
        let next = if origin {
            a.at(k + 1)
        } else {
            let ak = a.at(k);
            let denom = Complex64::new(1.0, 0.0) - ak.conj() * cur;
            if denom.norm() < 1e-140 {
                return Err(Error::SingularPoint {
                    z,
                    denom: denom.norm(),
                });
            }
            (cur - ak) / (denom * z)
        };
        if next.norm() > 1.0 + 1e-6 {
            return Err(Error::invalid(format!(
                "forward iterate {} left the closed disk (|f| = {:.3e}); \
                 evaluation deeper than the numerical support",
                k + 1,
                next.norm()
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// Iterate evaluation with automatic path selection.
///
/// The Wall inverse loses about `n log10(1/|z|)` digits because its
/// denominator scales like `z^n`; deep iterates at small |z| are therefore
/// evaluated through their own Taylor series when one is available. The
/// crossover keeps the Wall path to points with `|z|^n >= 1e-6`.
#[derive(Debug, Clone, Copy)]
pub struct IterateOracle<'a> {
    f: &'a SchurSeries,
    iterates: &'a [SchurSeries],
    wall: &'a WallPolynomials,
}

impl<'a> IterateOracle<'a> {
    pub fn new(
        f: &'a SchurSeries,
        iterates: &'a [SchurSeries],
        wall: &'a WallPolynomials,
    ) -> IterateOracle<'a> {
        IterateOracle { f, iterates, wall }
    }

    pub fn schur_series(&self) -> &'a SchurSeries {
        self.f
    }

    pub fn wall(&self) -> &'a WallPolynomials {
        self.wall
    }

    pub fn f_at(&self, z: Complex64) -> Complex64 {
        self.f.eval(z)
    }

    /// f_n(z) at an interior point by the better-conditioned path.
    pub fn value(&self, n: usize, z: Complex64) -> Result<Complex64> {
        if n == 0 {
            return Ok(self.f.eval(z));
        }
        let conditioned = z.norm().powi(n as i32) >= 1e-6;
        if conditioned || self.iterates.len() <= n {
            self.wall.iterate_from_function(n, z, self.f.eval(z))
        } else {
            Ok(self.iterates[n].eval(z))
        }
    }
}

/// Forward and Wall-inverse evaluations of the same iterate, with their
/// discrepancy. Interior points only; on the circle use
/// [`WallPolynomials::boundary_iterate`].
#[derive(Debug, Clone, Copy)]
pub struct IterateEval {
    pub forward: Complex64,
    pub wall: Complex64,
    pub discrepancy: f64,
}

pub fn schur_iterate_eval(
    f: &SchurSeries,
    a: &VerblunskySeq,
    wall: &WallPolynomials,
    n: usize,
    z: Complex64,
) -> Result<IterateEval> {
    if z.norm() > 1.0 - tol::BOUNDARY_GAP {
        return Err(Error::ForwardOnBoundary);
    }
    let f_z = f.eval(z);
    let forward = *forward_iterates(f_z, z, a, n)?.last().unwrap();
    let wall_value = wall.iterate_from_function(n, z, f_z)?;
    Ok(IterateEval {
        forward,
        wall: wall_value,
        discrepancy: (forward - wall_value).norm(),
    })
}
