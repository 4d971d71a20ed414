//! Complex polynomial arithmetic, evaluation, reversal, and root extraction
//! with certified residuals.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense polynomial with complex coefficients in ascending degree order.
///
/// The leading coefficient is nonzero unless the polynomial is identically
/// zero, which is stored as the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial, trimming high-order coefficients that are
    /// exactly zero.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        ComplexPoly { coeffs }
    }

    pub fn zero() -> Self {
        ComplexPoly {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        ComplexPoly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexPoly { coeffs: vec![c] }
    }

    /// The monomial z^n.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        ComplexPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of z^k, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    /// Largest coefficient modulus; the scale against which residuals are
    /// reported.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> ComplexPoly {
        if self.coeffs.len() == 1 {
            return ComplexPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        ComplexPoly::new(coeffs)
    }

    /// Reversal at order `n`: coefficient `k` of the output is the conjugate
    /// of coefficient `n - k` of the input. Involutive at fixed `n`.
    pub fn reverse_star(&self, n: usize) -> Result<ComplexPoly> {
        if self.degree() > n && !self.is_zero() {
            return Err(Error::DegreeAboveOrder {
                degree: self.degree(),
                order: n,
            });
        }
        let coeffs = (0..=n).map(|k| self.coeff(n - k).conj()).collect();
        Ok(ComplexPoly::new(coeffs))
    }

    pub fn scaled(&self, c: Complex64) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by z^k.
    pub fn shifted(&self, k: usize) -> ComplexPoly {
        if self.is_zero() {
            return ComplexPoly::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        ComplexPoly::new(coeffs)
    }

    pub fn add(&self, other: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        ComplexPoly::new(coeffs)
    }

    pub fn sub(&self, other: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        ComplexPoly::new(coeffs)
    }

    /// Largest coefficient modulus of the difference.
    pub fn max_coeff_distance(&self, other: &ComplexPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Taylor coefficients of self/other around 0 (other(0) must not vanish).
    pub fn divide_series(&self, other: &ComplexPoly, len: usize) -> Result<Vec<Complex64>> {
        let d0 = other.coeff(0);
        if d0.norm() < 1e-300 {
            return Err(Error::SeriesDivision(d0));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for k in 0..len {
            let mut acc = self.coeff(k);
            for j in 0..k {
                acc -= out[j] * other.coeff(k - j);
            }
            out[k] = acc / d0;
        }
        Ok(out)
    }

    /// All roots with residual certificates. Exact zero coefficients at the
    /// low end are stripped first, so monomial factors yield exact roots at
    /// the origin.
    pub fn roots(&self) -> Result<RootSet> {
        roots(self)
    }
}

/// Multiset of polynomial roots with residual certificates.
///
/// `roots` has as many entries (with repetition) as the polynomial degree;
/// `clusters` groups roots closer than the cluster tolerance and reports
/// multiplicities.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<RootCluster>,
}

#[derive(Debug, Clone, Copy)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Distance from a point to the nearest root.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.roots
            .iter()
            .map(|r| (z - r).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Multiplicity of the exact root at the origin (zero residual).
    pub fn origin_multiplicity(&self) -> usize {
        self.clusters
            .iter()
            .find(|c| c.center.norm() == 0.0)
            .map_or(0, |c| c.multiplicity)
    }
}

fn roots(p: &ComplexPoly) -> Result<RootSet> {
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let scale = p.coeff_scale();

    // Exact monomial factor: strip low-order coefficients that are exactly
    // zero. These contribute roots at the origin with zero residual.
    let origin_mult = p
        .coeffs()
        .iter()
        .take_while(|c| c.norm_sqr() == 0.0)
        .count();
    let reduced: Vec<Complex64> = p.coeffs()[origin_mult..].to_vec();
    let m = reduced.len() - 1;

    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); origin_mult];
    if m == 1 {
        roots.push(-reduced[0] / reduced[1]);
    } else if m > 1 {
        roots.extend(aberth(&reduced, scale)?);
    }

    let mut residuals: Vec<f64> = roots.iter().map(|&r| p.eval(r).norm() / scale).collect();
    let mut clusters = cluster(&roots, tol::ROOT_CLUSTER);

    // Replace tight clusters by their centroid when that does not hurt the
    // certificate; centroids of genuinely multiple roots are more accurate
    // than the individual iterates.
    let mut snapped = roots.clone();
    for c in &clusters {
        if c.multiplicity < 2 {
            continue;
        }
        let res_center = p.eval(c.center).norm() / scale;
        if res_center <= tol::ROOT_RESIDUAL {
            for (r, res) in snapped.iter_mut().zip(residuals.iter_mut()) {
                if (*r - c.center).norm() <= tol::ROOT_CLUSTER {
                    *r = c.center;
                    *res = res_center;
                }
            }
        }
    }
    roots = snapped;
    clusters = cluster(&roots, tol::ROOT_CLUSTER);

    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > tol::ROOT_RESIDUAL {
        return Err(Error::RootsDiverged {
            iterations: tol::ROOT_MAX_ITER,
            residual: worst,
            best: roots,
        });
    }

    Ok(RootSet {
        roots,
        residuals,
        clusters,
    })
}

/// Simultaneous (Aberth-Ehrlich) iteration on a polynomial with nonzero
/// constant term. `scale` is the coefficient scale of the original
/// polynomial, used for the residual certificates.
fn aberth(coeffs: &[Complex64], scale: f64) -> Result<Vec<Complex64>> {
    let m = coeffs.len() - 1;
    let p = ComplexPoly::new(coeffs.to_vec());
    let dp = p.derivative();

    // Initial guesses on a circle of radius (|a_0 / a_m|)^(1/m), with an
    // angular offset so no guess starts on a symmetry axis.
    let radius = (coeffs[0].norm() / coeffs[m].norm()).powf(1.0 / m as f64);
    let radius = if radius.is_finite() && radius > 0.0 {
        radius
    } else {
        1.0
    };
    let mut x: Vec<Complex64> = (0..m)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.451;
            Complex64::from_polar(radius, ang)
        })
        .collect();

    let mut best = x.clone();
    let mut best_res = f64::INFINITY;

    for _ in 0..tol::ROOT_MAX_ITER {
        let mut max_step = 0.0f64;
        for k in 0..m {
            let pk = p.eval(x[k]);
            let dk = dp.eval(x[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let newton = if dk.norm() > 0.0 { pk / dk } else { pk };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..m {
                if j != k {
                    let diff = x[k] - x[j];
                    if diff.norm_sqr() > 1e-300 {
                        repulsion += diff.inv();
                    } else {
                        // coincident iterates: nudge apart
                        repulsion += Complex64::new(1e6, 1e6);
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            x[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + x[k].norm()));
        }

        let res = x
            .iter()
            .map(|&xi| p.eval(xi).norm() / scale)
            .fold(0.0, f64::max);
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        // Iterate to step stagnation, not to a residual target: multiple
        // roots pass the residual gate while the iterates are still too far
        // apart to cluster.
        if res == 0.0 || max_step < 5e-14 {
            break;
        }
    }

    if best_res > tol::ROOT_RESIDUAL {
        return Err(Error::RootsDiverged {
            iterations: tol::ROOT_MAX_ITER,
            residual: best_res,
            best,
        });
    }
    Ok(best)
}

fn cluster(roots: &[Complex64], radius: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut Vec<usize>, i: usize) -> usize {
        if label[i] != i {
            let r = find(label, label[i]);
            label[i] = r;
        }
        label[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match reps.iter().position(|&q| q == r) {
            Some(g) => {
                groups[g].0 += roots[i];
                groups[g].1 += 1;
            }
            None => {
                reps.push(r);
                groups.push((roots[i], 1));
            }
        }
    }
    groups
        .into_iter()
        .map(|(sum, count)| RootCluster {
            center: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}
