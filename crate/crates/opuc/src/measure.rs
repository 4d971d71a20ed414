//! Probability measures on the unit circle: densities plus finite atom
//! lists, moments, Poisson extensions, the Szego (outer) function, and the
//! boundary Schur function.
//!
//! Densities come in four representations: trigonometric polynomials, plain
//! grid samples, Bernstein-Szego weights `1/|phi_L*|^2` driven by a finite
//! reflection sequence, and arbitrary pointwise-evaluable closures (used for
//! derived weights such as iterate measures). Integrals of `log w` against
//! smooth kernels subtract the exact singular model
//! `sum_z order_z * log|xi - xi_z|` at the zeros of the density, integrate
//! the analytic remainder with the spectrally accurate trapezoid rule, and
//! add the model back through closed-form kernel integrals.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::grid::{
    self, harmonic_conjugate, node_angle, poisson_kernel, FourierTable, GridFunction,
};
use crate::poly::ComplexPoly;
use crate::schur::{VerblunskySeq, WallPolynomials};
use crate::tol;

/// Point mass on the circle at exp(i angle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(angle: f64, mass: f64) -> Result<Atom> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::BadAtomMass(mass));
        }
        Ok(Atom {
            angle: grid::wrap_angle(angle),
            mass,
        })
    }

    pub fn position(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

/// A zero of the density on the circle with its (even) vanishing order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityZero {
    pub angle: f64,
    pub order: usize,
}

type DensityEval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum DensityForm {
    /// w(theta) = c_0 + 2 Re sum_{k>=1} c_k e^{ik theta}; coefficients are
    /// exact, so moments and Poisson extensions of the density are exact.
    TrigPoly {
        coeffs: Vec<Complex64>,
        factored: Option<TrigFactors>,
    },
    /// Plain samples; off-grid values by the truncated Fourier series.
    Grid,
    /// w = 1 / |phi_L*|^2 with phi_L* zero-free on the closed disk.
    BernsteinSzego {
        phi_star: ComplexPoly,
        sequence: VerblunskySeq,
    },
    /// Pointwise-evaluable weight with candidate zero angles.
    Closure {
        eval: DensityEval,
        zeros: Vec<DensityZero>,
    },
}

impl fmt::Debug for DensityForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityForm::TrigPoly { coeffs, .. } => {
                write!(f, "TrigPoly(order {})", coeffs.len() - 1)
            }
            DensityForm::Grid => write!(f, "Grid"),
            DensityForm::BernsteinSzego { phi_star, .. } => {
                write!(f, "BernsteinSzego(degree {})", phi_star.degree())
            }
            DensityForm::Closure { zeros, .. } => write!(f, "Closure({} zeros)", zeros.len()),
        }
    }
}

/// Root-factored form of a trigonometric density with boundary zeros;
/// evaluating through the factors keeps full relative accuracy next to the
/// zeros, where the plain Fourier sum cancels catastrophically.
#[derive(Debug, Clone)]
struct TrigFactors {
    lead: Complex64,
    roots: Vec<Complex64>,
    order: usize,
    zeros: Vec<DensityZero>,
}

impl TrigFactors {
    fn eval(&self, theta: f64) -> f64 {
        let xi = Complex64::from_polar(1.0, theta);
        let mut acc = self.lead;
        for r in &self.roots {
            acc *= xi - r;
        }
        let phase = Complex64::from_polar(1.0, -(self.order as f64) * theta);
        (acc * phase).re.max(0.0)
    }
}

/// Probability measure `w dm + atoms` on the unit circle.
#[derive(Debug, Clone)]
pub struct CircleMeasure {
    m: usize,
    form: DensityForm,
    scale: f64,
    samples: Vec<f64>,
    atoms: Vec<Atom>,
    fourier: OnceCell<FourierTable>,
    log_rule: OnceCell<LogRule>,
    boundary: OnceCell<BoundarySchur>,
}

/// Boundary values of the Schur function of a measure, with a
/// cancellation-free `1 - |f|^2`.
#[derive(Debug, Clone)]
pub struct BoundarySchur {
    pub f: Vec<Complex64>,
    pub one_minus_sq: Vec<f64>,
}

impl CircleMeasure {
    fn assemble(m: usize, form: DensityForm, samples: Vec<f64>) -> Result<CircleMeasure> {
        grid::check_grid_size(m)?;
        if samples.len() != m {
            return Err(Error::GridMismatch(samples.len(), m));
        }
        let max = samples.iter().copied().fold(0.0, f64::max);
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-12 * max.max(1.0) {
            return Err(Error::NegativeDensity(min));
        }
        let samples = samples.into_iter().map(|s| s.max(0.0)).collect();
        Ok(CircleMeasure {
            m,
            form,
            scale: 1.0,
            samples,
            atoms: Vec::new(),
            fourier: OnceCell::new(),
            log_rule: OnceCell::new(),
            boundary: OnceCell::new(),
        })
    }

    /// Normalized Lebesgue measure.
    pub fn lebesgue(m: usize) -> Result<CircleMeasure> {
        CircleMeasure::from_fourier_coeffs(vec![Complex64::new(1.0, 0.0)], m)
    }

    /// Trigonometric density from one-sided Fourier coefficients c_0..c_K:
    /// w = c_0 + 2 Re sum_{k>=1} c_k e^{ik theta}. c_0 must be real.
    pub fn from_fourier_coeffs(coeffs: Vec<Complex64>, m: usize) -> Result<CircleMeasure> {
        grid::check_grid_size(m)?;
        if coeffs.is_empty() {
            return Err(Error::invalid("empty coefficient list"));
        }
        if coeffs[0].im.abs() > 1e-14 * coeffs[0].norm().max(1.0) {
            return Err(Error::invalid("mean coefficient must be real"));
        }
        if coeffs.len() >= m / 2 {
            return Err(Error::MomentAliasing {
                order: coeffs.len(),
                grid: m,
            });
        }
        let plain = |theta: f64| -> f64 {
            let mut acc = coeffs[0].re;
            for (k, c) in coeffs.iter().enumerate().skip(1) {
                acc += 2.0 * (c * Complex64::from_polar(1.0, k as f64 * theta)).re;
            }
            acc
        };
        let raw: Vec<f64> = (0..m).map(|j| plain(node_angle(m, j))).collect();
        let max = raw.iter().copied().fold(0.0, f64::max);
        let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-10 * max.max(1.0) {
            return Err(Error::NegativeDensity(min));
        }

        let factored = if min <= tol::ZERO_SCAN * max {
            Some(factor_trig_density(&coeffs)?)
        } else {
            None
        };
        let samples = match &factored {
            Some(f) => (0..m).map(|j| f.eval(node_angle(m, j))).collect(),
            None => raw,
        };
        CircleMeasure::assemble(m, DensityForm::TrigPoly { coeffs, factored }, samples)
    }

    /// Density a_0 + sum_k (cos_k cos(k theta) + sin_k sin(k theta)).
    pub fn from_cos_sin(cos: &[f64], sin: &[f64], m: usize) -> Result<CircleMeasure> {
        if cos.is_empty() {
            return Err(Error::invalid("need at least the constant term"));
        }
        let order = (cos.len() - 1).max(sin.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = Complex64::new(cos[0], 0.0);
        for k in 1..=order {
            let a = cos.get(k).copied().unwrap_or(0.0);
            let b = sin.get(k - 1).copied().unwrap_or(0.0);
            coeffs[k] = Complex64::new(a / 2.0, -b / 2.0);
        }
        CircleMeasure::from_fourier_coeffs(coeffs, m)
    }

    /// Density from raw grid samples (length fixes the grid size).
    pub fn from_grid_samples(samples: Vec<f64>) -> Result<CircleMeasure> {
        let m = samples.len();
        CircleMeasure::assemble(m, DensityForm::Grid, samples)
    }

    /// Bernstein-Szego measure of a finite reflection sequence:
    /// w = 1 / |phi_L*|^2 where L is the sequence length.
    pub fn from_verblunsky(a: &VerblunskySeq, m: usize) -> Result<CircleMeasure> {
        let support = a.support_len();
        if support == 0 {
            return CircleMeasure::lebesgue(m);
        }
        let wall = WallPolynomials::build(a, support - 1);
        let phi_star = wall.phi_star(support);
        let samples = (0..m)
            .map(|j| 1.0 / phi_star.eval(grid::node(m, j)).norm_sqr())
            .collect();
        CircleMeasure::assemble(
            m,
            DensityForm::BernsteinSzego {
                phi_star,
                sequence: a.clone(),
            },
            samples,
        )
    }

    /// Pointwise-evaluable density with declared zero candidates. Extra
    /// zeros are detected from the grid samples and refined by a ternary
    /// search; orders are calibrated from neighbouring samples when the
    /// log-quadrature rule is built.
    pub fn from_closure(
        m: usize,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zeros: Vec<DensityZero>,
    ) -> Result<CircleMeasure> {
        let eval: DensityEval = Arc::new(eval);
        let samples: Vec<f64> = (0..m).map(|j| eval(node_angle(m, j))).collect();
        CircleMeasure::from_closure_with_samples(m, samples, eval, zeros)
    }

    pub(crate) fn from_closure_with_samples(
        m: usize,
        samples: Vec<f64>,
        eval: DensityEval,
        declared: Vec<DensityZero>,
    ) -> Result<CircleMeasure> {
        let mut zeros: Vec<DensityZero> = declared
            .into_iter()
            .map(|z| DensityZero {
                angle: grid::wrap_angle(z.angle),
                order: z.order,
            })
            .collect();
        zeros.extend(detect_zeros(&samples, &zeros, eval.as_ref()));
        zeros.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
        CircleMeasure::assemble(m, DensityForm::Closure { eval, zeros }, samples)
    }

    /// Constant reflection coefficient, truncated at `len` terms.
    pub fn geronimus(a: Complex64, len: usize, m: usize) -> Result<CircleMeasure> {
        let seq = VerblunskySeq::prescribed(vec![a; len])?;
        CircleMeasure::from_verblunsky(&seq, m)
    }

    /// Random decaying reflection coefficients a_n = sigma u_n (n+1)^(-rate)
    /// with u_n drawn uniformly from the unit disk; deterministic per seed.
    pub fn random_decaying(
        seed: u64,
        sigma: f64,
        rate: f64,
        len: usize,
        m: usize,
    ) -> Result<CircleMeasure> {
        let seq = random_decaying_sequence(seed, sigma, rate, len)?;
        CircleMeasure::from_verblunsky(&seq, m)
    }

    /// Attaches point masses; the measure will usually need `normalize`
    /// afterwards.
    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> CircleMeasure {
        self.atoms = atoms;
        self.fourier = OnceCell::new();
        self.boundary = OnceCell::new();
        self
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid_function(&self) -> GridFunction {
        GridFunction::from_real(&self.samples).unwrap()
    }

    /// Density value at an arbitrary angle.
    pub fn density_at(&self, theta: f64) -> f64 {
        let raw = match &self.form {
            DensityForm::TrigPoly { coeffs, factored } => match factored {
                Some(f) => f.eval(theta),
                None => {
                    let mut acc = coeffs[0].re;
                    for (k, c) in coeffs.iter().enumerate().skip(1) {
                        acc += 2.0 * (c * Complex64::from_polar(1.0, k as f64 * theta)).re;
                    }
                    acc
                }
            },
            DensityForm::Grid => self.fourier().series_at(theta) / self.scale,
            DensityForm::BernsteinSzego { phi_star, .. } => {
                1.0 / phi_star.eval(Complex64::from_polar(1.0, theta)).norm_sqr()
            }
            DensityForm::Closure { eval, .. } => eval(theta),
        };
        (self.scale * raw).max(0.0)
    }

    /// Candidate zeros of the density known to the representation.
    pub fn density_zeros(&self) -> Vec<DensityZero> {
        match &self.form {
            DensityForm::TrigPoly { factored, .. } => factored
                .as_ref()
                .map(|f| f.zeros.clone())
                .unwrap_or_default(),
            DensityForm::Closure { zeros, .. } => zeros.clone(),
            _ => Vec::new(),
        }
    }

    /// Mass of the absolutely continuous part.
    pub fn ac_mass(&self) -> f64 {
        match &self.form {
            DensityForm::TrigPoly { coeffs, .. } => self.scale * coeffs[0].re,
            DensityForm::BernsteinSzego { .. } => self.scale,
            _ => self.samples.iter().sum::<f64>() / self.m as f64,
        }
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.ac_mass() + self.atom_mass()
    }

    /// Rescales density and atoms proportionally to total mass one.
    pub fn normalize(mut self) -> Result<CircleMeasure> {
        let total = self.total_mass();
        if !(total > 1e-300) || !total.is_finite() {
            return Err(Error::ZeroMass);
        }
        self.scale /= total;
        for s in &mut self.samples {
            *s /= total;
        }
        for a in &mut self.atoms {
            a.mass /= total;
        }
        self.fourier = OnceCell::new();
        self.log_rule = OnceCell::new();
        self.boundary = OnceCell::new();
        Ok(self)
    }

    pub(crate) fn assert_probability(&self) -> Result<()> {
        let total = self.total_mass();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(total));
        }
        Ok(())
    }

    fn fourier(&self) -> &FourierTable {
        self.fourier.get_or_init(|| match &self.form {
            DensityForm::TrigPoly { coeffs, .. } => {
                let scaled: Vec<Complex64> = coeffs.iter().map(|c| c * self.scale).collect();
                FourierTable::from_coeffs(self.m, scaled).unwrap()
            }
            DensityForm::BernsteinSzego { sequence, .. } => {
                // exact rational moments: aliasing-free even when the
                // density is strongly peaked
                let mut coeffs =
                    crate::schur::moments_from_coefficients(sequence, self.m / 2);
                for c in &mut coeffs {
                    *c *= self.scale;
                }
                FourierTable::from_coeffs(self.m, coeffs).unwrap()
            }
            _ => FourierTable::from_real_samples(&self.samples).unwrap(),
        })
    }

    /// Moments c_k = int conj(xi)^k dmu for 0 <= k <= count.
    ///
    /// Spectral quadrature for the density plus exact atom sums; errors on
    /// aliasing when `count >= m/2`.
    pub fn moments(&self, count: usize) -> Result<Vec<Complex64>> {
        self.assert_probability()?;
        if count >= self.m / 2 {
            return Err(Error::MomentAliasing {
                order: count,
                grid: self.m,
            });
        }
        let table = self.fourier();
        let mut out = Vec::with_capacity(count + 1);
        for k in 0..=count {
            let mut c = table.coeff(k);
            for a in &self.atoms {
                c += a.mass * Complex64::from_polar(1.0, -(k as f64) * a.angle);
            }
            out.push(c);
        }
        out[0] = Complex64::new(1.0, 0.0);
        Ok(out)
    }

    fn radius_gate(&self, z: Complex64) -> Result<()> {
        let radius = z.norm();
        if radius > 1.0 - tol::BOUNDARY_GAP {
            let max_radius = (1.0 - tol::BOUNDARY_GAP).min((-40.0 / self.m as f64).exp());
            return Err(Error::RadiusTooLarge {
                radius,
                max_radius,
                grid: self.m,
            });
        }
        Ok(())
    }

    /// Harmonic extension of the full measure at |z| < 1: spectral series
    /// for the density, exact Poisson kernels for the atoms.
    pub fn poisson(&self, z: Complex64) -> Result<f64> {
        self.radius_gate(z)?;
        let mut acc = self.fourier().poisson(z);
        for a in &self.atoms {
            acc += a.mass * poisson_kernel(z, a.angle);
        }
        Ok(acc)
    }

    /// Harmonic extension of the density alone.
    pub fn poisson_density(&self, z: Complex64) -> Result<f64> {
        self.radius_gate(z)?;
        Ok(self.fourier().poisson(z))
    }

    fn log_rule(&self) -> Result<&LogRule> {
        self.log_rule.get_or_try_init(|| build_log_rule(self))
    }

    /// Whether the log-density quadrature is available (the numeric Szego
    /// gate).
    pub fn szego_gate(&self) -> Result<()> {
        self.log_rule().map(|_| ())
    }

    /// int log w dm.
    ///
    /// Bernstein-Szego densities use the closed form
    /// `log scale - 2 log phi_L*(0)` (phi_L* is outer); everything else
    /// goes through the singular-aware quadrature rule.
    pub fn szego_integral(&self) -> Result<f64> {
        if let DensityForm::BernsteinSzego { phi_star, .. } = &self.form {
            return Ok(self.scale.ln() - 2.0 * phi_star.coeff(0).norm().ln());
        }
        Ok(self.log_rule()?.szego_integral())
    }

    /// P(log w, z); closed form `log scale - 2 log |phi_L*(z)|` for
    /// Bernstein-Szego densities.
    pub fn poisson_log_density(&self, z: Complex64) -> Result<f64> {
        self.radius_gate(z)?;
        if let DensityForm::BernsteinSzego { phi_star, .. } = &self.form {
            return Ok(self.scale.ln() - 2.0 * phi_star.eval(z).norm().ln());
        }
        Ok(self.log_rule()?.poisson(z))
    }

    /// The outer function with boundary modulus sqrt(w), positive at the
    /// origin: D(z) = exp( int log sqrt(w) (1 + conj(xi) z)/(1 - conj(xi) z) dm ).
    /// Bernstein-Szego densities reduce to sqrt(scale) / phi_L*(z).
    pub fn szego_function(&self, z: Complex64) -> Result<Complex64> {
        self.radius_gate(z)?;
        if let DensityForm::BernsteinSzego { phi_star, .. } = &self.form {
            return Ok(Complex64::new(self.scale.sqrt(), 0.0) / phi_star.eval(z));
        }
        Ok((0.5 * self.log_rule()?.herglotz(z)).exp())
    }

    /// Boundary Schur function on the grid, from `F = w + i(Qw + atom
    /// conjugate kernels)` and `f = (F - 1)/(xi (F + 1))`. The returned gap
    /// `1 - |f|^2 = 4 w / |1 + F|^2` is cancellation-free.
    pub fn boundary_schur(&self) -> Result<&BoundarySchur> {
        self.boundary.get_or_try_init(|| {
            self.assert_probability()?;
            let q = harmonic_conjugate(&self.grid_function())?;
            let mut f = Vec::with_capacity(self.m);
            let mut gaps = Vec::with_capacity(self.m);
            for j in 0..self.m {
                let theta = node_angle(self.m, j);
                let (fj, gap) = boundary_point(self.samples[j], q.value(j).re, theta, &self.atoms);
                f.push(fj);
                gaps.push(gap);
            }
            Ok(BoundarySchur {
                f,
                one_minus_sq: gaps,
            })
        })
    }

    /// Boundary Schur function at an arbitrary angle (conjugate series plus
    /// exact density evaluation).
    pub fn boundary_schur_at(&self, theta: f64) -> Result<(Complex64, f64)> {
        self.assert_probability()?;
        let w = self.density_at(theta);
        let q = self.fourier().conjugate_at(theta);
        Ok(boundary_point(w, q, theta, &self.atoms))
    }
}

/// f and 1-|f|^2 at one boundary point from density and conjugate values.
fn boundary_point(w: f64, q: f64, theta: f64, atoms: &[Atom]) -> (Complex64, f64) {
    let mut im = q;
    for a in atoms {
        let half = 0.5 * (theta - a.angle);
        let t = half.tan();
        if t.abs() < 1e-300 {
            // at the atom itself F blows up and |f| = 1
            return (Complex64::from_polar(1.0, -theta), 0.0);
        }
        im += a.mass / t;
    }
    let f_big = Complex64::new(w, im);
    let xi = Complex64::from_polar(1.0, theta);
    let denom = f_big + 1.0;
    let f = (f_big - 1.0) / (xi * denom);
    let gap = 4.0 * w / denom.norm_sqr();
    (f, gap)
}

/// Pointwise weight (1 - |f|^2) / |1 - xi f|^2 from boundary Schur values.
///
/// Errors when |f| leaves the closed disk beyond 1e-10. Points with
/// |f| = 1 aligned so that xi f = 1 belong to the singular part and get a
/// zero sample.
pub fn weight_from_schur_boundary(f: &GridFunction) -> Result<GridFunction> {
    let m = f.len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let fj = f.value(j);
        let n = fj.norm();
        if n > 1.0 + 1e-10 {
            return Err(Error::NotContractive(n));
        }
        let xi = grid::node(m, j);
        let denom = (Complex64::new(1.0, 0.0) - xi * fj).norm_sqr();
        let num = (1.0 - fj.norm_sqr()).max(0.0);
        out.push(Complex64::new(
            if denom > 1e-30 { num / denom } else { 0.0 },
            0.0,
        ));
    }
    GridFunction::new(out)
}

/// Realizes the absolutely continuous part of the n-th iterate measure:
/// density (1 - |f_n|^2) / |1 - xi f_n|^2 from boundary iterate values.
///
/// Not normalized: the iterate measure may carry singular mass that the
/// density cannot represent, so its total mass can fall short of one. Its
/// harmonic extension is available exactly through the iterate value,
/// `P(mu_n, z) = (1 - |z f_n(z)|^2) / |1 - z f_n(z)|^2`; see
/// `entropy::iterate_entropy_from_weight`.
pub fn iterate_measure(
    mu: &CircleMeasure,
    wall: &WallPolynomials,
    n: usize,
) -> Result<CircleMeasure> {
    let m = mu.grid_size();
    let boundary = mu.boundary_schur()?.clone();
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let theta = node_angle(m, j);
            let (fn_j, gap) =
                wall.boundary_iterate(n, theta, boundary.f[j], boundary.one_minus_sq[j])?;
            let xi = grid::node(m, j);
            let denom = (Complex64::new(1.0, 0.0) - xi * fn_j).norm_sqr();
            Ok(if denom > 1e-30 { gap / denom } else { 0.0 })
        })
        .collect::<Result<_>>()?;

    let mu_arc = Arc::new(mu.clone());
    let wall_arc = Arc::new(wall.clone());
    let zeros = mu.density_zeros();
    let eval: DensityEval = Arc::new(move |theta: f64| {
        let (f, gap) = match mu_arc
            .boundary_schur_at(theta)
            .and_then(|(f, g)| wall_arc.boundary_iterate(n, theta, f, g))
        {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let xi = Complex64::from_polar(1.0, theta);
        let denom = (Complex64::new(1.0, 0.0) - xi * f).norm_sqr();
        if denom > 1e-30 {
            gap / denom
        } else {
            0.0
        }
    });
    CircleMeasure::from_closure_with_samples(m, samples, eval, zeros)
}

/// The weight 1 - |f_n|^2 on the circle as an evaluable (non-normalized)
/// measure, for quadrature of its logarithm. `n = 0` gives 1 - |f|^2.
pub fn iterate_gap_weight(
    mu: &CircleMeasure,
    wall: &WallPolynomials,
    n: usize,
) -> Result<CircleMeasure> {
    let m = mu.grid_size();
    let boundary = mu.boundary_schur()?;
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let theta = node_angle(m, j);
            wall.boundary_iterate(n, theta, boundary.f[j], boundary.one_minus_sq[j])
                .map(|(_, gap)| gap)
        })
        .collect::<Result<_>>()?;
    let mu_arc = Arc::new(mu.clone());
    let wall_arc = Arc::new(wall.clone());
    let zeros = mu.density_zeros();
    CircleMeasure::from_closure_with_samples(
        m,
        samples,
        Arc::new(move |theta: f64| {
            mu_arc
                .boundary_schur_at(theta)
                .and_then(|(f, g)| wall_arc.boundary_iterate(n, theta, f, g))
                .map(|(_, gap)| gap)
                .unwrap_or(0.0)
        }),
        zeros,
    )
}

/// Aleksandrov-Clark measure: density (1 - |f|^2) / |1 - alpha xi f|^2 for a
/// unimodular alpha, whose Schur function is alpha f.
///
/// Rejects rotations whose measure develops a singular part (the density
/// alone would then misrepresent it).
pub fn clark_measure(mu: &CircleMeasure, alpha: Complex64) -> Result<CircleMeasure> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnCircle(alpha.norm()));
    }
    let m = mu.grid_size();
    let boundary = mu.boundary_schur()?.clone();
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let xi = grid::node(m, j);
            let denom = (Complex64::new(1.0, 0.0) - alpha * xi * boundary.f[j]).norm_sqr();
            if denom > 1e-30 {
                boundary.one_minus_sq[j] / denom
            } else {
                0.0
            }
        })
        .collect();
    let mu_arc = Arc::new(mu.clone());
    let zeros = mu.density_zeros();
    let eval: DensityEval = Arc::new(move |theta: f64| {
        let (f, gap) = match mu_arc.boundary_schur_at(theta) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let xi = Complex64::from_polar(1.0, theta);
        let denom = (Complex64::new(1.0, 0.0) - alpha * xi * f).norm_sqr();
        if denom > 1e-30 {
            gap / denom
        } else {
            0.0
        }
    });
    let realized = CircleMeasure::from_closure_with_samples(m, samples, eval, zeros)?;
    let mass = realized.total_mass();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "rotated measure keeps only mass {mass:.8} in its density; \
             the singular remainder is not representable"
        )));
    }
    realized.normalize()
}

/// The measure |p(xi)|^2 dmu (atoms scaled by |p|^2 at their positions),
/// normalized.
pub fn polynomial_weight_measure(mu: &CircleMeasure, p: &ComplexPoly) -> Result<CircleMeasure> {
    let m = mu.grid_size();
    let samples: Vec<f64> = (0..m)
        .map(|j| mu.samples()[j] * p.eval(grid::node(m, j)).norm_sqr())
        .collect();
    let mu_arc = Arc::new(mu.clone());
    let p_arc = p.clone();
    let zeros = mu.density_zeros();
    let eval: DensityEval = Arc::new(move |theta: f64| {
        mu_arc.density_at(theta) * p_arc.eval(Complex64::from_polar(1.0, theta)).norm_sqr()
    });
    let atoms = mu
        .atoms()
        .iter()
        .map(|a| Atom {
            angle: a.angle,
            mass: a.mass * p.eval(a.position()).norm_sqr(),
        })
        .filter(|a| a.mass > 0.0)
        .collect();
    CircleMeasure::from_closure_with_samples(m, samples, eval, zeros)?
        .with_atoms(atoms)
        .normalize()
}

/// sup over the grid of P(w, z) exp(-P(log w, z)); always >= 1 by Jensen.
/// Densities only (atom-bearing measures are rejected).
pub fn ainf_characteristic(mu: &CircleMeasure, z_grid: &[Complex64]) -> Result<f64> {
    if !mu.atoms().is_empty() {
        return Err(Error::invalid(
            "the oscillation characteristic is defined for densities only",
        ));
    }
    let mut sup = 1.0f64;
    for &z in z_grid {
        let p = mu.poisson_density(z)?;
        let pl = mu.poisson_log_density(z)?;
        sup = sup.max(p * (-pl).exp());
    }
    Ok(sup)
}

/// The polar grid used for sup-type characteristics: the origin plus radii
/// {0.1, ..., 0.9, 0.95, 0.99} with 256 angles each.
pub fn default_polar_grid() -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    let radii = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
    for &r in &radii {
        for k in 0..256 {
            out.push(Complex64::from_polar(
                r,
                2.0 * std::f64::consts::PI * k as f64 / 256.0,
            ));
        }
    }
    out
}

/// Uniformly random reflection sequence with polynomial decay; the same
/// seed always produces the same sequence.
pub fn random_decaying_sequence(
    seed: u64,
    sigma: f64,
    rate: f64,
    len: usize,
) -> Result<VerblunskySeq> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(len);
    for n in 0..len {
        let u = loop {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            if x * x + y * y <= 1.0 {
                break Complex64::new(x, y);
            }
        };
        values.push(u * sigma * ((n + 1) as f64).powf(-rate));
    }
    VerblunskySeq::prescribed(values)
}

// ---------------------------------------------------------------------------
// log-density quadrature
// ---------------------------------------------------------------------------

/// Quadrature rule for integrals of log w against smooth kernels.
///
/// The singular model `s(theta) = sum_z order_z log|e^{i theta} - xi_z|` is
/// subtracted from log w; the remainder is smooth and periodic, so the
/// plain trapezoid rule on the grid is spectrally accurate. The model is
/// added back in closed form: its Poisson extension is
/// `sum_z order_z log|1 - z conj(xi_z)|` and its Herglotz integral is the
/// principal logarithm of the same quantity.
#[derive(Debug, Clone)]
struct LogRule {
    m: usize,
    /// log w(theta_j) minus the singular model at each grid node.
    regular: Vec<f64>,
    zeros: Vec<DensityZero>,
}

impl LogRule {
    fn model_at(zeros: &[DensityZero], theta: f64) -> f64 {
        let xi = Complex64::from_polar(1.0, theta);
        zeros
            .iter()
            .map(|z| z.order as f64 * (xi - Complex64::from_polar(1.0, z.angle)).norm().ln())
            .sum()
    }

    /// int log w dm; the model integrates to zero.
    fn szego_integral(&self) -> f64 {
        self.regular.iter().sum::<f64>() / self.m as f64
    }

    /// P(log w, z).
    fn poisson(&self, z: Complex64) -> f64 {
        let mut acc = 0.0;
        for (j, &r) in self.regular.iter().enumerate() {
            acc += r * poisson_kernel(z, node_angle(self.m, j));
        }
        acc /= self.m as f64;
        for zero in &self.zeros {
            let xi = Complex64::from_polar(1.0, zero.angle);
            acc += zero.order as f64
                * (Complex64::new(1.0, 0.0) - z * xi.conj()).norm().ln();
        }
        acc
    }

    /// int log w (1 + conj(xi) z)/(1 - conj(xi) z) dm; real part is the
    /// Poisson extension.
    fn herglotz(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &r) in self.regular.iter().enumerate() {
            acc += grid::herglotz_kernel(z, node_angle(self.m, j)) * r;
        }
        acc /= self.m as f64;
        for zero in &self.zeros {
            let xi = Complex64::from_polar(1.0, zero.angle);
            // principal log; 1 - z conj(xi) has positive real part in the disk
            acc += zero.order as f64 * (Complex64::new(1.0, 0.0) - z * xi.conj()).ln();
        }
        acc
    }
}

fn build_log_rule(mu: &CircleMeasure) -> Result<LogRule> {
    let m = mu.m;
    let max = mu.samples.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::DensityFloor {
            min: 0.0,
            floor: tol::DENSITY_FLOOR,
        });
    }

    // calibrate candidate zeros against the samples: estimate the actual
    // vanishing order from the decay toward the zero and drop candidates
    // where the density does not actually vanish (derived weights often
    // cancel an inherited zero)
    let candidates = mu.density_zeros();
    let mut zeros = Vec::new();
    for cand in &candidates {
        if let Some(z) = calibrate_zero(&mu.samples, *cand) {
            zeros.push(z);
        }
    }

    let h = 2.0 * std::f64::consts::PI / m as f64;
    let floor = tol::DENSITY_FLOOR * max.max(1.0);
    let mut clamp_delta = 0.0f64;
    let mut regular = Vec::with_capacity(m);
    for j in 0..m {
        let theta = node_angle(m, j);
        // nodes colliding with a candidate (kept or dropped) cannot trust
        // their sample: 0/0 limits appear at atoms of derived measures
        let collides = candidates
            .iter()
            .any(|z| angular_distance(z.angle, theta) < 1e-9);
        if collides {
            let delta = 1e-5 * h.min(1.0);
            let left = regular_value(mu, &zeros, theta - delta)?;
            let right = regular_value(mu, &zeros, theta + delta)?;
            regular.push(0.5 * (left + right));
            continue;
        }
        let s = mu.samples[j];
        if !(s > 0.0) {
            return Err(Error::DensityFloor {
                min: s,
                floor: tol::DENSITY_FLOOR,
            });
        }
        let near_zero = zeros
            .iter()
            .any(|z| angular_distance(z.angle, theta) < 4.0 * h);
        let log_s = if s < floor && !near_zero {
            clamp_delta += (floor.ln() - s.ln()) / m as f64;
            floor.ln()
        } else {
            s.ln()
        };
        regular.push(log_s - LogRule::model_at(&zeros, theta));
    }
    if clamp_delta > tol::CLAMP_BUDGET {
        return Err(Error::ClampedLog {
            delta: clamp_delta,
            budget: tol::CLAMP_BUDGET,
        });
    }

    Ok(LogRule { m, regular, zeros })
}

fn regular_value(mu: &CircleMeasure, zeros: &[DensityZero], theta: f64) -> Result<f64> {
    let w = mu.density_at(theta);
    if !(w > 0.0) {
        return Err(Error::DensityFloor {
            min: w,
            floor: tol::DENSITY_FLOOR,
        });
    }
    Ok(w.ln() - LogRule::model_at(zeros, theta))
}

/// Estimates the true vanishing order of the density at a candidate zero
/// from the sample decay on both sides; `None` when the density does not
/// vanish there.
fn calibrate_zero(samples: &[f64], cand: DensityZero) -> Option<DensityZero> {
    let m = samples.len();
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let j = ((cand.angle / h).round() as usize) % m;
    let node = node_angle(m, j);
    // skip the nearest node if it sits on the zero; use the next four out
    let offset = if angular_distance(node, cand.angle) < 0.25 * h {
        1
    } else {
        0
    };
    let mut estimates = Vec::new();
    for dir in [-1i64, 1i64] {
        let j1 = (j as i64 + dir * offset.max(1)) .rem_euclid(m as i64) as usize;
        let j2 = (j as i64 + dir * (offset.max(1) + 1)).rem_euclid(m as i64) as usize;
        let (w1, w2) = (samples[j1], samples[j2]);
        if !(w1 > 0.0) || !(w2 > 0.0) {
            continue;
        }
        let d1 = angular_distance(node_angle(m, j1), cand.angle);
        let d2 = angular_distance(node_angle(m, j2), cand.angle);
        if d1 < 1e-12 || d2 < 1e-12 {
            continue;
        }
        estimates.push((w2 / w1).ln() / (d2 / d1).ln());
    }
    if estimates.is_empty() {
        return Some(cand);
    }
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    // round to the nearest even order; order zero means the density does
    // not actually vanish there and the candidate is dropped
    let order = ((mean / 2.0).round() as i64).max(0) as usize * 2;
    if order == 0 {
        return None;
    }
    Some(DensityZero {
        angle: cand.angle,
        order,
    })
}

/// Splits the self-reciprocal polynomial attached to a trigonometric
/// density, snapping boundary root clusters to exact circle points so the
/// factored form stays accurate next to the zeros.
fn factor_trig_density(coeffs: &[Complex64]) -> Result<TrigFactors> {
    let order = coeffs.len() - 1;
    // associated polynomial p(z) = sum_k c_{k - order} z^k of degree 2*order
    let mut assoc = Vec::with_capacity(2 * order + 1);
    for k in 0..=2 * order {
        let c = if k < order {
            coeffs[order - k].conj()
        } else {
            coeffs[k - order]
        };
        assoc.push(c);
    }
    let poly = ComplexPoly::new(assoc);
    let roots = poly.roots().map_err(|e| match e {
        Error::RootsDiverged { residual, .. } => Error::invalid(format!(
            "could not factor the trigonometric density (root residual {residual:.3e})"
        )),
        other => other,
    })?;

    // derivatives of the density for Newton refinement of double zeros
    let w_deriv = |theta: f64, order: u32| -> f64 {
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            let ik = Complex64::new(0.0, k as f64).powu(order);
            acc += 2.0 * (ik * c * Complex64::from_polar(1.0, k as f64 * theta)).re;
        }
        if order == 0 {
            acc += coeffs[0].re;
        }
        acc
    };

    // multiple boundary roots spread like eps^(1/multiplicity), so the
    // factorization clusters with a wider radius than the generic solver
    let boundary_cluster = 5e-3;
    let mut clusters = vec![(roots.roots[0], vec![roots.roots[0]])];
    for &r in &roots.roots[1..] {
        match clusters.iter_mut().find(|(c, _)| (r - *c).norm() <= boundary_cluster) {
            Some((_, members)) => members.push(r),
            None => clusters.push((r, vec![r])),
        }
    }

    let mut snapped = Vec::with_capacity(roots.roots.len());
    let mut zeros = Vec::new();
    for (_, members) in &clusters {
        let center = members.iter().sum::<Complex64>() / members.len() as f64;
        let near_circle = members.len() > 1 || (center.norm() - 1.0).abs() <= 1e-6;
        if near_circle && (center.norm() - 1.0).abs() <= boundary_cluster {
            let multiplicity = members.len();
            if multiplicity % 2 != 0 {
                return Err(Error::OddBoundaryZero(center.arg()));
            }
            // Newton on the (2m-1)-th derivative: a simple zero there, so
            // the angle converges to machine accuracy for any even order
            let mut angle = grid::wrap_angle(center.arg());
            let lo = (multiplicity - 1) as u32;
            for _ in 0..12 {
                let d1 = w_deriv(angle, lo);
                let d2 = w_deriv(angle, lo + 1);
                if d2.abs() < 1e-300 {
                    break;
                }
                let step = d1 / d2;
                angle -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            angle = grid::wrap_angle(angle);
            zeros.push(DensityZero {
                angle,
                order: multiplicity,
            });
            let exact = Complex64::from_polar(1.0, angle);
            for _ in 0..multiplicity {
                snapped.push(exact);
            }
        } else {
            snapped.extend_from_slice(members);
        }
    }
    zeros.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());

    Ok(TrigFactors {
        lead: poly.leading(),
        roots: snapped,
        order,
        zeros,
    })
}

/// Looks for density zeros the caller did not declare: grid minima far
/// below the scale are bracketed and refined by a ternary search. Detected
/// zeros are reported with order two (a generic minimum); spurious
/// candidates are dropped later by the order calibration.
fn detect_zeros(
    samples: &[f64],
    declared: &[DensityZero],
    eval: &(dyn Fn(f64) -> f64 + Send + Sync),
) -> Vec<DensityZero> {
    let m = samples.len();
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let max = samples.iter().copied().fold(0.0, f64::max);
    let threshold = tol::ZERO_SCAN * max.max(1e-300);
    let mut found: Vec<DensityZero> = Vec::new();
    for j in 0..m {
        let prev = samples[(j + m - 1) % m];
        let next = samples[(j + 1) % m];
        if samples[j] <= threshold && samples[j] <= prev && samples[j] <= next {
            let center = node_angle(m, j);
            let near_known = declared
                .iter()
                .chain(found.iter())
                .any(|z| angular_distance(z.angle, center) < 2.0 * h);
            if near_known {
                continue;
            }
            let mut lo = center - h;
            let mut hi = center + h;
            for _ in 0..200 {
                let t1 = lo + (hi - lo) / 3.0;
                let t2 = hi - (hi - lo) / 3.0;
                if eval(t1) < eval(t2) {
                    hi = t2;
                } else {
                    lo = t1;
                }
            }
            let mut angle = 0.5 * (lo + hi);
            // polish by bisection on the central difference of the density;
            // the ternary search alone stalls in the flat bottom
            let delta = 1e-4;
            let slope = |t: f64| eval(t + delta) - eval(t - delta);
            let (mut a, mut b) = (angle - 3.0 * delta, angle + 3.0 * delta);
            if slope(a) < 0.0 && slope(b) > 0.0 {
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if slope(mid) < 0.0 {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                angle = 0.5 * (a + b);
            }
            // keep only genuine zeros; a merely small minimum is handled
            // by the clamped trapezoid path
            if eval(angle) <= 1e-10 * max.max(1e-300) {
                found.push(DensityZero {
                    angle: grid::wrap_angle(angle),
                    order: 2,
                });
            }
        }
    }
    found
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}
