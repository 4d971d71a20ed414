//! Szego recursion, second-kind polynomials, Blaschke-product argument
//! profiles, Christoffel-Darboux norm identities, and Khrushchev's boundary
//! formula.

use num_complex::Complex64;
use once_cell::sync::OnceCell;

use crate::entropy;
use crate::error::{Error, Result};
use crate::grid::{self, node_angle, GridFunction};
use crate::measure::{iterate_gap_weight, polynomial_weight_measure, CircleMeasure};
use crate::poly::{ComplexPoly, RootSet};
use crate::schur::{SchurSeries, VerblunskySeq, WallPolynomials};
use crate::tol;

/// Orthonormal polynomials phi_n, their reversals, the second-kind family
/// psi_n, leading coefficients, and lazily computed zero sets.
#[derive(Debug)]
pub struct OpucSystem {
    a: VerblunskySeq,
    wall: WallPolynomials,
    phi: Vec<ComplexPoly>,
    phi_star: Vec<ComplexPoly>,
    psi: Vec<ComplexPoly>,
    psi_star: Vec<ComplexPoly>,
    leading: Vec<f64>,
    zero_sets: Vec<OnceCell<RootSet>>,
}

/// Runs the Szego recursion up to degree `n_max`:
///
/// ```text
/// sqrt(1 - |a_n|^2) phi_{n+1}* = phi_n* - z a_n phi_n,
/// sqrt(1 - |a_n|^2) phi_{n+1}  = z phi_n - conj(a_n) phi_n*.
/// ```
///
/// The second-kind family runs the same recursion on the sign-flipped
/// sequence. Both families are cross-checked coefficientwise against their
/// Wall-polynomial forms; a mismatch is a hard internal error.
pub fn szego_recursion(a: &VerblunskySeq, n_max: usize) -> Result<OpucSystem> {
    let mut phi = vec![ComplexPoly::one()];
    let mut phi_star = vec![ComplexPoly::one()];
    let mut psi = vec![ComplexPoly::one()];
    let mut psi_star = vec![ComplexPoly::one()];
    let mut leading = vec![1.0f64];

    for n in 0..n_max {
        let an = a.at(n);
        let gap = 1.0 - an.norm_sqr();
        if gap <= tol::UNIT_GAP {
            return Err(Error::FinitelySupported {
                index: n,
                modulus: an.norm(),
            });
        }
        let s = 1.0 / gap.sqrt();
        let sc = Complex64::new(s, 0.0);

        let p_next = phi[n]
            .shifted(1)
            .sub(&phi_star[n].scaled(an.conj()))
            .scaled(sc);
        let ps_next = phi_star[n].sub(&phi[n].shifted(1).scaled(an)).scaled(sc);
        phi.push(p_next);
        phi_star.push(ps_next);

        let q_next = psi[n]
            .shifted(1)
            .sub(&psi_star[n].scaled(-an.conj()))
            .scaled(sc);
        let qs_next = psi_star[n]
            .sub(&psi[n].shifted(1).scaled(-an))
            .scaled(sc);
        psi.push(q_next);
        psi_star.push(qs_next);

        leading.push(leading[n] * s);
    }

    let wall = WallPolynomials::build(a, n_max.saturating_sub(1));
    let sys = OpucSystem {
        a: a.clone(),
        wall,
        phi,
        phi_star,
        psi,
        psi_star,
        leading,
        zero_sets: (0..=n_max).map(|_| OnceCell::new()).collect(),
    };
    sys.cross_check()?;
    Ok(sys)
}

impl OpucSystem {
    fn cross_check(&self) -> Result<()> {
        for n in 1..=self.max_degree() {
            let scale = self.phi[n].coeff_scale().max(1.0);
            let pairs = [
                (
                    "recursion vs Wall form of phi",
                    &self.phi[n],
                    self.wall.phi(n),
                ),
                (
                    "recursion vs Wall form of phi*",
                    &self.phi_star[n],
                    self.wall.phi_star(n),
                ),
                (
                    "second-kind vs Wall form of psi",
                    &self.psi[n],
                    self.wall.psi(n),
                ),
                (
                    "second-kind vs Wall form of psi*",
                    &self.psi_star[n],
                    self.wall.psi_star(n),
                ),
            ];
            for (what, mine, wall_form) in pairs {
                let residual = mine.max_coeff_distance(&wall_form) / scale;
                if residual > tol::WALL_RESIDUAL {
                    return Err(Error::ConsistencyGate {
                        what,
                        residual,
                        gate: tol::WALL_RESIDUAL,
                    });
                }
            }
            // reversal involution ties the pair together
            let rev = self.phi_star[n].reverse_star(n)?;
            let residual = rev.max_coeff_distance(&self.phi[n]) / scale;
            if residual > tol::WALL_RESIDUAL {
                return Err(Error::ConsistencyGate {
                    what: "phi vs reversed phi*",
                    residual,
                    gate: tol::WALL_RESIDUAL,
                });
            }
        }
        Ok(())
    }

    pub fn max_degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn coefficients(&self) -> &VerblunskySeq {
        &self.a
    }

    pub fn wall(&self) -> &WallPolynomials {
        &self.wall
    }

    pub fn phi(&self, n: usize) -> &ComplexPoly {
        &self.phi[n]
    }

    pub fn phi_star(&self, n: usize) -> &ComplexPoly {
        &self.phi_star[n]
    }

    pub fn psi(&self, n: usize) -> &ComplexPoly {
        &self.psi[n]
    }

    pub fn psi_star(&self, n: usize) -> &ComplexPoly {
        &self.psi_star[n]
    }

    /// Leading coefficient k_n = prod_{j<n} (1 - |a_j|^2)^(-1/2).
    pub fn leading(&self, n: usize) -> f64 {
        self.leading[n]
    }

    /// Finite Blaschke product b_n = phi_n / phi_n*.
    pub fn blaschke_at(&self, n: usize, z: Complex64) -> Complex64 {
        self.phi[n].eval(z) / self.phi_star[n].eval(z)
    }

    /// Zeros of phi_n with certified residuals, computed once per degree.
    pub fn zero_set(&self, n: usize) -> Result<&RootSet> {
        self.zero_sets[n].get_or_try_init(|| self.phi[n].roots())
    }

    /// gamma_n'(t): the boundary derivative of the argument of b_n, a sum
    /// of Poisson kernels at the zeros plus the origin multiplicity.
    pub fn argument_derivative(&self, n: usize, t: f64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let roots = self.zero_set(n)?;
        let xi = Complex64::from_polar(1.0, t);
        let mut acc = 0.0;
        for r in &roots.roots {
            if r.norm_sqr() == 0.0 {
                acc += 1.0;
            } else {
                acc += (1.0 - r.norm_sqr()) / (xi - r).norm_sqr();
            }
        }
        Ok(acc)
    }
}

/// Argument of the Blaschke product b_n along the circle: the positive
/// derivative gamma_n', and gamma_n itself by cumulative quadrature
/// anchored at the principal argument of b_n(1).
#[derive(Debug, Clone)]
pub struct ArgumentProfile {
    n: usize,
    l_degree: usize,
    zeros: Vec<Complex64>,
    gamma0: f64,
    m: usize,
    /// gamma(theta_j) - gamma0 for j = 0..=m (last entry is the full
    /// winding 2 pi n).
    cumulative: Vec<f64>,
}

pub fn argument_profile(sys: &OpucSystem, n: usize, m: usize) -> Result<ArgumentProfile> {
    grid::check_grid_size(m)?;
    if m < tol::UNWRAP_PER_WINDING * n {
        return Err(Error::invalid(format!(
            "grid of {m} points cannot unwrap {n} windings; need at least {}",
            tol::UNWRAP_PER_WINDING * n
        )));
    }
    let (l_degree, zeros) = if n == 0 {
        (0, Vec::new())
    } else {
        let roots = sys.zero_set(n)?;
        let worst = roots.max_residual();
        if worst > 10.0 * tol::ROOT_RESIDUAL {
            return Err(Error::RootResiduals {
                degree: n,
                residual: worst,
                gate: 10.0 * tol::ROOT_RESIDUAL,
            });
        }
        let l = roots.origin_multiplicity();
        let nonzero = roots
            .roots
            .iter()
            .copied()
            .filter(|r| r.norm_sqr() > 0.0)
            .collect();
        (l, nonzero)
    };

    let gamma0 = sys.blaschke_at(n, Complex64::new(1.0, 0.0)).arg();

    let derivative = |t: f64| -> f64 {
        let xi = Complex64::from_polar(1.0, t);
        let mut acc = l_degree as f64;
        for r in &zeros {
            acc += (1.0 - r.norm_sqr()) / (xi - r).norm_sqr();
        }
        acc
    };

    // cumulative integral over the grid cells, adaptive per cell so that
    // Poisson spikes from zeros near the circle stay resolved
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let cell_tol = 1e-13 * (n as f64 + 1.0);
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for j in 0..m {
        let a = j as f64 * h;
        acc += adaptive_gl(&derivative, a, a + h, cell_tol, 0);
        cumulative.push(acc);
    }

    Ok(ArgumentProfile {
        n,
        l_degree,
        zeros,
        gamma0,
        m,
        cumulative,
    })
}

fn gl8(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 8] = [
        -0.9602898564975363,
        -0.7966664774136267,
        -0.5255324099163290,
        -0.1834346424956498,
        0.1834346424956498,
        0.5255324099163290,
        0.7966664774136267,
        0.9602898564975363,
    ];
    const W: [f64; 8] = [
        0.1012285362903763,
        0.2223810344533745,
        0.3137066458778873,
        0.3626837833783620,
        0.3626837833783620,
        0.3137066458778873,
        0.2223810344533745,
        0.1012285362903763,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..8).map(|i| half * W[i] * f(mid + half * X[i])).sum()
}

fn adaptive_gl(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let whole = gl8(f, a, b);
    let mid = 0.5 * (a + b);
    let split = gl8(f, a, mid) + gl8(f, mid, b);
    if (whole - split).abs() <= tol || depth >= 40 {
        split
    } else {
        adaptive_gl(f, a, mid, 0.5 * tol, depth + 1) + adaptive_gl(f, mid, b, 0.5 * tol, depth + 1)
    }
}

impl ArgumentProfile {
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Multiplicity of the zero at the origin.
    pub fn l_degree(&self) -> usize {
        self.l_degree
    }

    pub fn nonzero_zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn gamma_prime(&self, t: f64) -> f64 {
        let xi = Complex64::from_polar(1.0, t);
        let mut acc = self.l_degree as f64;
        for r in &self.zeros {
            acc += (1.0 - r.norm_sqr()) / (xi - r).norm_sqr();
        }
        acc
    }

    /// gamma at the grid node theta_j (j may equal the grid size, giving
    /// the wrap-around value gamma0 + 2 pi n).
    pub fn gamma_node(&self, j: usize) -> f64 {
        self.gamma0 + self.cumulative[j]
    }

    /// gamma at an arbitrary angle in [0, 2 pi].
    pub fn gamma(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 2.0 * std::f64::consts::PI);
        let h = 2.0 * std::f64::consts::PI / self.m as f64;
        let j = ((t / h) as usize).min(self.m - 1);
        let base = j as f64 * h;
        let derivative = |s: f64| self.gamma_prime(s);
        self.gamma0 + self.cumulative[j] + adaptive_gl(&derivative, base, t, 1e-13, 0)
    }

    /// Total variation of the argument over one turn; equals 2 pi n up to
    /// quadrature error.
    pub fn winding_integral(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Largest circular distance between the integrated argument and the
    /// unwrapped direct argument of b_n over the grid.
    pub fn consistency_error(&self, sys: &OpucSystem) -> f64 {
        let mut worst = 0.0f64;
        let mut direct = self.gamma0;
        for j in 0..self.m {
            let t = node_angle(self.m, j);
            let raw = sys.blaschke_at(self.n, Complex64::from_polar(1.0, t)).arg();
            // unwrap against the running value
            let mut delta = raw - wrap_to_pi(direct);
            while delta > std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
            }
            while delta < -std::f64::consts::PI {
                delta += 2.0 * std::f64::consts::PI;
            }
            direct += delta;
            worst = worst.max((direct - self.gamma_node(j)).abs());
        }
        worst
    }
}

fn wrap_to_pi(t: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = t % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x < -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

/// Both sides of the Christoffel-Darboux norm identity at a boundary
/// point: the squared norm of the reproducing kernel (sum of |phi_j|^2)
/// against |phi_n*|^2 gamma_n'.
#[derive(Debug, Clone, Copy)]
pub struct CdNormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
}

pub fn cd_kernel_norm(sys: &OpucSystem, xi: Complex64, n: usize) -> Result<CdNormCheck> {
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnCircle(xi.norm()));
    }
    let lhs: f64 = (0..n).map(|j| sys.phi(j).eval(xi).norm_sqr()).sum();
    let rhs = sys.phi_star(n).eval(xi).norm_sqr() * sys.argument_derivative(n, xi.arg())?;
    let rel_error = (lhs - rhs).abs() / lhs.abs().max(1e-300);
    Ok(CdNormCheck {
        lhs,
        rhs,
        rel_error,
    })
}

/// Pointwise residual of the boundary identity
/// `|phi_n*|^2 w = (1 - |f_n|^2) / |1 - xi b_n f_n|^2` over the grid.
#[derive(Debug, Clone)]
pub struct KhrushchevCheck {
    pub residual: GridFunction,
    pub max_residual: f64,
}

pub fn khrushchev_residual(
    sys: &OpucSystem,
    mu: &CircleMeasure,
    n: usize,
) -> Result<KhrushchevCheck> {
    let m = mu.grid_size();
    let boundary = mu.boundary_schur()?;
    let mut residual = Vec::with_capacity(m);
    let mut max_residual = 0.0f64;
    for j in 0..m {
        let theta = node_angle(m, j);
        let xi = grid::node(m, j);
        let star = sys.phi_star(n).eval(xi);
        if star.norm_sqr() < 1e-280 {
            return Err(Error::ConsistencyGate {
                what: "phi_n* vanished on the circle",
                residual: star.norm(),
                gate: 1e-140,
            });
        }
        let (f_n, gap) =
            sys.wall()
                .boundary_iterate(n, theta, boundary.f[j], boundary.one_minus_sq[j])?;
        let b_n = sys.phi(n).eval(xi) / star;
        let lhs = star.norm_sqr() * mu.samples()[j];
        let denom = (Complex64::new(1.0, 0.0) - xi * b_n * f_n).norm_sqr();
        let rhs = if denom > 1e-280 { gap / denom } else { lhs };
        let r = (lhs - rhs).abs();
        residual.push(Complex64::new(r, 0.0));
        max_residual = max_residual.max(r);
    }
    Ok(KhrushchevCheck {
        residual: GridFunction::new(residual)?,
        max_residual,
    })
}

/// Two independent evaluations of the entropy of |phi_n*|^2 dmu: directly
/// on the transformed measure, and through the iterate identity
/// `K(mu_n, z) + log((1 - |z b_n f_n|^2)/(1 - |z f_n|^2))`.
pub fn khrushchev_transform_check(
    sys: &OpucSystem,
    mu: &CircleMeasure,
    f: &SchurSeries,
    n: usize,
    z: Complex64,
) -> Result<(f64, f64)> {
    if z.norm() > 0.9 + 1e-12 {
        return Err(Error::OutsideWorkingDisk(0.9, "khrushchev_transform_check"));
    }
    // direct path
    let transformed = polynomial_weight_measure(mu, sys.phi_star(n))?;
    let lhs = entropy::entropy(&transformed, z)?;

    // iterate path
    let f_z = f.eval(z);
    let fn_z = sys.wall().iterate_from_function(n, z, f_z)?;
    let b_z = sys.blaschke_at(n, z);
    let gap_weight = iterate_gap_weight(mu, sys.wall(), n)?;
    let p_log = gap_weight.poisson_log_density(z)?;
    let rhs = (1.0 - (z * b_z * fn_z).norm_sqr()).ln() - p_log;
    Ok((lhs, rhs))
}
