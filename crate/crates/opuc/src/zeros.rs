//! Pointwise boundary diagnostics: zero scaling, radial Schur decay, Stolz
//! suprema, pointwise limits of |phi_n*|, rescaled zero counting measures,
//! and the boundary argument identity.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{self, node_angle, GridFunction};
use crate::measure::CircleMeasure;
use crate::orthopoly::{ArgumentProfile, OpucSystem};
use crate::schur::IterateOracle;
use crate::tol;

/// One degree of the boundary scaling diagnostics at a fixed point xi.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    /// n * dist(zeros of phi_n, xi)
    pub dist_times_n: f64,
    /// |f_n((1 - a/n) xi)|, NaN when the radius fell below the gate
    pub radial_abs: f64,
    /// sup of |f_n| over the Stolz region mesh
    pub stolz_sup: f64,
    /// | |phi_n*(xi)|^2 - 1/w(xi) |
    pub phistar_gap: f64,
}

/// Scaling diagnostics over a degree list at one boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingSeries {
    pub xi_angle: f64,
    pub rows: Vec<ScalingRow>,
}

impl ScalingSeries {
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "n,dist_times_n,radial_abs,stolz_sup,phistar_gap")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.n, r.dist_times_n, r.radial_abs, r.stolz_sup, r.phistar_gap
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// n * dist(Z(phi_n), xi) for each requested degree, from the certified
/// zero sets.
pub fn zero_scaling(sys: &OpucSystem, xi: Complex64, n_list: &[usize]) -> Result<Vec<f64>> {
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnCircle(xi.norm()));
    }
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Ok(0.0);
            }
            let roots = sys.zero_set(n)?;
            Ok(n as f64 * roots.distance_to(xi))
        })
        .collect()
}

/// f_n((1 - a/n) xi) by the Wall-inverse path; degrees whose radius
/// 1 - a/n falls below 1/2 are skipped (`None`).
pub fn radial_schur_values(
    ev: &IterateOracle,
    xi: Complex64,
    a: f64,
    n_list: &[usize],
) -> Result<Vec<Option<Complex64>>> {
    if !(a > 0.0) {
        return Err(Error::invalid("the radial parameter must be positive"));
    }
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnCircle(xi.norm()));
    }
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Ok(None);
            }
            let r = 1.0 - a / n as f64;
            if r < 0.5 {
                return Ok(None);
            }
            let z = xi * r;
            Ok(Some(ev.value(n, z)?))
        })
        .collect()
}

/// Triangular mesh of the Stolz region (convex hull of rho*D and xi):
/// segments from xi to the rho circle, radially capped at |z| <= 0.999.
pub fn stolz_mesh(xi: Complex64, rho: f64, radial: usize, transverse: usize) -> Vec<Complex64> {
    let mut mesh = Vec::with_capacity(radial * transverse);
    for i in 0..radial {
        let u = (i as f64 + 0.5) / radial as f64;
        for l in 0..transverse {
            let psi = 2.0 * std::f64::consts::PI * l as f64 / transverse as f64;
            let q = Complex64::from_polar(rho, psi);
            let mut z = xi * (1.0 - u) + q * u;
            let r = z.norm();
            if r > 0.999 {
                z *= 0.999 / r;
            }
            mesh.push(z);
        }
    }
    mesh
}

/// sup of |f_n| over a 64 x 64 mesh of the Stolz region at xi.
pub fn stolz_sup(
    ev: &IterateOracle,
    xi: Complex64,
    rho: f64,
    n: usize,
) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid("the Stolz parameter must sit in (0, 1)"));
    }
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnCircle(xi.norm()));
    }
    let mut sup = 0.0f64;
    for z in stolz_mesh(xi, rho, 64, 64) {
        sup = sup.max(ev.value(n, z)?.norm());
    }
    Ok(sup)
}

/// | |phi_n*(xi)|^2 - 1/w(xi) | per degree; on the circle the target
/// 1/|D(xi)|^2 is exactly 1/w(xi).
pub fn phi_star_gap(
    sys: &OpucSystem,
    mu: &CircleMeasure,
    xi_angle: f64,
    n_list: &[usize],
) -> Result<Vec<f64>> {
    let w = mu.density_at(xi_angle);
    if w <= tol::DENSITY_FLOOR {
        return Err(Error::AtDensityZero(w));
    }
    if mu
        .atoms()
        .iter()
        .any(|a| (a.angle - grid::wrap_angle(xi_angle)).abs() < 1e-12)
    {
        return Err(Error::AtDensityZero(0.0));
    }
    let target = 1.0 / w;
    let xi = Complex64::from_polar(1.0, xi_angle);
    Ok(n_list
        .iter()
        .map(|&n| (sys.phi_star(n).eval(xi).norm_sqr() - target).abs())
        .collect())
}

/// Assembles the four scaling columns over a degree list.
pub fn scaling_series(
    sys: &OpucSystem,
    mu: &CircleMeasure,
    ev: &IterateOracle,
    xi_angle: f64,
    radial_a: f64,
    rho: f64,
    n_list: &[usize],
) -> Result<ScalingSeries> {
    let xi = Complex64::from_polar(1.0, xi_angle);
    let dist = zero_scaling(sys, xi, n_list)?;
    let radial = radial_schur_values(ev, xi, radial_a, n_list)?;
    let gaps = phi_star_gap(sys, mu, xi_angle, n_list)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let stolz = stolz_sup(ev, xi, rho, n)?;
        rows.push(ScalingRow {
            n,
            dist_times_n: dist[i],
            radial_abs: radial[i].map_or(f64::NAN, |v| v.norm()),
            stolz_sup: stolz,
            phistar_gap: gaps[i],
        });
    }
    Ok(ScalingSeries { xi_angle, rows })
}

/// Zeros of phi_n rescaled into the upper half-plane around xi = 1:
/// xi_k = i n (1 - z_k), with the rescaled counting density h_n'.
#[derive(Debug, Clone)]
pub struct RescaledZeroProfile {
    pub n: usize,
    /// rescaled zeros, one per zero of phi_n (origin zeros land at i*n)
    pub rescaled: Vec<Complex64>,
}

pub fn rescaled_zero_profile(sys: &OpucSystem, n: usize) -> Result<RescaledZeroProfile> {
    if n == 0 {
        return Err(Error::invalid("rescaled profile needs degree >= 1"));
    }
    let roots = sys.zero_set(n)?;
    let rescaled = roots
        .roots
        .iter()
        .map(|&z| Complex64::new(0.0, n as f64) * (Complex64::new(1.0, 0.0) - z))
        .collect();
    Ok(RescaledZeroProfile { n, rescaled })
}

impl RescaledZeroProfile {
    /// h_n'(t) = (1/n) sum_k (1 - |z_k|^2) / |e^{it/n} - z_k|^2 for
    /// |t| <= pi n; zeros at the origin contribute exactly 1/n each.
    pub fn h_prime(&self, t: f64) -> Result<f64> {
        let n = self.n as f64;
        if t.abs() > std::f64::consts::PI * n {
            return Err(Error::invalid(format!(
                "rescaled angle |t| = {} beyond pi n = {}",
                t.abs(),
                std::f64::consts::PI * n
            )));
        }
        let xi = Complex64::from_polar(1.0, t / n);
        let mut acc = 0.0;
        for r in &self.rescaled {
            // recover z from the rescaling
            let z = Complex64::new(1.0, 0.0) - r / Complex64::new(0.0, n);
            if z.norm_sqr() == 0.0 {
                acc += 1.0;
            } else {
                acc += (1.0 - z.norm_sqr()) / (xi - z).norm_sqr();
            }
        }
        Ok(acc / n)
    }

    /// Rescaled zeros kept by the window |xi_k| < 1.9 b.
    pub fn window(&self, b: f64) -> Vec<Complex64> {
        self.rescaled
            .iter()
            .copied()
            .filter(|x| x.norm() < 1.9 * b)
            .collect()
    }

    /// Limit kernel of the windowed zeros: U_b(t) = sum 2 Im xi_k / |t - xi_k|^2.
    pub fn limit_kernel(&self, b: f64, t: f64) -> f64 {
        self.window(b)
            .iter()
            .map(|x| 2.0 * x.im / (Complex64::new(t, 0.0) - x).norm_sqr())
            .sum()
    }
}

/// Samples of h_n' over a t grid.
pub fn rescaled_density(profile: &RescaledZeroProfile, t_grid: &[f64]) -> Result<Vec<f64>> {
    t_grid.iter().map(|&t| profile.h_prime(t)).collect()
}

/// Boundary argument identity: compares
/// `v_n(t) = nt - gamma_n(t) + 2 arctan(|f_n| sin(gamma_n + t + kappa_n) /
/// (1 + |f_n| cos(gamma_n + t + kappa_n)))`
/// against the conjugate function of `log |phi_n* (1 - xi b_n f_n)|^2`,
/// modulo 2 pi and an additive constant.
pub fn argument_identity_check(
    sys: &OpucSystem,
    mu: &CircleMeasure,
    profile: &ArgumentProfile,
    n: usize,
) -> Result<f64> {
    let m = mu.grid_size();
    if profile.grid_size() != m || profile.degree() != n {
        return Err(Error::GridMismatch(profile.grid_size(), m));
    }
    let boundary = mu.boundary_schur()?;

    let mut v = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    for j in 0..m {
        let theta = node_angle(m, j);
        let xi = grid::node(m, j);
        let (f_n, _gap) =
            sys.wall()
                .boundary_iterate(n, theta, boundary.f[j], boundary.one_minus_sq[j])?;
        let star = sys.phi_star(n).eval(xi);
        let b_n = sys.phi(n).eval(xi) / star;
        let gamma = profile.gamma_node(j);

        let modulus = f_n.norm();
        let third = if modulus > 1e-10 {
            // e^{i kappa} = -f_n / |f_n|
            let kappa = (-f_n / modulus).arg();
            let psi = gamma + theta + kappa;
            let denom = 1.0 + modulus * psi.cos();
            if denom.abs() > 1e-12 {
                2.0 * (modulus * psi.sin() / denom).atan()
            } else {
                // the arctan form degenerates exactly where 1 - xi b f
                // crosses the imaginary axis; take the argument directly
                2.0 * (Complex64::new(1.0, 0.0) - xi * b_n * f_n).arg()
            }
        } else {
            0.0
        };
        v.push(n as f64 * theta - gamma + third);

        let inner = star * (Complex64::new(1.0, 0.0) - xi * b_n * f_n);
        let sq = inner.norm_sqr();
        if !(sq > 0.0) {
            return Err(Error::SingularPoint {
                z: xi,
                denom: sq.sqrt(),
            });
        }
        u.push(Complex64::new(sq.ln(), 0.0));
    }

    let conj = grid::harmonic_conjugate(&GridFunction::new(u)?)?;

    // circular comparison up to one additive constant
    let mut mean = Complex64::new(0.0, 0.0);
    let diffs: Vec<f64> = (0..m).map(|j| v[j] - conj.value(j).re).collect();
    for &d in &diffs {
        mean += Complex64::from_polar(1.0, d);
    }
    let anchor = mean.arg();
    let mut worst = 0.0f64;
    for &d in &diffs {
        let mut delta = (d - anchor) % (2.0 * std::f64::consts::PI);
        if delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        if delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        worst = worst.max(delta.abs());
    }
    Ok(worst)
}

/// Annular sector of the Stolz region between radii alpha*delta and
/// beta*delta around xi, meshed geometrically toward the boundary.
pub fn region_mesh(
    xi: Complex64,
    delta: f64,
    rho: f64,
    alpha: f64,
    beta: f64,
) -> Result<Vec<Complex64>> {
    if !(alpha > 0.0 && beta > alpha && rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(
            "region parameters need 0 < alpha < beta and rho in (0, 1)",
        ));
    }
    let mut mesh = Vec::new();
    let mut d = beta * delta;
    while d > alpha * delta {
        for l in 0..33 {
            let phi = -1.5 + 3.0 * l as f64 / 32.0;
            let z = xi * (1.0 - d * Complex64::from_polar(1.0, phi));
            if z.norm() <= 0.999 && in_stolz(z, xi, rho) {
                mesh.push(z);
            }
        }
        d /= 1.2;
    }
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(mesh)
}

/// Membership in the convex hull of rho*D and xi.
fn in_stolz(z: Complex64, xi: Complex64, rho: f64) -> bool {
    if z.norm() <= rho {
        return true;
    }
    // z = (1-u) xi + u q with q in rho*D for some u in (0, 1]:
    // |z - (1-u) xi|^2 <= u^2 rho^2, a quadratic inequality in u
    let v = z - xi;
    let a = 1.0 - rho * rho;
    let b = (v.conj() * xi).re;
    let c = v.norm_sqr();
    let disc = b * b - a * c;
    if disc < 0.0 {
        return false;
    }
    let root = disc.sqrt();
    let lo = (-b - root) / a;
    let hi = (-b + root) / a;
    hi > 0.0 && lo <= 1.0
}

/// Oscillation of each requested iterate over the region mesh.
pub fn region_oscillation(
    ev: &IterateOracle,
    xi: Complex64,
    delta: f64,
    rho: f64,
    alpha: f64,
    beta: f64,
    k_list: &[usize],
) -> Result<Vec<f64>> {
    let mesh = region_mesh(xi, delta, rho, alpha, beta)?;
    k_list
        .iter()
        .map(|&k| {
            let values: Vec<Complex64> = mesh
                .iter()
                .map(|&z| ev.value(k, z))
                .collect::<Result<_>>()?;
            let mut osc = 0.0f64;
            for i in 0..values.len() {
                for j in (i + 1)..values.len() {
                    osc = osc.max((values[i] - values[j]).norm());
                }
            }
            Ok(osc)
        })
        .collect()
}
