//! The entropy function K(mu, z), its log-product form over the Schur
//! iterates, the one-step chain identity, monotonicity and invariance
//! diagnostics, Bernstein-Szego approximants, and oscillation / BMO-type
//! ratio reports.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{node_angle, poisson_kernel, GridFunction};
use crate::measure::{clark_measure, iterate_gap_weight, iterate_measure, CircleMeasure};
use crate::orthopoly::OpucSystem;
use crate::schur::{caratheodory_to_schur, schur_algorithm, Provenance, SchurSeries, VerblunskySeq, WallPolynomials};
use crate::tol;

/// Working radius for entropy evaluations.
pub const ENTROPY_RADIUS: f64 = 0.99;
/// Working radius for product / chain identities.
pub const PRODUCT_RADIUS: f64 = 0.9;

fn entropy_gate(z: Complex64, what: &'static str) -> Result<()> {
    if z.norm() > ENTROPY_RADIUS + 1e-12 {
        return Err(Error::OutsideWorkingDisk(ENTROPY_RADIUS, what));
    }
    Ok(())
}

/// K(mu, z) = log P(mu, z) - P(log w, z). Nonnegative, and zero exactly
/// for the Lebesgue measure.
pub fn entropy(mu: &CircleMeasure, z: Complex64) -> Result<f64> {
    entropy_gate(z, "entropy")?;
    mu.assert_probability()?;
    let p = mu.poisson(z)?;
    let p_log = mu.poisson_log_density(z)?;
    Ok(p.ln() - p_log)
}

/// Entropy of a (not necessarily normalized) weight:
/// log P(v, z) - P(log v, z), atoms ignored.
pub fn weight_entropy(weight: &CircleMeasure, z: Complex64) -> Result<f64> {
    entropy_gate(z, "weight_entropy")?;
    let p = weight.poisson_density(z)?;
    let p_log = weight.poisson_log_density(z)?;
    Ok(p.ln() - p_log)
}

/// Entropy of the n-th iterate measure from its realized density and the
/// iterate value at z.
///
/// The harmonic extension of the full iterate measure, singular part
/// included, is exactly `(1 - |z f_n(z)|^2) / |1 - z f_n(z)|^2`, so this
/// form stays valid when the iterate measure carries point masses that the
/// realized density cannot represent.
pub fn iterate_entropy_from_weight(
    weight_n: &CircleMeasure,
    fn_z: Complex64,
    z: Complex64,
) -> Result<f64> {
    entropy_gate(z, "iterate_entropy_from_weight")?;
    let zf = z * fn_z;
    let p = (1.0 - zf.norm_sqr()) / (Complex64::new(1.0, 0.0) - zf).norm_sqr();
    Ok(p.ln() - weight_n.poisson_log_density(z)?)
}

/// Both quadrature forms of the entropy: the definition through the
/// density, and the boundary form
/// `log(1 - |z f(z)|^2) - P(log(1 - |f|^2), z)` through the Schur function.
/// They agree for absolutely continuous measures.
pub fn entropy_two_form(
    mu: &CircleMeasure,
    f: &SchurSeries,
    wall: &WallPolynomials,
    z: Complex64,
) -> Result<(f64, f64)> {
    let definition = entropy(mu, z)?;
    let gap_weight = iterate_gap_weight(mu, wall, 0)?;
    let boundary_form = (1.0 - (z * f.eval(z)).norm_sqr()).ln()
        - gap_weight.poisson_log_density(z)?;
    Ok((definition, boundary_form))
}

/// eta(z) = max(sqrt(K), K exp(K/2)); zero exactly when K vanishes.
pub fn eta_of_entropy(k: f64) -> f64 {
    let k = k.max(0.0);
    k.sqrt().max(k * (0.5 * k).exp())
}

/// The scale function z -> eta(z) attached to a measure.
#[derive(Debug, Clone)]
pub struct EtaFunction {
    mu: CircleMeasure,
}

impl EtaFunction {
    pub fn new(mu: &CircleMeasure) -> EtaFunction {
        EtaFunction { mu: mu.clone() }
    }

    pub fn value(&self, z: Complex64) -> Result<f64> {
        Ok(eta_of_entropy(entropy(&self.mu, z)?))
    }
}

/// One grid point of the log-product diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct ProductRow {
    pub re_z: f64,
    pub im_z: f64,
    pub entropy: f64,
    pub product: f64,
    pub residual: f64,
    pub tail_bound: f64,
    #[serde(skip)]
    pub partial_logs: Vec<f64>,
}

/// Truncated log-product `sum_n log((1 - |z f_n(z)|^2)/(1 - |f_n(z)|^2))`
/// against the entropy.
///
/// Prescribed finite sequences terminate exactly (all later factors are
/// one, tail bound zero). Infinite families stop once a factor drops below
/// the term cutoff and report a geometric tail estimate.
pub fn entropy_product_row(
    mu: &CircleMeasure,
    f: &SchurSeries,
    a: &VerblunskySeq,
    z: Complex64,
    n_max: usize,
) -> Result<ProductRow> {
    if z.norm() > PRODUCT_RADIUS + 1e-12 {
        return Err(Error::OutsideWorkingDisk(PRODUCT_RADIUS, "entropy_product_row"));
    }
    let reference = entropy(mu, z)?;

    let origin = z.norm() < 1e-12;
    let support = a.support_len();
    let prescribed = a.provenance() == Provenance::Prescribed;
    let budget = if prescribed {
        n_max.min(support)
    } else {
        n_max.min(a.len())
    };

    let mut partial_logs = Vec::with_capacity(budget);
    let mut acc = 0.0f64;
    let mut cur = f.eval(z);
    let mut prev_sq = f64::NAN;
    let mut last_sq = f64::NAN;
    let mut exhausted = prescribed && budget >= support;

    for k in 0..budget {
        let fk = if origin { a.at(k) } else { cur };
        let fk_sq = fk.norm_sqr();
        if fk_sq >= 1.0 {
            return Err(Error::FinitelySupported {
                index: k,
                modulus: fk_sq.sqrt(),
            });
        }
        let term = ((1.0 - (z * fk).norm_sqr()) / (1.0 - fk_sq)).ln();
        acc += term;
        partial_logs.push(acc);
        prev_sq = last_sq;
        last_sq = fk_sq;

        if !prescribed && term.abs() < tol::TAIL_TERM_CUTOFF && k + 1 >= support {
            exhausted = true;
            break;
        }
        if !origin && k + 1 < budget {
            let ak = a.at(k);
            let denom = Complex64::new(1.0, 0.0) - ak.conj() * cur;
            if denom.norm() < 1e-140 {
                return Err(Error::SingularPoint {
                    z,
                    denom: denom.norm(),
                });
            }
            cur = (cur - ak) / (denom * z);
        }
    }

    let tail_bound = if exhausted {
        0.0
    } else {
        let ratio = if prev_sq.is_finite() && prev_sq > 0.0 {
            (last_sq / prev_sq).min(0.9)
        } else {
            0.5
        };
        let last = if last_sq.is_finite() { last_sq } else { 0.0 };
        tol::TAIL_SAFETY * last * ratio / (1.0 - ratio) / (1.0 - z.norm_sqr())
    };

    let product = partial_logs.last().copied().unwrap_or(0.0);
    Ok(ProductRow {
        re_z: z.re,
        im_z: z.im,
        entropy: reference,
        product,
        residual: (reference - product).abs(),
        tail_bound,
        partial_logs,
    })
}

/// Rows of the log-product diagnostic over a z grid, exportable as CSV
/// and JSON.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub rows: Vec<ProductRow>,
}

pub fn entropy_report(
    mu: &CircleMeasure,
    f: &SchurSeries,
    a: &VerblunskySeq,
    z_grid: &[Complex64],
    n_max: usize,
) -> Result<EntropyReport> {
    let rows = z_grid
        .iter()
        .map(|&z| entropy_product_row(mu, f, a, z, n_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport { rows })
}

impl EntropyReport {
    /// CSV with a fixed column order and 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "re_z,im_z,entropy,product,residual,tail_bound")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.re_z, r.im_z, r.entropy, r.product, r.residual, r.tail_bound
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// One step of the entropy chain:
/// `K(mu, z) = K(mu_1, z) + log((1 - |z f(z)|^2)/(1 - |f(z)|^2))`,
/// with mu_1 realized from the boundary values of the first iterate.
#[derive(Debug, Clone, Copy)]
pub struct ChainStep {
    pub total: f64,
    pub tail: f64,
    pub factor_log: f64,
    pub residual: f64,
}

pub fn entropy_chain_step(
    mu: &CircleMeasure,
    f: &SchurSeries,
    wall: &WallPolynomials,
    z: Complex64,
) -> Result<ChainStep> {
    if z.norm() > PRODUCT_RADIUS + 1e-12 {
        return Err(Error::OutsideWorkingDisk(PRODUCT_RADIUS, "entropy_chain_step"));
    }
    let total = entropy(mu, z)?;
    let f_z = f.eval(z);
    let mu1 = iterate_measure(mu, wall, 1)?;
    let f1_z = wall.iterate_from_function(1, z, f_z)?;
    let tail = iterate_entropy_from_weight(&mu1, f1_z, z)?;
    let factor_log = ((1.0 - (z * f_z).norm_sqr()) / (1.0 - f_z.norm_sqr())).ln();
    Ok(ChainStep {
        total,
        tail,
        factor_log,
        residual: (total - tail - factor_log).abs(),
    })
}

/// K(mu_n, z) <= K(mu, z) for every n, with mu_n realized from iterate
/// boundary values.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// K(mu_n, z) for n = 0..=n_max (outer) over the z grid (inner).
    pub tail_entropies: Vec<Vec<f64>>,
    pub worst_violation: f64,
    pub worst_pair: Option<(usize, Complex64)>,
}

pub fn entropy_monotonicity(
    mu: &CircleMeasure,
    f: &SchurSeries,
    wall: &WallPolynomials,
    z_grid: &[Complex64],
    n_max: usize,
) -> Result<MonotonicityReport> {
    let base: Vec<f64> = z_grid
        .iter()
        .map(|&z| entropy(mu, z))
        .collect::<Result<_>>()?;
    let mut tail_entropies = vec![base.clone()];
    let mut worst_violation = 0.0f64;
    let mut worst_pair = None;
    for n in 1..=n_max {
        let mu_n = iterate_measure(mu, wall, n)?;
        let mut row = Vec::with_capacity(z_grid.len());
        for (i, &z) in z_grid.iter().enumerate() {
            let fn_z = wall.iterate_from_function(n, z, f.eval(z))?;
            let k_n = iterate_entropy_from_weight(&mu_n, fn_z, z)?;
            let violation = k_n - base[i];
            if violation > worst_violation {
                worst_violation = violation;
                worst_pair = Some((n, z));
            }
            row.push(k_n);
        }
        tail_entropies.push(row);
    }
    Ok(MonotonicityReport {
        tail_entropies,
        worst_violation,
        worst_pair,
    })
}

/// K(1 - |f_n|^2, z) against K(mu, z); the weight entropy never exceeds
/// the measure entropy.
pub fn weight_entropy_bound(
    mu: &CircleMeasure,
    wall: &WallPolynomials,
    n: usize,
    z: Complex64,
) -> Result<(f64, f64)> {
    let weight = iterate_gap_weight(mu, wall, n)?;
    Ok((weight_entropy(&weight, z)?, entropy(mu, z)?))
}

/// Entropy invariance across the Aleksandrov-Clark family: the measure
/// with Schur function alpha f has the same entropy for every unimodular
/// alpha.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub alpha: Complex64,
    pub max_difference: f64,
}

pub fn clark_dual_invariance(
    mu: &CircleMeasure,
    z_grid: &[Complex64],
    alpha: Complex64,
) -> Result<InvarianceReport> {
    let rotated = clark_measure(mu, alpha)?;
    let mut max_difference = 0.0f64;
    for &z in z_grid {
        let k = entropy(mu, z)?;
        let k_rot = entropy(&rotated, z)?;
        max_difference = max_difference.max((k - k_rot).abs());
    }
    Ok(InvarianceReport {
        alpha,
        max_difference,
    })
}

/// Bernstein-Szego approximant at (n, z*): the measure with density
/// `(1 - |f_n(z*)|^2) / |phi_n*(xi) - xi conj(f_n(z*)) phi_n(xi)|^2`.
///
/// Its Schur iterates match those of mu at z* up to order n and vanish at
/// order n+1, and its entropy at z* splits off additively.
#[derive(Debug)]
pub struct BernsteinSzegoApprox {
    pub weight: CircleMeasure,
    pub mass_error: f64,
    pub iterate_match_error: f64,
    pub next_iterate_modulus: f64,
    pub additivity_error: f64,
}

pub fn bernstein_szego_approx(
    mu: &CircleMeasure,
    f: &SchurSeries,
    sys: &OpucSystem,
    n: usize,
    z_star: Complex64,
) -> Result<BernsteinSzegoApprox> {
    if z_star.norm() > PRODUCT_RADIUS + 1e-12 {
        return Err(Error::OutsideWorkingDisk(PRODUCT_RADIUS, "bernstein_szego_approx"));
    }
    let wall = sys.wall();
    let fn_star = wall.iterate_from_function(n, z_star, f.eval(z_star))?;
    if fn_star.norm() >= 1.0 - tol::UNIT_GAP {
        return Err(Error::FinitelySupported {
            index: n,
            modulus: fn_star.norm(),
        });
    }

    let m = mu.grid_size();
    let phi = sys.phi(n).clone();
    let phi_star = sys.phi_star(n).clone();
    let gap = 1.0 - fn_star.norm_sqr();
    // the recursion step phi_{n+1}* \propto phi_n* - z a_n phi_n carries the
    // new coefficient unconjugated; the measure below therefore has Schur
    // parameters (a_0, ..., a_{n-1}, f_n(z*), 0, 0, ...)
    let weight = CircleMeasure::from_closure(
        m,
        move |theta: f64| {
            let xi = Complex64::from_polar(1.0, theta);
            let denom = (phi_star.eval(xi) - xi * fn_star * phi.eval(xi)).norm_sqr();
            gap / denom
        },
        Vec::new(),
    )?;
    let mass_error = (weight.total_mass() - 1.0).abs();
    let weight = weight.normalize()?;

    // Schur iterates of the approximant at z*: match below n, vanish above
    let budget = n + 1 + tol::SERIES_RESERVE;
    let approx_moments = weight.moments(budget + 1)?;
    let f_hat = caratheodory_to_schur(&approx_moments)?;
    let out = schur_algorithm(&f_hat, n + 1)?.require_complete(n + 1)?;
    let mut iterate_match_error = 0.0f64;
    for k in 0..=n {
        let mine = wall.iterate_from_function(k, z_star, f.eval(z_star))?;
        let theirs = out.iterates[k].eval(z_star);
        iterate_match_error = iterate_match_error.max((mine - theirs).norm());
    }
    let next_iterate_modulus = out.iterates[n + 1].eval(z_star).norm();

    // additivity: K(mu, z*) = K(approximant, z*) + K(mu_{n+1}, z*)
    let total = entropy(mu, z_star)?;
    let head = entropy(&weight, z_star)?;
    let fn1 = wall.iterate_from_function(n + 1, z_star, f.eval(z_star))?;
    let gap_weight = iterate_gap_weight(mu, wall, n + 1)?;
    let tail = (1.0 - (z_star * fn1).norm_sqr()).ln() - gap_weight.poisson_log_density(z_star)?;
    let additivity_error = (total - head - tail).abs();

    Ok(BernsteinSzegoApprox {
        weight,
        mass_error,
        iterate_match_error,
        next_iterate_modulus,
        additivity_error,
    })
}

/// Ratios P(|f_n - f_n(z)|, z) / sqrt(K(mu, z)) over a (n, z) grid.
/// Points with K below 1e-10 are skipped as vacuous.
#[derive(Debug, Clone)]
pub struct OscillationReport {
    pub ratios: Vec<(usize, Complex64, f64)>,
    pub max_ratio: f64,
}

pub fn oscillation_bound(
    mu: &CircleMeasure,
    f: &SchurSeries,
    wall: &WallPolynomials,
    z_grid: &[Complex64],
    n_list: &[usize],
) -> Result<OscillationReport> {
    let m = mu.grid_size();
    let boundary = mu.boundary_schur()?;
    let mut ratios = Vec::new();
    let mut max_ratio = 0.0f64;
    for &n in n_list {
        // boundary samples of f_n
        let samples: Vec<Complex64> = (0..m)
            .map(|j| {
                wall.boundary_iterate(
                    n,
                    node_angle(m, j),
                    boundary.f[j],
                    boundary.one_minus_sq[j],
                )
                .map(|(v, _)| v)
            })
            .collect::<Result<_>>()?;
        for &z in z_grid {
            let k = entropy(mu, z)?;
            if k < 1e-10 {
                continue;
            }
            let fn_z = wall.iterate_from_function(n, z, f.eval(z))?;
            let mut num = 0.0;
            for (j, s) in samples.iter().enumerate() {
                num += (s - fn_z).norm() * poisson_kernel(z, node_angle(m, j));
            }
            num /= m as f64;
            let ratio = num / k.sqrt();
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            ratios.push((n, z, ratio));
        }
    }
    Ok(OscillationReport { ratios, max_ratio })
}

/// BMO-type characteristic of a real grid function against the eta scale:
/// max over the grid (where eta is above its floor) of
/// `P(|v - P(v,z)|, z) / eta(z)`.
pub fn bmo_eta_norm(
    v: &GridFunction,
    mu: &CircleMeasure,
    z_grid: &[Complex64],
) -> Result<f64> {
    let values = v.real()?;
    let m = values.len();
    if m != mu.grid_size() {
        return Err(Error::GridMismatch(m, mu.grid_size()));
    }
    let mut best: Option<f64> = None;
    for &z in z_grid {
        let k = entropy(mu, z)?;
        let eta = eta_of_entropy(k);
        if eta < tol::ETA_FLOOR {
            continue;
        }
        let mut mean = 0.0;
        for (j, &val) in values.iter().enumerate() {
            mean += val * poisson_kernel(z, node_angle(m, j));
        }
        mean /= m as f64;
        let mut dev = 0.0;
        for (j, &val) in values.iter().enumerate() {
            dev += (val - mean).abs() * poisson_kernel(z, node_angle(m, j));
        }
        dev /= m as f64;
        let ratio = dev / eta;
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or(Error::UndefinedNorm)
}
