//! Uniform grids on the unit circle, FFT plumbing, Poisson and Herglotz
//! kernels, and the conjugate-function multiplier.

use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 4096;

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

pub fn check_grid_size(m: usize) -> Result<usize> {
    if m >= 16 && m.is_power_of_two() {
        Ok(m)
    } else {
        Err(Error::BadGridSize(m))
    }
}

/// Angle of the j-th grid node, in [0, 2 pi).
#[inline]
pub fn node_angle(m: usize, j: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / m as f64
}

/// The j-th grid node exp(2 pi i j / m).
#[inline]
pub fn node(m: usize, j: usize) -> Complex64 {
    Complex64::from_polar(1.0, node_angle(m, j))
}

/// Wraps an angle into [0, 2 pi).
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t < 0.0 {
        t += two_pi;
    }
    t
}

/// Poisson kernel (1 - |z|^2) / |1 - conj(xi) z|^2 at xi = exp(i theta).
#[inline]
pub fn poisson_kernel(z: Complex64, theta: f64) -> f64 {
    let xi = Complex64::from_polar(1.0, theta);
    let denom = (Complex64::new(1.0, 0.0) - xi.conj() * z).norm_sqr();
    (1.0 - z.norm_sqr()) / denom
}

/// Herglotz kernel (1 + conj(xi) z) / (1 - conj(xi) z); its real part is the
/// Poisson kernel.
#[inline]
pub fn herglotz_kernel(z: Complex64, theta: f64) -> Complex64 {
    let xi = Complex64::from_polar(1.0, theta);
    let q = xi.conj() * z;
    (Complex64::new(1.0, 0.0) + q) / (Complex64::new(1.0, 0.0) - q)
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let fft = {
        let mut planner = PLANNER.lock().unwrap();
        if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        }
    };
    fft.process(buf);
}

/// Forward DFT bins X_k = sum_j v_j exp(-2 pi i j k / m), unnormalized.
pub fn dft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    buf
}

/// Inverse DFT, normalized by 1/m.
pub fn idft(bins: &[Complex64]) -> Vec<Complex64> {
    let mut buf = bins.to_vec();
    fft_in_place(&mut buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Function sampled on the uniform grid xi_j = exp(2 pi i j / m).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        Ok(GridFunction { samples })
    }

    pub fn from_real(samples: &[f64]) -> Result<Self> {
        GridFunction::new(samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid_size(m)?;
        Ok(GridFunction {
            samples: (0..m).map(|j| f(node_angle(m, j))).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn value(&self, j: usize) -> Complex64 {
        self.samples[j]
    }

    /// Real parts, provided the imaginary parts are negligible.
    pub fn real(&self) -> Result<Vec<f64>> {
        let worst = self
            .samples
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        let scale = self
            .samples
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(1.0);
        if worst > 1e-10 * scale {
            return Err(Error::ComplexInput(worst));
        }
        Ok(self.samples.iter().map(|v| v.re).collect())
    }

    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.samples.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Trapezoid quadrature of self times a kernel, against normalized
    /// Lebesgue measure.
    pub fn integrate(&self, kernel: impl Fn(f64) -> f64) -> Complex64 {
        let m = self.samples.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in self.samples.iter().enumerate() {
            acc += v * kernel(node_angle(m, j));
        }
        acc / m as f64
    }
}

/// Harmonic conjugate by the Fourier multiplier -i sign(k).
///
/// The input must be real-valued; the output has zero mean and the conjugate
/// of a constant is identically zero.
pub fn harmonic_conjugate(u: &GridFunction) -> Result<GridFunction> {
    let m = u.len();
    let real = u.real()?;
    let mut bins = dft(&real.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    bins[0] = Complex64::new(0.0, 0.0);
    let half = m / 2;
    for (k, b) in bins.iter_mut().enumerate().skip(1) {
        if k < half {
            *b *= Complex64::new(0.0, -1.0);
        } else if k == half {
            *b = Complex64::new(0.0, 0.0);
        } else {
            *b *= Complex64::new(0.0, 1.0);
        }
    }
    let out = idft(&bins);
    GridFunction::new(out.iter().map(|v| Complex64::new(v.re, 0.0)).collect())
}

/// Half-spectrum Fourier table of a real grid function: coefficients
/// c_k = int v(xi) exp(-ik theta) dm for 0 <= k <= m/2.
///
/// Supports spectrally accurate Poisson extensions, boundary conjugate
/// series, and the analytic completion v + i Qv evaluated off-grid.
#[derive(Debug, Clone)]
pub struct FourierTable {
    m: usize,
    coeffs: Vec<Complex64>,
}

impl FourierTable {
    pub fn from_real_samples(samples: &[f64]) -> Result<Self> {
        let m = check_grid_size(samples.len())?;
        let bins = dft(&samples.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
        let coeffs = bins[..=m / 2]
            .iter()
            .map(|b| b / m as f64)
            .collect();
        Ok(FourierTable { m, coeffs })
    }

    /// Builds the table directly from known coefficients c_0..c_K.
    pub fn from_coeffs(m: usize, mut coeffs: Vec<Complex64>) -> Result<Self> {
        check_grid_size(m)?;
        coeffs.truncate(m / 2 + 1);
        Ok(FourierTable { m, coeffs })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    /// Poisson extension at |z| < 1 via the coefficient series.
    pub fn poisson(&self, z: Complex64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 1..self.coeffs.len() {
            zk *= z;
            if zk.norm_sqr() < 1e-280 {
                break;
            }
            acc += self.coeffs[k] * zk;
        }
        self.coeff(0).re + 2.0 * acc.re
    }

    /// Analytic completion F(z) = c_0 + 2 sum_{k>=1} c_k z^k, whose real
    /// part extends the sampled function harmonically.
    pub fn analytic_completion(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 1..self.coeffs.len() {
            zk *= z;
            if zk.norm_sqr() < 1e-280 {
                break;
            }
            acc += self.coeffs[k] * zk;
        }
        self.coeff(0) + 2.0 * acc
    }

    /// Boundary value of the conjugate series at an arbitrary angle.
    pub fn conjugate_at(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.coeffs.len() {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (self.coeffs[k] * e).im;
        }
        acc
    }

    /// Boundary value of the truncated Fourier series at an arbitrary angle.
    pub fn series_at(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.coeffs.len() {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            acc += 2.0 * (self.coeffs[k] * e).re;
        }
        self.coeff(0).re + acc
    }
}
