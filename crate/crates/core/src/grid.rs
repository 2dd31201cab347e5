//! Uniform 1-D grids with two discretization modes.
//!
//! Closed grids include both endpoints and use composite Simpson quadrature
//! with local finite-difference derivatives. Periodic grids exclude the right
//! endpoint and use rectangle quadrature with spectral (FFT) derivatives;
//! their size must be a power of two so the transforms stay exact and fast.

use crate::error::{CoreError, Result};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Closed,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    mode: GridMode,
}

impl Grid1D {
    pub fn closed(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(CoreError::BadDomain { x_min, x_max });
        }
        if n < 2 {
            return Err(CoreError::GridTooSmall { needed: 2, got: n });
        }
        Ok(Grid1D { x_min, x_max, n, mode: GridMode::Closed })
    }

    pub fn periodic(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(CoreError::BadDomain { x_min, x_max });
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(CoreError::BadPeriodicSize(n));
        }
        Ok(Grid1D { x_min, x_max, n, mode: GridMode::Periodic })
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Domain length used by the periodic wrap; for closed grids this is the
    /// plain interval length.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        match self.mode {
            GridMode::Closed => (self.x_max - self.x_min) / (self.n - 1) as f64,
            GridMode::Periodic => (self.x_max - self.x_min) / self.n as f64,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Quadrature weights. Closed mode: composite Simpson, with a 3/8 block on
    /// the last three intervals when the interval count is odd. Periodic mode:
    /// uniform dx (the trapezoid rule on a ring). All weights are positive, so
    /// quadrature of a nonnegative field is nonnegative.
    pub fn quadrature_weights(&self) -> Result<Vec<f64>> {
        let dx = self.dx();
        match self.mode {
            GridMode::Periodic => Ok(vec![dx; self.n]),
            GridMode::Closed => {
                if self.n < 3 {
                    return Err(CoreError::GridTooSmall { needed: 3, got: self.n });
                }
                let intervals = self.n - 1;
                let mut w = vec![0.0; self.n];
                // Simpson block over the leading even count of intervals.
                let simpson_intervals = if intervals % 2 == 0 { intervals } else { intervals - 3 };
                if simpson_intervals > 0 {
                    w[0] += dx / 3.0;
                    w[simpson_intervals] += dx / 3.0;
                    for i in 1..simpson_intervals {
                        w[i] += if i % 2 == 1 { 4.0 * dx / 3.0 } else { 2.0 * dx / 3.0 };
                    }
                }
                if intervals % 2 == 1 {
                    // 3/8 rule on the trailing three intervals.
                    let j = simpson_intervals;
                    w[j] += 3.0 * dx / 8.0;
                    w[j + 1] += 9.0 * dx / 8.0;
                    w[j + 2] += 9.0 * dx / 8.0;
                    w[j + 3] += 3.0 * dx / 8.0;
                }
                Ok(w)
            }
        }
    }

    /// Angular wavenumbers in FFT bin order (DC, positive, Nyquist, negative).
    pub fn wavenumbers(&self) -> Result<Vec<f64>> {
        if self.mode != GridMode::Periodic {
            return Err(CoreError::WrongGridMode {
                required: GridMode::Periodic,
                got: self.mode,
            });
        }
        let l = self.length();
        let n = self.n as i64;
        Ok((0..n)
            .map(|j| {
                let j = if j <= n / 2 { j } else { j - n };
                2.0 * std::f64::consts::PI * j as f64 / l
            })
            .collect())
    }

    pub fn max_wavenumber(&self) -> Result<f64> {
        Ok(std::f64::consts::PI * self.n as f64 / self.length())
    }
}

/// Domain wide enough to make Gaussian truncation error negligible:
/// ten standard deviations beyond the extreme centers.
pub fn default_span(center_min: f64, center_max: f64, max_std: f64) -> (f64, f64) {
    (center_min - 10.0 * max_std, center_max + 10.0 * max_std)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::GridMismatch);
        }
        Ok(RealField { grid, values })
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        RealField { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        RealField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CoreError::GridMismatch);
        }
        Ok(RealField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Quadrature of the field over the domain.
    pub fn integrate(&self) -> Result<f64> {
        let w = self.grid.quadrature_weights()?;
        Ok(self.values.iter().zip(&w).map(|(&v, &wi)| v * wi).sum())
    }

    /// Rescale so the field integrates to exactly one.
    pub fn normalized(&self) -> Result<RealField> {
        let mass = self.integrate()?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(CoreError::ZeroMarginal);
        }
        Ok(self.scaled(1.0 / mass))
    }

    /// First derivative. Closed mode: second-order central differences with
    /// one-sided second-order stencils at the endpoints. Periodic mode:
    /// spectral derivative (the Nyquist mode is dropped to keep the result
    /// real and odd-symmetric).
    pub fn gradient(&self) -> Result<RealField> {
        match self.grid.mode {
            GridMode::Closed => {
                let n = self.grid.len();
                if n < 3 {
                    return Err(CoreError::GridTooSmall { needed: 3, got: n });
                }
                let dx = self.grid.dx();
                let v = &self.values;
                let mut out = vec![0.0; n];
                out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
                out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
                for i in 1..n - 1 {
                    out[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
                }
                Ok(RealField { grid: self.grid.clone(), values: out })
            }
            GridMode::Periodic => {
                let mut spec = fft_real(self)?;
                let k = self.grid.wavenumbers()?;
                let n = self.grid.len();
                for (j, c) in spec.iter_mut().enumerate() {
                    *c *= Complex64::new(0.0, k[j]);
                }
                spec[n / 2] = Complex64::new(0.0, 0.0);
                let out = ifft(&self.grid, &spec)?;
                Ok(RealField {
                    grid: self.grid.clone(),
                    values: out.iter().map(|c| c.re).collect(),
                })
            }
        }
    }

    /// Second derivative: three-point stencil (closed) or spectral
    /// multiplication by -k^2 (periodic).
    pub fn second_derivative(&self) -> Result<RealField> {
        match self.grid.mode {
            GridMode::Closed => {
                let n = self.grid.len();
                if n < 4 {
                    return Err(CoreError::GridTooSmall { needed: 4, got: n });
                }
                let dx2 = self.grid.dx() * self.grid.dx();
                let v = &self.values;
                let mut out = vec![0.0; n];
                out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dx2;
                out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / dx2;
                for i in 1..n - 1 {
                    out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / dx2;
                }
                Ok(RealField { grid: self.grid.clone(), values: out })
            }
            GridMode::Periodic => {
                let mut spec = fft_real(self)?;
                let k = self.grid.wavenumbers()?;
                for (j, c) in spec.iter_mut().enumerate() {
                    *c *= -k[j] * k[j];
                }
                let out = ifft(&self.grid, &spec)?;
                Ok(RealField {
                    grid: self.grid.clone(),
                    values: out.iter().map(|c| c.re).collect(),
                })
            }
        }
    }
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::GridMismatch);
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        ComplexField { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conjugated(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn modulus_squared(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// L2 norm under the grid quadrature.
    pub fn norm(&self) -> Result<f64> {
        Ok(self.modulus_squared().integrate()?.sqrt())
    }

    /// L2 distance to another field on the same grid.
    pub fn l2_distance(&self, other: &ComplexField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(CoreError::GridMismatch);
        }
        let diff = RealField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| (a - b).norm_sqr())
                .collect(),
        };
        Ok(diff.integrate()?.sqrt())
    }

    pub fn normalized(&self) -> Result<ComplexField> {
        let norm = self.norm()?;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(CoreError::ZeroMarginal);
        }
        let inv = 1.0 / norm;
        Ok(self.map(|c| c * inv))
    }

    /// Spectral first derivative on a periodic grid.
    pub fn spectral_gradient(&self) -> Result<ComplexField> {
        let mut spec = fft(self)?;
        let k = self.grid.wavenumbers()?;
        let n = self.grid.len();
        for (j, c) in spec.values.iter_mut().enumerate() {
            *c *= Complex64::new(0.0, k[j]);
        }
        spec.values[n / 2] = Complex64::new(0.0, 0.0);
        ifft_field(&spec)
    }
}

fn run_fft(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    fft.process(values);
    let scale = 1.0 / (values.len() as f64).sqrt();
    for v in values.iter_mut() {
        *v *= scale;
    }
}

fn check_periodic(grid: &Grid1D) -> Result<()> {
    if grid.mode() != GridMode::Periodic {
        return Err(CoreError::WrongGridMode {
            required: GridMode::Periodic,
            got: grid.mode(),
        });
    }
    Ok(())
}

/// Unitary DFT (1/sqrt(n) both directions) of a complex field. Coefficients
/// come back in FFT bin order matching `Grid1D::wavenumbers`.
pub fn fft(field: &ComplexField) -> Result<ComplexField> {
    check_periodic(field.grid())?;
    let mut values = field.values().to_vec();
    run_fft(&mut values, false);
    Ok(ComplexField { grid: field.grid.clone(), values })
}

/// Unitary inverse DFT; exact inverse of `fft` up to roundoff.
pub fn ifft_field(field: &ComplexField) -> Result<ComplexField> {
    check_periodic(field.grid())?;
    let mut values = field.values().to_vec();
    run_fft(&mut values, true);
    Ok(ComplexField { grid: field.grid.clone(), values })
}

fn fft_real(field: &RealField) -> Result<Vec<Complex64>> {
    check_periodic(field.grid())?;
    let mut values: Vec<Complex64> =
        field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    run_fft(&mut values, false);
    Ok(values)
}

fn ifft(grid: &Grid1D, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
    check_periodic(grid)?;
    let mut values = spectrum.to_vec();
    run_fft(&mut values, true);
    Ok(values)
}

/// Fourth-order local stencils used where spectral differentiation would be
/// contaminated by out-of-band noise (e.g. phases recovered from unwrapping).
/// Works on either grid mode; near the ends it falls back to second order.
pub(crate) fn gradient_order4(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        return out;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx);
    out[1] = (values[2] - values[0]) / (2.0 * dx);
    out[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * dx);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dx);
    for i in 2..n - 2 {
        out[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2])
            / (12.0 * dx);
    }
    out
}

pub(crate) fn second_derivative_order4(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let dx2 = dx * dx;
    let mut out = vec![0.0; n];
    if n < 5 {
        return out;
    }
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / dx2;
    out[1] = (values[0] - 2.0 * values[1] + values[2]) / dx2;
    out[n - 2] = (values[n - 3] - 2.0 * values[n - 2] + values[n - 1]) / dx2;
    out[n - 1] =
        (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4]) / dx2;
    for i in 2..n - 2 {
        out[i] = (-values[i - 2] + 16.0 * values[i - 1] - 30.0 * values[i]
            + 16.0 * values[i + 1]
            - values[i + 2])
            / (12.0 * dx2);
    }
    out
}
