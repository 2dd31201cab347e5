//! Schrödinger-bridge solver for the diffusion generated by kappa = hbar/m.
//!
//! Given two marginals rho0 and rho1 a horizon tau apart, the solver finds
//! the pair (phi at 0, phi_hat at tau) satisfying the coupled system
//!
//!   rho0 = phi  .  K[phi_hat]          (backward image at 0)
//!   rho1 = phi_hat . K^T[phi]          (forward image at tau)
//!
//! by Sinkhorn-style alternating projections in the linear domain. The
//! discrete kernel is row-normalized so that it preserves constants exactly
//! (and its adjoint preserves mass exactly); that makes the zero-horizon
//! limit an exact identity and the pure-diffusion bridge an exact fixed
//! point of the iteration.

use crate::error::{CoreError, Result};
use crate::grid::{fft, ifft_field, ComplexField, Grid1D, GridMode, RealField};
use crate::state::{BridgePair, HydroState};

/// Values below this are treated as an exact zero when dividing marginals
/// by kernel images.
const DIV_FLOOR: f64 = 1e-300;

/// Fraction of spectral mass allowed above the anti-heat cutoff.
const ANTI_HEAT_NOISE: f64 = 1e-12;

/// Dense row-normalized heat kernel on a grid. Entries are
/// h_ij = exp(-(x_i - x_j)^2 / (2 kappa dtau)); `apply` divides each row by
/// its quadrature sum (so a constant field is a fixed point) and
/// `apply_adjoint` is the adjoint under the quadrature inner product (so
/// total mass is preserved bit for bit up to roundoff).
pub struct HeatKernel {
    grid: Grid1D,
    identity: bool,
    weights: Vec<f64>,
    kernel: Vec<f64>,
    row_sums: Vec<f64>,
}

impl HeatKernel {
    pub fn new(grid: &Grid1D, dtau: f64, hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(mass > 0.0) || !hbar.is_finite() || !mass.is_finite() {
            return Err(CoreError::InvalidParameter(
                "hbar and mass must be positive and finite".into(),
            ));
        }
        if !(dtau >= 0.0) || !dtau.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "dtau must be nonnegative and finite, got {dtau}"
            )));
        }
        let weights = grid.quadrature_weights()?;
        if dtau == 0.0 {
            return Ok(HeatKernel {
                grid: grid.clone(),
                identity: true,
                weights,
                kernel: Vec::new(),
                row_sums: Vec::new(),
            });
        }
        let n = grid.len();
        let variance = hbar / mass * dtau;
        let length = grid.length();
        let periodic = grid.mode() == GridMode::Periodic;
        let points = grid.points();
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut d = points[i] - points[j];
                if periodic {
                    // Minimum-image wrap; the neglected images are
                    // exp(-L^2/8 kappa dtau) down, far below roundoff for
                    // any domain wide enough to hold the marginals.
                    d -= length * (d / length).round();
                }
                kernel[i * n + j] = (-d * d / (2.0 * variance)).exp();
            }
        }
        let mut row_sums = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += kernel[i * n + j] * weights[j];
            }
            if !(acc > 0.0) {
                return Err(CoreError::InvalidParameter(format!(
                    "kernel row {i} has zero quadrature mass; dtau = {dtau} is \
                     unresolvable on this grid"
                )));
            }
            row_sums[i] = acc;
        }
        Ok(HeatKernel { grid: grid.clone(), identity: false, weights, kernel, row_sums })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Constant-preserving application: (Kf)_i = sum_j h_ij w_j f_j / r_i.
    pub fn apply(&self, f: &RealField) -> Result<RealField> {
        if f.grid() != &self.grid {
            return Err(CoreError::GridMismatch);
        }
        if self.identity {
            return Ok(f.clone());
        }
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * self.weights[j] * f.values()[j];
            }
            out[i] = acc / self.row_sums[i];
        }
        RealField::new(self.grid.clone(), out)
    }

    /// Mass-preserving adjoint: (K^T g)_j = sum_i h_ij w_i g_i / r_i.
    pub fn apply_adjoint(&self, g: &RealField) -> Result<RealField> {
        if g.grid() != &self.grid {
            return Err(CoreError::GridMismatch);
        }
        if self.identity {
            return Ok(g.clone());
        }
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let scale = self.weights[i] * g.values()[i] / self.row_sums[i];
            if scale != 0.0 {
                for (o, &h) in out.iter_mut().zip(row) {
                    *o += h * scale;
                }
            }
        }
        RealField::new(self.grid.clone(), out)
    }
}

/// Two marginals, a horizon, and the physical constants fixing the
/// diffusion rate kappa = hbar / m.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProblem {
    pub rho0: RealField,
    pub rho1: RealField,
    pub tau: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl BridgeProblem {
    pub fn new(rho0: RealField, rho1: RealField, tau: f64, hbar: f64, mass: f64) -> Result<Self> {
        if rho0.grid() != rho1.grid() {
            return Err(CoreError::GridMismatch);
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        for rho in [&rho0, &rho1] {
            let min = rho.values().iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -1e-12 * rho.max_abs() {
                return Err(CoreError::NegativeDensity(min));
            }
            let mass_total = rho.integrate()?;
            if (mass_total - 1.0).abs() > 1e-8 {
                return Err(CoreError::Unnormalized(mass_total));
            }
        }
        let rho0 = rho0.map(|v| v.max(0.0));
        let rho1 = rho1.map(|v| v.max(0.0));
        Ok(BridgeProblem { rho0, rho1, tau, hbar, mass })
    }
}

/// Converged factor pair plus iteration diagnostics. `defect_history` holds
/// the sup-norm violation of the terminal marginal after each sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSolution {
    pub phi0: RealField,
    pub phi_hat_tau: RealField,
    pub iterations: usize,
    pub marginal_residual: f64,
    pub defect_history: Vec<f64>,
    tau: f64,
    hbar: f64,
    mass: f64,
}

fn guarded_div(num: &RealField, den: &RealField) -> Result<RealField> {
    let grid = num.grid().clone();
    let mut out = vec![0.0; grid.len()];
    for (i, (&a, &b)) in num.values().iter().zip(den.values()).enumerate() {
        out[i] = if b.abs() >= DIV_FLOOR {
            a / b
        } else if a.abs() < DIV_FLOOR {
            0.0
        } else {
            return Err(CoreError::InfeasibleBridge { x: grid.point(i) });
        };
    }
    RealField::new(grid, out)
}

/// Alternating projections for the bridge system. Each sweep enforces the
/// initial marginal exactly and measures the terminal defect before
/// correcting it, so a vanishing defect certifies both constraints. Ends
/// with the symmetric gauge: integral of phi0 equals integral of phi_hat.
pub fn solve_schrodinger_system(
    problem: &BridgeProblem,
    tol: f64,
    max_iter: usize,
) -> Result<BridgeSolution> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(CoreError::InvalidParameter("max_iter must be at least 1".into()));
    }
    let grid = problem.rho0.grid();
    let kernel = HeatKernel::new(grid, problem.tau, problem.hbar, problem.mass)?;
    let mut phi_hat = RealField::from_fn(grid, |_| 1.0);
    let mut history = Vec::new();
    for sweep in 1..=max_iter {
        let phi0 = guarded_div(&problem.rho0, &kernel.apply(&phi_hat)?)?;
        let image = kernel.apply_adjoint(&phi0)?;
        let defect = image
            .values()
            .iter()
            .zip(phi_hat.values())
            .zip(problem.rho1.values())
            .map(|((&im, &ph), &target)| (im * ph - target).abs())
            .fold(0.0f64, f64::max);
        history.push(defect);
        if defect <= tol {
            let a = phi0.integrate()?;
            let b = phi_hat.integrate()?;
            let c = (b / a).sqrt();
            return Ok(BridgeSolution {
                phi0: phi0.scaled(c),
                phi_hat_tau: phi_hat.scaled(1.0 / c),
                iterations: sweep,
                marginal_residual: defect,
                defect_history: history,
                tau: problem.tau,
                hbar: problem.hbar,
                mass: problem.mass,
            });
        }
        phi_hat = guarded_div(&problem.rho1, &image)?;
    }
    Err(CoreError::NonConvergence {
        iterations: max_iter,
        residual: *history.last().expect("at least one sweep ran"),
    })
}

impl BridgeSolution {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Factors and marginal at an interior time: phi runs forward from 0
    /// through the mass-preserving kernel, phi_hat runs backward from tau
    /// through the constant-preserving one.
    pub fn interior(&self, tau_prime: f64) -> Result<(BridgePair, RealField)> {
        if !(0.0..=self.tau).contains(&tau_prime) {
            return Err(CoreError::InvalidParameter(format!(
                "tau_prime = {tau_prime} outside [0, {}]",
                self.tau
            )));
        }
        let grid = self.phi0.grid();
        let fwd = HeatKernel::new(grid, tau_prime, self.hbar, self.mass)?;
        let bwd = HeatKernel::new(grid, self.tau - tau_prime, self.hbar, self.mass)?;
        let phi = fwd.apply_adjoint(&self.phi0)?.map(|v| v.max(0.0));
        let phi_hat = bwd.apply(&self.phi_hat_tau)?.map(|v| v.max(0.0));
        let pair = BridgePair::new(phi, phi_hat, self.hbar, self.mass)?;
        let rho = pair.density()?;
        Ok((pair, rho))
    }
}

/// One spectral step of the pair dynamics on a periodic grid: the forward
/// factor diffuses, the backward factor anti-diffuses. Anti-diffusion is
/// only meaningful for spectra that have already decayed, so modes above
/// two thirds of the Nyquist wavenumber must carry less than 1e-12 of the
/// spectral mass; they are then discarded before amplification, along with
/// coefficients below 1e-13 of the spectral peak, which double precision
/// cannot distinguish from zero and which amplification would otherwise
/// promote into fake signal.
pub fn tau_step_pair(pair: &BridgePair, dtau: f64) -> Result<BridgePair> {
    let grid = pair.grid();
    if grid.mode() != GridMode::Periodic {
        return Err(CoreError::WrongGridMode {
            required: GridMode::Periodic,
            got: grid.mode(),
        });
    }
    if !(dtau >= 0.0) || !dtau.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "dtau must be nonnegative and finite, got {dtau}"
        )));
    }
    let kappa = pair.hbar() / pair.mass();
    let k = grid.wavenumbers()?;
    let k_cut = 2.0 / 3.0 * grid.max_wavenumber()?;

    let heat = |f: &RealField, sign: f64| -> Result<RealField> {
        let cells = f
            .values()
            .iter()
            .map(|&v| rustfft::num_complex::Complex64::new(v, 0.0))
            .collect();
        let mut spec = fft(&ComplexField::new(grid.clone(), cells)?)?;
        if sign > 0.0 {
            let total: f64 = spec.values().iter().map(|c| c.norm_sqr()).sum();
            let high: f64 = spec
                .values()
                .iter()
                .enumerate()
                .filter(|(j, _)| k[*j].abs() > k_cut)
                .map(|(_, c)| c.norm_sqr())
                .sum();
            if total > 0.0 && high / total > ANTI_HEAT_NOISE {
                return Err(CoreError::AntiHeatUnstable { fraction: high / total });
            }
        }
        let spectral_peak = spec.values().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let spectral_floor = 1e-13 * spectral_peak;
        for (j, c) in spec.values_mut().iter_mut().enumerate() {
            if sign > 0.0 && (k[j].abs() > k_cut || c.norm() < spectral_floor) {
                *c = Default::default();
            } else {
                let exponent = sign * kappa * k[j] * k[j] * dtau / 2.0;
                *c *= exponent.exp();
            }
        }
        let back = ifft_field(&spec)?;
        if back.values().iter().any(|c| !c.re.is_finite()) {
            return Err(CoreError::AntiHeatUnstable { fraction: f64::INFINITY });
        }
        let peak = back.values().iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
        let floor = -1e-6 * peak;
        let mut vals = Vec::with_capacity(grid.len());
        for c in back.values() {
            if c.re < floor {
                return Err(CoreError::AntiHeatUnstable { fraction: c.re.abs() / peak });
            }
            vals.push(c.re.max(0.0));
        }
        RealField::new(grid.clone(), vals)
    };

    let phi = heat(pair.phi(), -1.0)?;
    let phi_hat = heat(pair.phi_hat(), 1.0)?;
    BridgePair::new(phi, phi_hat, pair.hbar(), pair.mass())
}

/// Assemble the pinning problem: keep the state's density as the initial
/// marginal and place a narrow Gaussian of variance (width_floor x the
/// state's position variance) at the measured point x_m.
pub fn collapse_bridge(
    state0: &HydroState,
    x_m: f64,
    width_floor: f64,
    tau: f64,
) -> Result<BridgeProblem> {
    if !x_m.is_finite() {
        return Err(CoreError::InvalidParameter("x_m must be finite".into()));
    }
    if !(width_floor > 0.0 && width_floor < 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "width_floor must lie in (0, 1), got {width_floor}"
        )));
    }
    let sigma0 = crate::functionals::position_variance(state0)?;
    let var = sigma0 * width_floor;
    let grid = state0.grid();
    if var < grid.dx() * grid.dx() {
        return Err(CoreError::InvalidParameter(format!(
            "terminal variance {var:.3e} is below the grid resolution; refine the \
             grid or raise width_floor"
        )));
    }
    let rho1 = RealField::from_fn(grid, |x| {
        let d = x - x_m;
        (-d * d / (2.0 * var)).exp()
    })
    .normalized()?;
    BridgeProblem::new(state0.rho().clone(), rho1, tau, state0.hbar(), state0.mass())
}
