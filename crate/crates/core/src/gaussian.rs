//! Closed-form Gaussian references.
//!
//! Everything here is exact arithmetic on a handful of scalars, independent
//! of grids and quadrature, so these routines double as oracles for the
//! discretized machinery: the spreading free packet, interior width profiles
//! of Gaussian-to-Gaussian diffusion bridges, the inverse problem for the
//! gauge parameter alpha, the collapse (pinning) profile, and an exact
//! two-flow engine that advances a Gaussian state under either the unitary
//! time step or the bridge tau step.

use crate::error::{CoreError, Result};
use crate::grid::{ComplexField, Grid1D, RealField};
use crate::state::HydroState;
use rustfft::num_complex::Complex64;

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Free Gaussian packet, parametrized by its initial position variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub sigma0: f64,
    pub center: f64,
    pub time: f64,
    pub hbar: f64,
    pub mass: f64,
}

/// Position variance of a free packet after time t:
/// sigma0 (1 + (hbar t / 2 m sigma0)^2).
pub fn packet_width(sigma0: f64, time: f64, hbar: f64, mass: f64) -> f64 {
    let gamma = hbar * time / (2.0 * mass * sigma0);
    sigma0 * (1.0 + gamma * gamma)
}

impl GaussianPacket {
    fn check(&self) -> Result<()> {
        require_positive("sigma0", self.sigma0)?;
        require_positive("hbar", self.hbar)?;
        require_positive("mass", self.mass)?;
        if !self.time.is_finite() || !self.center.is_finite() {
            return Err(CoreError::InvalidParameter(
                "packet time and center must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Dimensionless spreading parameter gamma = hbar t / (2 m sigma0).
    pub fn gamma(&self) -> f64 {
        self.hbar * self.time / (2.0 * self.mass * self.sigma0)
    }

    pub fn width_variance(&self) -> f64 {
        packet_width(self.sigma0, self.time, self.hbar, self.mass)
    }

    /// psi(x, t) = (2 pi sigma0)^(-1/4) z^(-1/2) exp(-(x-c)^2 / (4 sigma0 z))
    /// with z = 1 + i gamma. The z^(-1/2) prefactor carries the geometric
    /// phase; without it the L2 invariants drift at first order in gamma.
    pub fn wavefunction(&self, grid: &Grid1D) -> Result<ComplexField> {
        self.check()?;
        let z = Complex64::new(1.0, self.gamma());
        let amp = (2.0 * std::f64::consts::PI * self.sigma0).powf(-0.25) / z.sqrt();
        let denom = 4.0 * self.sigma0 * z;
        Ok(ComplexField::from_fn(grid, |x| {
            let d = x - self.center;
            amp * (-(d * d) / denom).exp()
        }))
    }

    /// The same packet as (rho, s): rho = N(center, sigma0 a) and
    /// s = hbar [ gamma (x-c)^2 / (4 sigma0 a) - arctan(gamma) / 2 ].
    pub fn state(&self, grid: &Grid1D) -> Result<HydroState> {
        self.check()?;
        let gamma = self.gamma();
        let a = 1.0 + gamma * gamma;
        let var = self.sigma0 * a;
        let rho = RealField::from_fn(grid, |x| {
            let d = x - self.center;
            (-(d * d) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
        })
        .normalized()?;
        let quad = self.hbar * gamma / (4.0 * self.sigma0 * a);
        let gouy = -0.5 * self.hbar * gamma.atan();
        let s = RealField::from_fn(grid, |x| {
            let d = x - self.center;
            quad * d * d + gouy
        });
        HydroState::new(rho, s, self.hbar, self.mass)
    }
}

/// Gaussian-to-Gaussian diffusion bridge described by the initial variance,
/// the horizon, and the gauge parameter alpha of the drift split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBridgeSpec {
    pub sigma0: f64,
    pub tau: f64,
    pub alpha_param: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl GaussianBridgeSpec {
    fn check(&self) -> Result<()> {
        require_positive("sigma0", self.sigma0)?;
        require_positive("tau", self.tau)?;
        require_positive("hbar", self.hbar)?;
        require_positive("mass", self.mass)?;
        if self.alpha_param == 0.0 || !self.alpha_param.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "alpha_param must be finite and nonzero, got {}",
                self.alpha_param
            )));
        }
        Ok(())
    }

    /// Interior variance
    /// sigma0 (1 + (1/alpha) u') (1 - (1 - 1/alpha) u'),
    /// u' = (hbar/m) tau' / sigma0. Fails if either linear factor is
    /// nonpositive at tau', i.e. the profile pinched off earlier.
    pub fn width_variance(&self, tau_prime: f64) -> Result<f64> {
        self.check()?;
        if !(0.0..=self.tau).contains(&tau_prime) {
            return Err(CoreError::InvalidParameter(format!(
                "tau_prime = {tau_prime} outside [0, {}]",
                self.tau
            )));
        }
        let u = 1.0 / self.alpha_param;
        let scaled = (self.hbar / self.mass) * tau_prime / self.sigma0;
        let f1 = 1.0 + u * scaled;
        let f2 = 1.0 - (1.0 - u) * scaled;
        if !(f1 > 0.0) || !(f2 > 0.0) {
            return Err(CoreError::NoValidRoot);
        }
        Ok(self.sigma0 * f1 * f2)
    }

    /// Normalized interior marginal.
    pub fn density(&self, grid: &Grid1D, tau_prime: f64) -> Result<RealField> {
        let var = self.width_variance(tau_prime)?;
        RealField::from_fn(grid, |x| {
            (-(x * x) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
        })
        .normalized()
    }
}

/// Solve for alpha given the terminal-to-initial variance ratio
/// a = V(tau)/sigma0. With r = (hbar/m) tau / sigma0 and u = 1/alpha the
/// terminal condition reads
///
///   u^2 r^2 + u r (2 - r) + (1 - r - a) = 0,
///
/// whose discriminant r^2 (r^2 + 4a) is positive for every positive target.
/// A root is admissible when both linear factors of the width profile stay
/// positive on (0, tau]; among admissible roots the one with the smaller
/// |u| (weaker gauge drift) is returned.
pub fn solve_alpha(sigma0: f64, tau: f64, final_ratio: f64, hbar: f64, mass: f64) -> Result<f64> {
    require_positive("sigma0", sigma0)?;
    require_positive("tau", tau)?;
    require_positive("hbar", hbar)?;
    require_positive("mass", mass)?;
    require_positive("final_ratio", final_ratio)?;
    let r = (hbar / mass) * tau / sigma0;
    let disc = r * r + 4.0 * final_ratio;
    let sq = disc.sqrt();
    let candidates = [(-(2.0 - r) + sq) / (2.0 * r), (-(2.0 - r) - sq) / (2.0 * r)];
    let admissible = |u: f64| -> bool {
        // Both factors are linear in tau', positive at 0; checking the
        // endpoint suffices.
        1.0 + u * r > 0.0 && 1.0 - (1.0 - u) * r > 0.0
    };
    let mut best: Option<f64> = None;
    for &u in &candidates {
        if admissible(u) {
            best = match best {
                Some(b) if b.abs() <= u.abs() => Some(b),
                _ => Some(u),
            };
        }
    }
    match best {
        Some(u) if u != 0.0 => Ok(1.0 / u),
        Some(_) => Ok(f64::INFINITY),
        None => Err(CoreError::NoValidRoot),
    }
}

/// Bridge that pins an initial N(0, sigma0) onto the point x_m at tau.
/// The ideal profile is
///
///   V(tau') = sigma0 [1 + ((hbar/m) tau / sigma0 - 1)(tau'/tau)] (1 - tau'/tau)
///
/// shrinking to zero at the horizon; `width_floor` (relative to sigma0)
/// keeps the discretized terminal marginal representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseSpec {
    pub sigma0: f64,
    pub tau: f64,
    pub x_m: f64,
    pub width_floor: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl CollapseSpec {
    fn check(&self) -> Result<()> {
        require_positive("sigma0", self.sigma0)?;
        require_positive("tau", self.tau)?;
        require_positive("hbar", self.hbar)?;
        require_positive("mass", self.mass)?;
        if !self.x_m.is_finite() {
            return Err(CoreError::InvalidParameter("x_m must be finite".into()));
        }
        if !(self.width_floor > 0.0 && self.width_floor < 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "width_floor must lie in (0, 1), got {}",
                self.width_floor
            )));
        }
        Ok(())
    }

    /// Floored interior variance sigma0 max(B(tau'), width_floor).
    pub fn width_variance(&self, tau_prime: f64) -> Result<f64> {
        self.check()?;
        if !(0.0..=self.tau).contains(&tau_prime) {
            return Err(CoreError::InvalidParameter(format!(
                "tau_prime = {tau_prime} outside [0, {}]",
                self.tau
            )));
        }
        let frac = tau_prime / self.tau;
        let r = (self.hbar / self.mass) * self.tau / self.sigma0;
        let profile = (1.0 + (r - 1.0) * frac) * (1.0 - frac);
        Ok(self.sigma0 * profile.max(self.width_floor))
    }

    /// The conditioned mean drifts linearly onto the pinning point.
    pub fn center(&self, tau_prime: f64) -> f64 {
        self.x_m * tau_prime / self.tau
    }

    pub fn density(&self, grid: &Grid1D, tau_prime: f64) -> Result<RealField> {
        let var = self.width_variance(tau_prime)?;
        let c = self.center(tau_prime);
        RealField::from_fn(grid, |x| {
            let d = x - c;
            (-(d * d) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
        })
        .normalized()
    }
}

/// Exact Gaussian state under both flows: density N(center, variance) with
/// action s = k2 (x - center)^2 + k1 (x - center), closed under the unitary
/// time step and the bridge tau step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub center: f64,
    pub variance: f64,
    pub k2: f64,
    pub k1: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl GaussianState {
    fn check(&self) -> Result<()> {
        require_positive("variance", self.variance)?;
        require_positive("hbar", self.hbar)?;
        require_positive("mass", self.mass)?;
        for (name, v) in [("center", self.center), ("k2", self.k2), ("k1", self.k1)] {
            if !v.is_finite() {
                return Err(CoreError::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Complex width Sigma with 1/Sigma = 1/V - 4 i k2 / hbar; the unitary
    /// step is Sigma -> Sigma + i hbar dt / (2m).
    pub fn t_step(&self, dt: f64) -> Result<GaussianState> {
        self.check()?;
        let inv = Complex64::new(1.0 / self.variance, -4.0 * self.k2 / self.hbar);
        let sigma = inv.inv() + Complex64::new(0.0, self.hbar * dt / (2.0 * self.mass));
        if !(sigma.re > 0.0) {
            return Err(CoreError::VarianceCollapse { variance: sigma.re });
        }
        let inv_new = sigma.inv();
        Ok(GaussianState {
            center: self.center + self.k1 * dt / self.mass,
            variance: 1.0 / inv_new.re,
            k2: -0.25 * self.hbar * inv_new.im,
            k1: self.k1,
            hbar: self.hbar,
            mass: self.mass,
        })
    }

    /// Bridge tau step: split into the pair, run the forward factor through
    /// heat and the backward factor through anti-heat for dtau, recombine.
    /// Gaussians are closed under both, so this is exact apart from the
    /// width positivity constraints.
    pub fn tau_step(&self, dtau: f64) -> Result<GaussianState> {
        self.check()?;
        let kappa = self.hbar / self.mass;
        let q_f = 0.25 / self.variance + self.k2 / self.hbar;
        let q_b = 0.25 / self.variance - self.k2 / self.hbar;
        if !(q_f > 0.0) || !(q_b > 0.0) {
            return Err(CoreError::VarianceCollapse {
                variance: 0.5 / q_f.min(q_b),
            });
        }
        // Width parameters F = 1/(2q) of the two factors, and their centers
        // from completing the square over the linear action term.
        let f_f = 0.5 / q_f;
        let f_b = 0.5 / q_b;
        let c_f = self.center - self.k1 * f_f / self.hbar;
        let c_b = self.center + self.k1 * f_b / self.hbar;
        let f_f_new = f_f + kappa * dtau;
        let f_b_new = f_b - kappa * dtau;
        if !(f_f_new > 0.0) {
            return Err(CoreError::VarianceCollapse { variance: f_f_new });
        }
        if !(f_b_new > 0.0) {
            return Err(CoreError::VarianceCollapse { variance: f_b_new });
        }
        let inv_v = 1.0 / f_f_new + 1.0 / f_b_new;
        let variance = 1.0 / inv_v;
        let center = variance * (c_f / f_f_new + c_b / f_b_new);
        let k2 = 0.25 * self.hbar * (1.0 / f_f_new - 1.0 / f_b_new);
        let k1 = 0.5
            * self.hbar
            * ((center - c_f) / f_f_new - (center - c_b) / f_b_new);
        Ok(GaussianState { center, variance, k2, k1, hbar: self.hbar, mass: self.mass })
    }

    /// Realize the scalar state on a grid.
    pub fn to_hydro(&self, grid: &Grid1D) -> Result<HydroState> {
        self.check()?;
        let v = self.variance;
        let c = self.center;
        let rho = RealField::from_fn(grid, |x| {
            let d = x - c;
            (-(d * d) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
        })
        .normalized()?;
        let s = RealField::from_fn(grid, |x| {
            let d = x - c;
            self.k2 * d * d + self.k1 * d
        });
        HydroState::new(rho, s, self.hbar, self.mass)
    }
}
