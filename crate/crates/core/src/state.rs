//! Hydrodynamic representation of a pure state and the nonlinear gauge
//! transformation (NLGT) family connecting the wavefunction and bridge-pair
//! pictures.
//!
//! A state is a pair of real fields (rho, s): a unit-mass probability density
//! and an action. The wavefunction picture is psi = sqrt(rho) exp(i s/hbar).
//! Scaling the action by exp(-alpha) with complex alpha = alpha_r + i k pi/2
//! (k integer) keeps the density fixed and, for the four residue classes of
//! k, lands in one of two pictures:
//!
//!   k = 0   wavefunction, action exp(-alpha_r) s
//!   k = 2   wavefunction, action -exp(-alpha_r) s   (time reversal)
//!   k = -1  real pair (phi, phi_hat) with phi phi_hat = rho
//!   k = +1  the same pair with the two factors swapped (tau reversal)

use crate::error::{CoreError, Result};
use crate::grid::{ComplexField, Grid1D, RealField};
use rustfft::num_complex::Complex64;

/// Largest |s|/hbar the pair exponentials can represent without overflow.
const ACTION_LIMIT: f64 = 300.0;

/// Relative tolerance on the total mass accepted by constructors.
const MASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HydroState {
    grid: Grid1D,
    rho: RealField,
    s: RealField,
    hbar: f64,
    mass: f64,
}

/// Two positive real fields whose product is the probability density. The
/// pair carries a one-parameter gauge freedom (c phi, phi_hat / c) that
/// leaves the density invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgePair {
    grid: Grid1D,
    phi: RealField,
    phi_hat: RealField,
    hbar: f64,
    mass: f64,
}

/// Parameters of one discrete NLGT: alpha = alpha_r + i k pi / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlgtParam {
    pub alpha_r: f64,
    pub k: i8,
}

/// Image of a state under a discrete NLGT.
#[derive(Debug, Clone, PartialEq)]
pub enum NlgtImage {
    Wavefunction(HydroState),
    Pair(BridgePair),
}

fn check_physical(hbar: f64, mass: f64) -> Result<()> {
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "hbar must be positive and finite, got {hbar}"
        )));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "mass must be positive and finite, got {mass}"
        )));
    }
    Ok(())
}

fn wrap_to_pi(phase: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut p = phase % two_pi;
    if p > std::f64::consts::PI {
        p -= two_pi;
    } else if p < -std::f64::consts::PI {
        p += two_pi;
    }
    p
}

impl HydroState {
    /// Validates density positivity (negative values within -1e-12 of the
    /// peak are treated as roundoff and clamped) and unit mass within 1e-8.
    pub fn new(rho: RealField, s: RealField, hbar: f64, mass: f64) -> Result<Self> {
        check_physical(hbar, mass)?;
        if rho.grid() != s.grid() {
            return Err(CoreError::GridMismatch);
        }
        let peak = rho.max_abs();
        let min = rho.values().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-12 * peak {
            return Err(CoreError::NegativeDensity(min));
        }
        let rho = if min < 0.0 { rho.map(|v| v.max(0.0)) } else { rho };
        let mass_total = rho.integrate()?;
        if (mass_total - 1.0).abs() > MASS_TOL {
            return Err(CoreError::Unnormalized(mass_total));
        }
        if s.values().iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "action field contains non-finite values".into(),
            ));
        }
        Ok(HydroState { grid: rho.grid().clone(), rho, s, hbar, mass })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn rho(&self) -> &RealField {
        &self.rho
    }

    pub fn s(&self) -> &RealField {
        &self.s
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Densities below this value are treated as numerically empty.
    pub fn density_threshold(&self) -> f64 {
        1e-13 * self.rho.max_abs()
    }

    /// Points carrying non-negligible probability mass.
    pub fn support_mask(&self) -> Vec<bool> {
        let thr = self.density_threshold();
        self.rho.values().iter().map(|&r| r >= thr).collect()
    }

    /// psi = sqrt(rho) exp(i s / hbar).
    pub fn to_wavefunction(&self) -> ComplexField {
        let hbar = self.hbar;
        let values = self
            .rho
            .values()
            .iter()
            .zip(self.s.values())
            .map(|(&r, &s)| Complex64::from_polar(r.sqrt(), s / hbar))
            .collect();
        ComplexField::new(self.grid.clone(), values).expect("fields share the state grid")
    }

    /// Recover (rho, s) from a wavefunction. The action is hbar times the
    /// unwrapped phase, anchored to the principal argument at the density
    /// peak and accumulated outward point by point. Across regions of
    /// negligible density the phase is held constant, so states whose
    /// support is disconnected at the working threshold come back with an
    /// undetermined constant per component.
    pub fn from_wavefunction(psi: &ComplexField, hbar: f64, mass: f64) -> Result<Self> {
        check_physical(hbar, mass)?;
        let rho = psi.modulus_squared();
        let n = rho.values().len();
        if n < 3 {
            return Err(CoreError::GridTooSmall { needed: 3, got: n });
        }
        let thr = 1e-13 * rho.max_abs();
        let anchor = rho
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .ok_or(CoreError::ZeroMarginal)?;
        let v = psi.values();
        let live = |i: usize| rho.values()[i] >= thr;
        let mut theta = vec![0.0; n];
        theta[anchor] = v[anchor].arg();
        for i in anchor + 1..n {
            theta[i] = if live(i) && live(i - 1) {
                theta[i - 1] + wrap_to_pi(v[i].arg() - v[i - 1].arg())
            } else {
                theta[i - 1]
            };
        }
        for i in (0..anchor).rev() {
            theta[i] = if live(i) && live(i + 1) {
                theta[i + 1] + wrap_to_pi(v[i].arg() - v[i + 1].arg())
            } else {
                theta[i + 1]
            };
        }
        let s = RealField::new(
            psi.grid().clone(),
            theta.into_iter().map(|t| hbar * t).collect(),
        )?;
        HydroState::new(rho, s, hbar, mass)
    }

    /// Continuous (real-alpha) NLGT: s -> exp(-alpha_r) s.
    pub fn apply_nlgt(&self, alpha_r: f64) -> Result<HydroState> {
        if !alpha_r.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "alpha_r must be finite, got {alpha_r}"
            )));
        }
        let scale = (-alpha_r).exp();
        Ok(HydroState {
            grid: self.grid.clone(),
            rho: self.rho.clone(),
            s: self.s.scaled(scale),
            hbar: self.hbar,
            mass: self.mass,
        })
    }

    /// Discrete NLGT with alpha = alpha_r + i k pi/2 for k in {-1, 0, 1, 2}.
    pub fn apply_discrete_nlgt(&self, param: NlgtParam) -> Result<NlgtImage> {
        let scaled = self.apply_nlgt(param.alpha_r)?;
        match param.k {
            0 => Ok(NlgtImage::Wavefunction(scaled)),
            2 => Ok(NlgtImage::Wavefunction(HydroState {
                s: scaled.s.scaled(-1.0),
                ..scaled
            })),
            -1 => Ok(NlgtImage::Pair(scaled.to_bridge_pair()?)),
            1 => Ok(NlgtImage::Pair(scaled.to_bridge_pair()?.swapped())),
            k => Err(CoreError::InvalidParameter(format!(
                "discrete NLGT index k must lie in {{-1, 0, 1, 2}}, got {k}"
            ))),
        }
    }

    /// phi = sqrt(rho) exp(-s/hbar), phi_hat = sqrt(rho) exp(+s/hbar).
    /// Fails when the exponent would overflow a double.
    pub fn to_bridge_pair(&self) -> Result<BridgePair> {
        let hbar = self.hbar;
        let extreme = self.s.max_abs() / hbar;
        if extreme > ACTION_LIMIT {
            return Err(CoreError::ActionOverflow(extreme));
        }
        let make = |sign: f64| -> RealField {
            RealField::new(
                self.grid.clone(),
                self.rho
                    .values()
                    .iter()
                    .zip(self.s.values())
                    .map(|(&r, &s)| r.sqrt() * (sign * s / hbar).exp())
                    .collect(),
            )
            .expect("fields share the state grid")
        };
        Ok(BridgePair {
            grid: self.grid.clone(),
            phi: make(-1.0),
            phi_hat: make(1.0),
            hbar,
            mass: self.mass,
        })
    }

    /// Inverse of `to_bridge_pair`: rho = phi phi_hat and
    /// s = (hbar/2) ln(phi_hat / phi), with s set to zero where the density
    /// is numerically empty. The product is rescaled to unit mass to absorb
    /// quadrature drift, provided it is within 1e-6 of one.
    pub fn from_bridge_pair(pair: &BridgePair) -> Result<Self> {
        let rho = pair.density()?;
        let total = rho.integrate()?;
        if !(total.is_finite()) || (total - 1.0).abs() > 1e-6 {
            return Err(CoreError::Unnormalized(total));
        }
        let rho = rho.scaled(1.0 / total);
        let thr = 1e-13 * rho.max_abs();
        let hbar = pair.hbar;
        let s = RealField::new(
            pair.grid.clone(),
            rho.values()
                .iter()
                .zip(pair.phi.values().iter().zip(pair.phi_hat.values()))
                .map(|(&r, (&f, &b))| {
                    if r >= thr && f > 0.0 && b > 0.0 {
                        0.5 * hbar * (b / f).ln()
                    } else {
                        0.0
                    }
                })
                .collect(),
        )?;
        HydroState::new(rho, s, hbar, pair.mass)
    }

    /// Wavefunction of the alpha_r-transformed state.
    pub fn psi_alpha(&self, alpha_r: f64) -> Result<ComplexField> {
        Ok(self.apply_nlgt(alpha_r)?.to_wavefunction())
    }

    /// The same object written as a power of the original wavefunction:
    /// psi_alpha = rho^((1-c)/2) psi^c with c = exp(-alpha_r), where the
    /// branch of log psi is fixed by the continuous action field rather
    /// than the principal argument.
    pub fn psi_alpha_power_form(&self, alpha_r: f64) -> Result<ComplexField> {
        if !alpha_r.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "alpha_r must be finite, got {alpha_r}"
            )));
        }
        let c = (-alpha_r).exp();
        let hbar = self.hbar;
        let values = self
            .rho
            .values()
            .iter()
            .zip(self.s.values())
            .map(|(&r, &s)| {
                if r == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let prefactor = r.powf(0.5 * (1.0 - c));
                let log_psi = Complex64::new(0.5 * r.ln(), s / hbar);
                prefactor * (c * log_psi).exp()
            })
            .collect();
        ComplexField::new(self.grid.clone(), values)
    }
}

impl BridgePair {
    pub fn new(phi: RealField, phi_hat: RealField, hbar: f64, mass: f64) -> Result<Self> {
        check_physical(hbar, mass)?;
        if phi.grid() != phi_hat.grid() {
            return Err(CoreError::GridMismatch);
        }
        for v in phi.values().iter().chain(phi_hat.values()) {
            if !v.is_finite() || *v < 0.0 {
                return Err(CoreError::InvalidParameter(
                    "bridge-pair factors must be finite and nonnegative".into(),
                ));
            }
        }
        Ok(BridgePair { grid: phi.grid().clone(), phi, phi_hat, hbar, mass })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn phi(&self) -> &RealField {
        &self.phi
    }

    pub fn phi_hat(&self) -> &RealField {
        &self.phi_hat
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// rho = phi phi_hat.
    pub fn density(&self) -> Result<RealField> {
        self.phi.zip_with(&self.phi_hat, |a, b| a * b)
    }

    /// Exchange the two factors (tau reversal). The density is untouched and
    /// the action changes sign.
    pub fn swapped(&self) -> BridgePair {
        BridgePair {
            grid: self.grid.clone(),
            phi: self.phi_hat.clone(),
            phi_hat: self.phi.clone(),
            hbar: self.hbar,
            mass: self.mass,
        }
    }

    /// Apply the multiplicative gauge (c phi, phi_hat / c).
    pub fn rescaled(&self, c: f64) -> Result<BridgePair> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "gauge factor must be positive and finite, got {c}"
            )));
        }
        Ok(BridgePair {
            grid: self.grid.clone(),
            phi: self.phi.scaled(c),
            phi_hat: self.phi_hat.scaled(1.0 / c),
            hbar: self.hbar,
            mass: self.mass,
        })
    }
}
