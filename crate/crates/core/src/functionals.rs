//! Uncertainty and energy functionals of a hydrodynamic state.
//!
//! Moment conventions: `d2_x` and `d2_p` are centered variances; the raw
//! (uncentered) second moments enter only the alpha-deformed uncertainty
//! product, which is defined about the coordinate origin. Position variance
//! is picture-independent, so `sigma2_x` repeats `d2_x`, while `sigma2_p`
//! adds the Fisher contribution hbar^2 / (4 Delta_x^2) on top of the
//! classical momentum spread.

use crate::error::{CoreError, Result};
use crate::grid::{
    fft, gradient_order4, second_derivative_order4, ComplexField, GridMode, RealField,
};
use crate::state::{BridgePair, HydroState};

/// Smallest Fisher integral considered invertible.
const FISHER_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalReport {
    pub mean_x: f64,
    pub mean_p: f64,
    pub d2_x: f64,
    pub d2_p: f64,
    pub fisher_len2: f64,
    pub sigma2_x: f64,
    pub sigma2_p: f64,
    pub t_kin: f64,
    pub q_bohm: f64,
    pub h_cl: f64,
    pub h_quantum: f64,
    pub k_like: f64,
}

/// Raw-moment uncertainty product of the alpha_r-transformed state and its
/// exact lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergReport {
    pub sigma2_x: f64,
    pub sigma2_p_alpha: f64,
    pub product: f64,
    pub lower_bound: f64,
}

/// The two quadratic energy forms after scaling the action, evaluated two
/// ways: from the invariants of the reference state, and directly on the
/// transformed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedEnergies {
    pub h_alpha: f64,
    pub k_alpha: f64,
    pub h_alpha_direct: f64,
    pub k_alpha_direct: f64,
}

/// Conserved-quantity diagnostics read straight off a wavefunction on a
/// periodic grid, using the probability current instead of an unwrapped
/// phase. `p2_raw` is the spectral second momentum moment, which an exact
/// free propagator preserves bin by bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionReport {
    pub norm2: f64,
    pub mean_x: f64,
    pub sigma2_x: f64,
    pub t_kin: f64,
    pub q_bohm: f64,
    pub h_quantum: f64,
    pub p2_raw: f64,
}

struct Moments {
    mean_x: f64,
    d2_x: f64,
    raw_x2: f64,
    mean_p: f64,
    d2_p: f64,
    raw_p2: f64,
    corr_xp: f64,
    fisher_info: f64,
}

fn moments(state: &HydroState) -> Result<Moments> {
    let grid = state.grid();
    if grid.len() < 5 {
        return Err(CoreError::GridTooSmall { needed: 5, got: grid.len() });
    }
    let rho = state.rho();
    // The action carries physics in its local slope but need not wrap
    // periodically (a drifting packet has s ~ p x), so it is always
    // differentiated with local fourth-order stencils. Density-derived
    // fields vanish at the boundary and are safe to treat spectrally.
    let ds = RealField::new(grid.clone(), gradient_order4(state.s().values(), grid.dx()))?;
    let sqrt_rho = rho.map(f64::sqrt);
    let dsqrt = match grid.mode() {
        GridMode::Periodic => sqrt_rho.gradient()?,
        GridMode::Closed => {
            RealField::new(grid.clone(), gradient_order4(sqrt_rho.values(), grid.dx()))?
        }
    };

    let x_rho = RealField::from_fn(grid, |x| x).zip_with(rho, |x, r| x * r)?;
    let mean_x = x_rho.integrate()?;
    let raw_x2 = RealField::from_fn(grid, |x| x * x).zip_with(rho, |x2, r| x2 * r)?.integrate()?;
    let d2_x = raw_x2 - mean_x * mean_x;

    let p_rho = ds.zip_with(rho, |p, r| p * r)?;
    let mean_p = p_rho.integrate()?;
    let raw_p2 = ds.zip_with(rho, |p, r| p * p * r)?.integrate()?;
    let d2_p = raw_p2 - mean_p * mean_p;

    let corr_xp = RealField::from_fn(grid, |x| x).zip_with(&p_rho, |x, pr| x * pr)?.integrate()?;

    let fisher_info = dsqrt.map(|g| g * g).integrate()?;

    Ok(Moments { mean_x, d2_x, raw_x2, mean_p, d2_p, raw_p2, corr_xp, fisher_info })
}

/// Centered position variance.
pub fn position_variance(state: &HydroState) -> Result<f64> {
    Ok(moments(state)?.d2_x)
}

/// Centered classical momentum variance (the spread of grad s under rho).
pub fn momentum_variance(state: &HydroState) -> Result<f64> {
    Ok(moments(state)?.d2_p)
}

/// Squared Fisher length Delta_x^2 = [4 int (grad sqrt(rho))^2]^(-1).
pub fn fisher_length2(state: &HydroState) -> Result<f64> {
    let info = moments(state)?.fisher_info;
    if !(info > FISHER_FLOOR) {
        return Err(CoreError::DegenerateFisher(info));
    }
    Ok(1.0 / (4.0 * info))
}

pub fn functional_report(state: &HydroState) -> Result<FunctionalReport> {
    let m = moments(state)?;
    if !(m.fisher_info > FISHER_FLOOR) {
        return Err(CoreError::DegenerateFisher(m.fisher_info));
    }
    let hbar = state.hbar();
    let mass = state.mass();
    let fisher_len2 = 1.0 / (4.0 * m.fisher_info);
    let t_kin = m.raw_p2 / (2.0 * mass);
    let q_bohm = hbar * hbar * m.fisher_info / (2.0 * mass);
    Ok(FunctionalReport {
        mean_x: m.mean_x,
        mean_p: m.mean_p,
        d2_x: m.d2_x,
        d2_p: m.d2_p,
        fisher_len2,
        sigma2_x: m.d2_x,
        sigma2_p: m.d2_p + hbar * hbar / (4.0 * fisher_len2),
        t_kin,
        q_bohm,
        h_cl: t_kin,
        h_quantum: t_kin + q_bohm,
        k_like: t_kin - q_bohm,
    })
}

/// Raw-moment uncertainty product after s -> exp(-alpha_r) s:
///
///   sigma2_x            = int x^2 rho
///   sigma2_p(alpha)     = exp(-2 alpha) int (grad s)^2 rho
///                         + hbar^2 int (grad sqrt rho)^2
///   product             = sigma2_x sigma2_p(alpha)
///   lower_bound         = hbar^2/4 + exp(-2 alpha) (int x grad s rho)^2
///
/// The bound follows from the Cauchy-Schwarz inequality applied to each
/// term; it is saturated by Gaussian densities with quadratic actions.
pub fn heisenberg_product(state: &HydroState, alpha_r: f64) -> Result<HeisenbergReport> {
    if !alpha_r.is_finite() {
        return Err(CoreError::InvalidParameter(format!(
            "alpha_r must be finite, got {alpha_r}"
        )));
    }
    let m = moments(state)?;
    let hbar = state.hbar();
    let damp = (-2.0 * alpha_r).exp();
    let sigma2_x = m.raw_x2;
    let sigma2_p_alpha = damp * m.raw_p2 + hbar * hbar * m.fisher_info;
    Ok(HeisenbergReport {
        sigma2_x,
        sigma2_p_alpha,
        product: sigma2_x * sigma2_p_alpha,
        lower_bound: hbar * hbar / 4.0 + damp * m.corr_xp * m.corr_xp,
    })
}

/// Kinetic, osmotic, and combined energies.
pub fn energies(state: &HydroState) -> Result<FunctionalReport> {
    functional_report(state)
}

/// h(alpha) = exp(-2 alpha) T + Q and k(alpha) = exp(-2 alpha) T - Q,
/// evaluated both from the reference-state invariants and directly on the
/// transformed state. The two routes are algebraically identical; comparing
/// them checks the transformation code, not the mathematics.
pub fn rotated_energies(state: &HydroState, alpha_r: f64) -> Result<RotatedEnergies> {
    let base = functional_report(state)?;
    let damp = (-2.0 * alpha_r).exp();
    let direct = functional_report(&state.apply_nlgt(alpha_r)?)?;
    Ok(RotatedEnergies {
        h_alpha: damp * base.t_kin + base.q_bohm,
        k_alpha: damp * base.t_kin - base.q_bohm,
        h_alpha_direct: direct.h_quantum,
        k_alpha_direct: direct.k_like,
    })
}

/// The k-form evaluated in the pair picture,
/// k = -int phi_hat H phi = (hbar^2 / 2m) int phi_hat phi'',
/// with the curvature taken spectrally (periodic) or by the three-point
/// stencil (closed). Exponential factors in the pair make this route lose
/// roughly exp(2 max|s|/hbar) digits, so it is a consistency check for
/// moderate actions rather than a production path.
pub fn k_from_bridge_pair(pair: &BridgePair) -> Result<f64> {
    let grid = pair.grid();
    if grid.len() < 5 {
        return Err(CoreError::GridTooSmall { needed: 5, got: grid.len() });
    }
    let curv = match grid.mode() {
        GridMode::Periodic => pair.phi().second_derivative()?,
        GridMode::Closed => RealField::new(
            grid.clone(),
            second_derivative_order4(pair.phi().values(), grid.dx()),
        )?,
    };
    let integrand = pair.phi_hat().zip_with(&curv, |b, c| b * c)?;
    Ok(pair.hbar() * pair.hbar() / (2.0 * pair.mass()) * integrand.integrate()?)
}

/// Current-based diagnostics of a wavefunction on a periodic grid.
pub fn wavefunction_report(psi: &ComplexField, hbar: f64, mass: f64) -> Result<WavefunctionReport> {
    let grid = psi.grid().clone();
    let rho = psi.modulus_squared();
    let norm2 = rho.integrate()?;
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return Err(CoreError::ZeroMarginal);
    }
    let thr = 1e-13 * rho.max_abs();

    let dpsi = psi.spectral_gradient()?;
    // psi-bar psi': the real part is sqrt(rho) (sqrt rho)', the imaginary
    // part is the current j / hbar = rho (grad s) / hbar.
    let mixed: Vec<(f64, f64)> = psi
        .values()
        .iter()
        .zip(dpsi.values())
        .map(|(a, b)| {
            let m = a.conj() * b;
            (m.re, m.im)
        })
        .collect();
    let mut kin = vec![0.0; grid.len()];
    let mut osm = vec![0.0; grid.len()];
    for (i, &r) in rho.values().iter().enumerate() {
        if r >= thr {
            kin[i] = mixed[i].1 * mixed[i].1 / r;
            osm[i] = mixed[i].0 * mixed[i].0 / r;
        }
    }
    let t_kin = hbar * hbar * RealField::new(grid.clone(), kin)?.integrate()? / (2.0 * mass);
    let q_bohm = hbar * hbar * RealField::new(grid.clone(), osm)?.integrate()? / (2.0 * mass);

    let x_rho = RealField::from_fn(&grid, |x| x).zip_with(&rho, |x, r| x * r)?;
    let mean_x = x_rho.integrate()? / norm2;
    let raw_x2 =
        RealField::from_fn(&grid, |x| x * x).zip_with(&rho, |x2, r| x2 * r)?.integrate()? / norm2;

    let spec = fft(psi)?;
    let k = grid.wavenumbers()?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, c) in spec.values().iter().enumerate() {
        let w = c.norm_sqr();
        num += k[j] * k[j] * w;
        den += w;
    }

    Ok(WavefunctionReport {
        norm2,
        mean_x,
        sigma2_x: raw_x2 - mean_x * mean_x,
        t_kin,
        q_bohm,
        h_quantum: t_kin + q_bohm,
        p2_raw: hbar * hbar * num / den,
    })
}
