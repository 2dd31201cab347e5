//! Mixed-flow commutator probe: evolve a Gaussian by a small unitary step
//! and a small bridge step in both orders and divide the squared-Fisher-length
//! difference by the step product. Rows halve the steps level by level; each
//! row carries the exact-engine estimate, the grid-path estimate, a
//! Richardson-extrapolated exact value, and the closed-form reference the
//! experiment probes.

use bridgelab_core::bridge::tau_step_pair;
use bridgelab_core::functionals::fisher_length2;
use bridgelab_core::gaussian::{GaussianPacket, GaussianState};
use bridgelab_core::grid::{Grid1D, RealField};
use bridgelab_core::propagator::step_schrodinger;
use bridgelab_core::state::HydroState;

use crate::config::ExperimentConfig;
use crate::record::ExperimentRecord;
use crate::CliError;

fn density_fisher_length2(rho: &RealField) -> Result<f64, CliError> {
    let state = HydroState::new(rho.normalized()?, RealField::zeros(rho.grid()), 1.0, 1.0)?;
    Ok(fisher_length2(&state)?)
}

fn exact_estimate(seed: &GaussianState, dt: f64, dtau: f64) -> Result<f64, CliError> {
    let after_t_tau = seed.t_step(dt)?.tau_step(dtau)?.variance;
    let after_tau_t = seed.tau_step(dtau)?.t_step(dt)?.variance;
    Ok((after_t_tau - after_tau_t) / (dt * dtau))
}

fn grid_estimate(
    grid: &Grid1D,
    packet: &GaussianPacket,
    dt: f64,
    dtau: f64,
) -> Result<f64, CliError> {
    let hbar = packet.hbar;
    let mass = packet.mass;
    let psi0 = packet.wavefunction(grid)?;

    // Unitary step first, then the pair step.
    let psi_t = step_schrodinger(&psi0, dt, hbar, mass)?;
    let state_t = HydroState::from_wavefunction(&psi_t, hbar, mass)?;
    let pair_a = tau_step_pair(&state_t.to_bridge_pair()?, dtau)?;
    let len_a = density_fisher_length2(&pair_a.density()?)?;

    // Pair step first, then the unitary step.
    let state0 = HydroState::from_wavefunction(&psi0, hbar, mass)?;
    let pair_b = tau_step_pair(&state0.to_bridge_pair()?, dtau)?;
    let state_b = HydroState::from_bridge_pair(&pair_b)?;
    let psi_b = step_schrodinger(&state_b.to_wavefunction(), dt, hbar, mass)?;
    let len_b = density_fisher_length2(&psi_b.modulus_squared())?;

    Ok((len_a - len_b) / (dt * dtau))
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentRecord, CliError> {
    let grid = config.build_grid()?;
    let hbar = config.physics.hbar;
    let mass = config.physics.mass;
    let variance = config.physics.sigma;
    let seed = GaussianState { center: 0.0, variance, k2: 0.0, k1: 0.0, hbar, mass };
    let packet = GaussianPacket { sigma0: variance, center: 0.0, time: 0.0, hbar, mass };
    let reference = 2.0 * hbar * hbar / (mass * mass * variance);

    let levels = config.schedule.n_samples;
    // One extra exact level feeds the Richardson column of the last row.
    let mut exact = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let scale = 0.5f64.powi(i as i32);
        exact.push(exact_estimate(&seed, config.schedule.dt * scale, config.schedule.dtau * scale)?);
    }

    let mut record = ExperimentRecord::new(&[
        "delta",
        "exact_estimate",
        "numeric_estimate",
        "richardson_exact",
        "reference",
    ]);
    for i in 0..levels {
        let scale = 0.5f64.powi(i as i32);
        let dt = config.schedule.dt * scale;
        let dtau = config.schedule.dtau * scale;
        let numeric = grid_estimate(&grid, &packet, dt, dtau)?;
        // The exact estimator's truncation error is quartic in the step, so
        // one halving supports fourth-order extrapolation.
        let richardson = (16.0 * exact[i + 1] - exact[i]) / 15.0;
        record.push(vec![dt, exact[i], numeric, richardson, reference])?;
    }
    Ok(record)
}
