//! Collapse bridge: a Gaussian at rest is steered into a narrow marginal
//! centered on the measurement outcome. The interior center must move
//! linearly and the interior width must follow the closed-form pinch
//! profile down to the configured floor.

use bridgelab_core::bridge::{collapse_bridge, solve_schrodinger_system};
use bridgelab_core::functionals::position_variance;
use bridgelab_core::gaussian::{CollapseSpec, GaussianPacket};

use crate::config::ExperimentConfig;
use crate::experiments::mean_and_variance;
use crate::record::ExperimentRecord;
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<ExperimentRecord, CliError> {
    let grid = config.build_grid()?;
    let hbar = config.physics.hbar;
    let mass = config.physics.mass;
    let tau = config.schedule.tau;
    let x_m = config.collapse.x_m;
    let floor = config.collapse.width_floor;

    let state0 = GaussianPacket {
        sigma0: config.physics.sigma,
        center: 0.0,
        time: 0.0,
        hbar,
        mass,
    }
    .state(&grid)?;
    // The profile uses the width actually realized on the grid so both
    // routes start from the same number.
    let sigma0 = position_variance(&state0)?;
    let problem = collapse_bridge(&state0, x_m, floor, tau)?;
    let solution = solve_schrodinger_system(&problem, config.solver.tol, config.solver.max_iter)?;
    let profile = CollapseSpec { sigma0, tau, x_m, width_floor: floor, hbar, mass };

    let mut record = ExperimentRecord::new(&[
        "tau_prime",
        "center_grid",
        "center_oracle",
        "width_grid",
        "width_oracle",
    ]);
    let n = config.schedule.n_samples;
    for j in 0..n {
        let tau_prime = tau * j as f64 / (n - 1) as f64;
        let (_, rho) = solution.interior(tau_prime)?;
        let (center, variance) = mean_and_variance(&rho)?;
        record.push(vec![
            tau_prime,
            center,
            profile.center(tau_prime),
            variance,
            profile.width_variance(tau_prime)?,
        ])?;
    }
    Ok(record)
}
