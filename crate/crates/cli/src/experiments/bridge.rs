//! Gaussian-to-Gaussian bridge: the terminal width is the free-spreading
//! width at time t, the interior is solved on the grid and compared with the
//! closed-form width profile on the admissible branch.

use bridgelab_core::bridge::{solve_schrodinger_system, BridgeProblem};
use bridgelab_core::gaussian::{solve_alpha, GaussianBridgeSpec, GaussianPacket};

use crate::config::ExperimentConfig;
use crate::experiments::{mean_and_variance, normal_density};
use crate::record::ExperimentRecord;
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<ExperimentRecord, CliError> {
    let grid = config.build_grid()?;
    let hbar = config.physics.hbar;
    let mass = config.physics.mass;
    let sigma = config.physics.sigma;
    let tau = config.schedule.tau;

    // Terminal width from the spreading law at t, then the width profile
    // parameter alpha by back-substitution.
    let packet =
        GaussianPacket { sigma0: sigma, center: 0.0, time: config.schedule.t, hbar, mass };
    let final_variance = packet.width_variance();
    let alpha = solve_alpha(sigma, tau, final_variance / sigma, hbar, mass)?;
    let profile = GaussianBridgeSpec { sigma0: sigma, tau, alpha_param: alpha, hbar, mass };

    let rho0 = normal_density(&grid, 0.0, sigma)?;
    let rho1 = normal_density(&grid, 0.0, final_variance)?;
    let problem = BridgeProblem::new(rho0, rho1, tau, hbar, mass)?;
    let solution = solve_schrodinger_system(&problem, config.solver.tol, config.solver.max_iter)?;

    let mut record = ExperimentRecord::new(&[
        "tau_prime",
        "variance_grid",
        "variance_oracle",
        "iterations",
        "marginal_residual",
    ]);
    let n = config.schedule.n_samples;
    for j in 0..n {
        let tau_prime = tau * j as f64 / (n - 1) as f64;
        let (_, rho) = solution.interior(tau_prime)?;
        let (_, variance) = mean_and_variance(&rho)?;
        record.push(vec![
            tau_prime,
            variance,
            profile.width_variance(tau_prime)?,
            solution.iterations as f64,
            solution.marginal_residual,
        ])?;
    }
    Ok(record)
}
