//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line (visible with `--nocapture`). Tolerances are
//! asserted at their stated values; nothing is loosened to make a red
//! criterion green. Criterion 8 currently fails: the faithful mixed-flow
//! commutator of the two exact flows measures half the target coefficient,
//! and the independent grid path agrees with the exact engine, not with the
//! target. See README.md ("Known red") for the analysis.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use bridgelab_core::bridge::{solve_schrodinger_system, tau_step_pair, BridgeProblem};
use bridgelab_core::functionals::{
    fisher_length2, functional_report, heisenberg_product, rotated_energies, wavefunction_report,
};
use bridgelab_core::gaussian::{solve_alpha, GaussianBridgeSpec, GaussianPacket, GaussianState};
use bridgelab_core::grid::{Grid1D, RealField};
use bridgelab_core::propagator::{step_schrodinger, UnitaryRun};
use bridgelab_core::samples::{seeded_density, seeded_state, standard_grid};
use bridgelab_core::state::HydroState;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_bridgelab")
}

fn shipped_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_binary(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().expect("header").split(',').map(|s| s.to_string()).collect();
    let rows = lines
        .map(|line| line.split(',').map(|cell| cell.parse().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("column {name}"))
}

fn normal_density(grid: &Grid1D, center: f64, variance: f64) -> RealField {
    RealField::from_fn(grid, |x| {
        (-(x - center) * (x - center) / (2.0 * variance)).exp()
            / (2.0 * std::f64::consts::PI * variance).sqrt()
    })
    .normalized()
    .unwrap()
}

fn density_fisher_length2(rho: &RealField) -> f64 {
    let state =
        HydroState::new(rho.normalized().unwrap(), RealField::zeros(rho.grid()), 1.0, 1.0).unwrap();
    fisher_length2(&state).unwrap()
}

fn report(n: u32, label: &str, ok: bool, detail: &str) {
    if ok {
        println!("criterion {n} ({label}): pass");
    } else {
        println!("criterion {n} ({label}): FAIL — {detail}");
    }
    assert!(ok, "criterion {n} ({label}): {detail}");
}

#[test]
fn criterion_01_gaussian_spreading_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("propagate.csv");
    let config = shipped_config("propagate.conf");
    let clock = Instant::now();
    let result = run_binary(&[
        "propagate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = clock.elapsed().as_secs_f64();
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let (header, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    let variance = column(&header, "variance_grid");
    let l2 = column(&header, "l2_error");
    let final_variance = rows.last().unwrap()[variance];
    let worst_l2 = rows.iter().map(|r| r[l2]).fold(0.0f64, f64::max);

    let ok = (final_variance - 2.0).abs() <= 1e-6 && worst_l2 <= 1e-6 && elapsed <= 1.0;
    report(
        1,
        "gaussian spreading law",
        ok,
        &format!(
            "final variance {final_variance}, max l2 error {worst_l2:.3e}, runtime {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_02_uncertainty_bound_under_gauge_sweep() {
    let clock = Instant::now();
    let mut min_margin = f64::INFINITY;
    let mut worst_gap: f64 = 0.0;
    for seed in 1..=50u64 {
        let state = seeded_state(seed, 10.0);
        for j in 0..61 {
            let alpha = -3.0 + 6.0 * j as f64 / 60.0;
            let closed = heisenberg_product(&state, alpha).unwrap();
            min_margin = min_margin.min(closed.product - 0.25);
            let direct = heisenberg_product(&state.apply_nlgt(alpha).unwrap(), 0.0).unwrap();
            worst_gap = worst_gap
                .max((closed.sigma2_p_alpha - direct.sigma2_p_alpha).abs())
                .max((closed.lower_bound - direct.lower_bound).abs());
        }
    }
    let elapsed = clock.elapsed().as_secs_f64();
    let ok = min_margin >= -1e-10 && worst_gap <= 1e-8 && elapsed <= 10.0;
    report(
        2,
        "uncertainty bound invariance",
        ok,
        &format!(
            "min margin {min_margin:.3e}, max route gap {worst_gap:.3e}, runtime {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_03_hyperbolic_rotation_identities() {
    let mut worst_route: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for seed in 1..=50u64 {
        let state = seeded_state(seed, 10.0);
        let base = functional_report(&state).unwrap();
        for j in 0..61 {
            let alpha = -3.0 + 6.0 * j as f64 / 60.0;
            let rot = rotated_energies(&state, alpha).unwrap();
            let scale = rot.h_alpha.abs().max(1.0);
            worst_route = worst_route
                .max((rot.h_alpha - rot.h_alpha_direct).abs() / scale)
                .max((rot.k_alpha - rot.k_alpha_direct).abs() / scale);
            let damp = (-2.0 * alpha).exp();
            worst_closed = worst_closed
                .max((rot.h_alpha - (damp * base.t_kin + base.q_bohm)).abs() / scale)
                .max((rot.k_alpha - (damp * base.t_kin - base.q_bohm)).abs() / scale);
        }
    }
    let ok = worst_route <= 1e-8 && worst_closed <= 1e-10;
    report(
        3,
        "hyperbolic rotation identities",
        ok,
        &format!("max route gap {worst_route:.3e}, max closed-form gap {worst_closed:.3e}"),
    );
}

#[test]
fn criterion_04_classical_limit() {
    let grid = standard_grid();
    let rho = seeded_density(&grid, 3);
    let s = RealField::from_fn(&grid, |x| (0.4 * x + 0.15 * x * x) * (-x * x / 18.0).exp());
    let alpha: f64 = 0.6;
    let damp = (-2.0 * alpha).exp();
    let mut gaps = Vec::new();
    let mut approach: f64 = 0.0;
    for hbar in [1e-2, 1e-4, 1e-6] {
        let state = HydroState::new(rho.clone(), s.clone(), hbar, 1.0).unwrap();
        let rot = rotated_energies(&state, alpha).unwrap();
        let classical = damp * functional_report(&state).unwrap().h_cl;
        gaps.push((rot.h_alpha - rot.k_alpha).abs());
        // Distance to the rotated classical energy, in units of hbar^2.
        approach = approach
            .max((rot.h_alpha - classical).abs() / (hbar * hbar))
            .max((rot.k_alpha - classical).abs() / (hbar * hbar));
    }
    let mut exponent_ok = true;
    let mut fitted = Vec::new();
    for w in gaps.windows(2) {
        let exponent = (w[0] / w[1]).ln() / 1e2f64.ln();
        fitted.push(exponent);
        exponent_ok &= (exponent - 2.0).abs() <= 0.05;
    }
    // A bounded hbar^2 coefficient certifies both energies converge to the
    // rotated classical value.
    let ok = exponent_ok && approach.is_finite() && approach <= 10.0;
    report(
        4,
        "classical limit",
        ok,
        &format!("fitted exponents {fitted:?}, hbar^2 coefficient {approach:.3}"),
    );
}

#[test]
fn criterion_05_bridge_width_profile() {
    let alpha = solve_alpha(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
    let profile =
        GaussianBridgeSpec { sigma0: 1.0, tau: 1.0, alpha_param: alpha, hbar: 1.0, mass: 1.0 };
    let back_substitution = (profile.width_variance(1.0).unwrap() - 2.0).abs();

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bridge.csv");
    let config = shipped_config("bridge.conf");
    let clock = Instant::now();
    let result = run_binary(&[
        "bridge",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let elapsed = clock.elapsed().as_secs_f64();
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let (header, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    let grid_col = column(&header, "variance_grid");
    let oracle_col = column(&header, "variance_oracle");
    let iter_col = column(&header, "iterations");
    let residual_col = column(&header, "marginal_residual");
    let interior = &rows[1..rows.len() - 1];
    let worst_width = interior
        .iter()
        .map(|r| (r[grid_col] - r[oracle_col]).abs())
        .fold(0.0f64, f64::max);
    let iterations = rows[0][iter_col];
    let residual = rows[0][residual_col];

    let ok = (alpha - 1.0).abs() <= 1e-10
        && back_substitution <= 1e-10
        && interior.len() >= 5
        && worst_width <= 1e-4
        && iterations <= 200.0
        && residual <= 1e-10
        && elapsed <= 5.0;
    report(
        5,
        "bridge width profile",
        ok,
        &format!(
            "alpha gap {:.3e}, worst interior width gap {worst_width:.3e}, {iterations} iterations, residual {residual:.3e}, runtime {elapsed:.2}s",
            (alpha - 1.0).abs()
        ),
    );
}

#[test]
fn criterion_06_collapse_demo() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("collapse.csv");
    let config = shipped_config("collapse.conf");
    let result = run_binary(&[
        "collapse",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));

    let (header, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    let center_grid = column(&header, "center_grid");
    let center_oracle = column(&header, "center_oracle");
    let width_grid = column(&header, "width_grid");
    let width_oracle = column(&header, "width_oracle");

    let interior = &rows[1..rows.len() - 1];
    assert!(interior.len() >= 9, "need at least 9 interior samples");
    let worst_center = interior
        .iter()
        .map(|r| (r[center_grid] - r[center_oracle]).abs() / r[center_oracle].abs())
        .fold(0.0f64, f64::max);
    let worst_width = interior
        .iter()
        .map(|r| (r[width_grid] - r[width_oracle]).abs() / r[width_oracle])
        .fold(0.0f64, f64::max);
    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    let endpoint_gap = (first[width_grid] - first[width_oracle])
        .abs()
        .max((last[width_grid] - last[width_oracle]).abs());

    let ok = worst_center <= 0.02 && worst_width <= 0.02 && endpoint_gap <= 1e-8;
    report(
        6,
        "collapse demo",
        ok,
        &format!(
            "worst center error {worst_center:.3e}, worst width error {worst_width:.3e}, endpoint gap {endpoint_gap:.3e}"
        ),
    );
}

#[test]
fn criterion_07_sign_property_and_conservation() {
    // Opposite movement of width and momentum spread along the example bridge.
    let grid = standard_grid();
    let problem = BridgeProblem::new(
        normal_density(&grid, 0.0, 1.0),
        normal_density(&grid, 0.0, 2.0),
        1.0,
        1.0,
        1.0,
    )
    .unwrap();
    let solution = solve_schrodinger_system(&problem, 1e-10, 200).unwrap();
    let samples: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
    let mut len2 = Vec::new();
    let mut mom = Vec::new();
    for &tp in &samples {
        let (pair, rho) = solution.interior(tp).unwrap();
        len2.push(density_fisher_length2(&rho));
        mom.push(functional_report(&HydroState::from_bridge_pair(&pair).unwrap()).unwrap().sigma2_p);
    }
    let mut conclusive = 0usize;
    let mut violations = 0usize;
    for i in 1..samples.len() - 1 {
        let h = samples[i + 1] - samples[i - 1];
        let dl = (len2[i + 1] - len2[i - 1]) / h;
        let dp = (mom[i + 1] - mom[i - 1]) / h;
        if dl.abs() <= 1e-8 || dp.abs() <= 1e-8 {
            continue;
        }
        conclusive += 1;
        if dl * dp >= 0.0 {
            violations += 1;
        }
    }

    // Zero conclusive failures across the seeded invariant suite.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("check.csv");
    let config = shipped_config("check.conf");
    let result = run_binary(&[
        "check",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let suite_ok = result.status.success();
    let (header, rows) = parse_csv(&fs::read_to_string(&out).unwrap());
    let pass_col = column(&header, "pass");
    let suite_failures = rows.iter().filter(|r| r[pass_col] == 0.0).count();

    // Companion conservation law: the momentum spread is constant in time.
    let pgrid = Grid1D::periodic(-40.0, 40.0, 1024).unwrap();
    let packet = GaussianPacket { sigma0: 1.0, center: 0.0, time: 0.0, hbar: 1.0, mass: 1.0 };
    let psi0 = packet.wavefunction(&pgrid).unwrap();
    let run = UnitaryRun { dt: 0.2, n_steps: 10, hbar: 1.0, mass: 1.0 };
    let p0 = wavefunction_report(&psi0, 1.0, 1.0).unwrap().p2_raw;
    let drift = run
        .trajectory(&psi0)
        .unwrap()
        .iter()
        .map(|psi| (wavefunction_report(psi, 1.0, 1.0).unwrap().p2_raw - p0).abs())
        .fold(0.0f64, f64::max);

    let ok = conclusive >= 5 && violations == 0 && suite_ok && suite_failures == 0 && drift <= 1e-10;
    report(
        7,
        "sign property and conservation",
        ok,
        &format!(
            "{conclusive} conclusive samples, {violations} violations, {suite_failures} suite failures, momentum-spread drift {drift:.3e}"
        ),
    );
}

#[test]
fn criterion_08_curvature_commutator() {
    let estimate = |seed: &GaussianState, delta: f64| -> f64 {
        let a = seed.t_step(delta).unwrap().tau_step(delta).unwrap().variance;
        let b = seed.tau_step(delta).unwrap().t_step(delta).unwrap().variance;
        (a - b) / (delta * delta)
    };

    let seed = GaussianState { center: 0.0, variance: 1.0, k2: 0.0, k1: 0.0, hbar: 1.0, mass: 1.0 };
    let exact = estimate(&seed, 1e-3);
    let richardson = (16.0 * estimate(&seed, 5e-4) - exact) / 15.0;

    // Independent grid path at the same step.
    let grid = standard_grid();
    let packet = GaussianPacket { sigma0: 1.0, center: 0.0, time: 0.0, hbar: 1.0, mass: 1.0 };
    let delta = 1e-3;
    let psi0 = packet.wavefunction(&grid).unwrap();
    let psi_t = step_schrodinger(&psi0, delta, 1.0, 1.0).unwrap();
    let state_t = HydroState::from_wavefunction(&psi_t, 1.0, 1.0).unwrap();
    let pair_a = tau_step_pair(&state_t.to_bridge_pair().unwrap(), delta).unwrap();
    let len_a = density_fisher_length2(&pair_a.density().unwrap());
    let state0 = HydroState::from_wavefunction(&psi0, 1.0, 1.0).unwrap();
    let pair_b = tau_step_pair(&state0.to_bridge_pair().unwrap(), delta).unwrap();
    let state_b = HydroState::from_bridge_pair(&pair_b).unwrap();
    let psi_b = step_schrodinger(&state_b.to_wavefunction(), delta, 1.0, 1.0).unwrap();
    let len_b = density_fisher_length2(&psi_b.modulus_squared());
    let numeric = (len_a - len_b) / (delta * delta);

    let classical_seed =
        GaussianState { center: 0.0, variance: 1.0, k2: 0.0, k1: 0.0, hbar: 1e-3, mass: 1.0 };
    let classical = estimate(&classical_seed, 1e-3);

    let mut failures = Vec::new();
    if (exact - 2.0).abs() > 0.01 * 2.0 {
        failures.push(format!("exact estimate {exact:.6} vs required 2.0 within 1%"));
    }
    if (richardson - 2.0).abs() > 0.001 * 2.0 {
        failures.push(format!("richardson {richardson:.6} vs required 2.0 within 0.1%"));
    }
    if (numeric - exact).abs() > 0.01 * exact.abs() {
        failures.push(format!("grid path {numeric:.6} vs exact path {exact:.6} beyond 1%"));
    }
    if (classical - 2e-6).abs() > 0.05 * 2e-6 {
        failures.push(format!("classical estimate {classical:.3e} vs required 2e-6 within 5%"));
    }

    let ok = failures.is_empty();
    report(8, "curvature commutator", ok, &failures.join("; "));
}

#[test]
fn criterion_09_born_rule_conservation() {
    let mut worst: f64 = 0.0;
    for seed in 1..=50u64 {
        let state = seeded_state(seed, 10.0);
        let threshold = state.density_threshold();
        for j in 0..61 {
            let alpha = -3.0 + 6.0 * j as f64 / 60.0;
            let psi2 = state.psi_alpha(alpha).unwrap().modulus_squared();
            let pair = state.apply_nlgt(alpha).unwrap().to_bridge_pair().unwrap();
            for (i, &rho) in state.rho().values().iter().enumerate() {
                if rho < threshold {
                    continue;
                }
                worst = worst.max((psi2.values()[i] - rho).abs());
                worst = worst
                    .max((pair.phi().values()[i] * pair.phi_hat().values()[i] - rho).abs());
            }
        }
    }
    let ok = worst <= 1e-12;
    report(9, "born rule conservation", ok, &format!("worst density mismatch {worst:.3e}"));
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("propagate", "experiment = propagate\nschedule.t = 0.5\nschedule.dt = 0.05\nschedule.n_samples = 3\n"),
        ("bridge", "experiment = bridge\nschedule.n_samples = 3\n"),
        (
            "collapse",
            "experiment = collapse\ngrid.mode = closed\ngrid.x_min = -10\ngrid.x_max = 12\ngrid.n = 441\nschedule.n_samples = 3\ncollapse.width_floor = 0.05\nsolver.max_iter = 4000\n",
        ),
        ("nlgt-sweep", "experiment = nlgt-sweep\nschedule.n_samples = 5\nseed = 9\n"),
        ("curvature", "experiment = curvature\nschedule.dt = 4e-3\nschedule.n_samples = 2\n"),
        ("check", "experiment = check\nschedule.n_samples = 3\nseed = 4\n"),
    ];
    let mut all_identical = true;
    for (command, body) in configs {
        let path = dir.path().join(format!("{command}.conf"));
        fs::write(&path, body).unwrap();
        for format in ["csv", "json"] {
            let args = ["--config", path.to_str().unwrap(), "--format", format, "--seed", "13"];
            let first = run_binary(&[&[command], &args[..]].concat());
            let second = run_binary(&[&[command], &args[..]].concat());
            assert!(
                first.status.success() && second.status.success(),
                "{command} ({format}): {}",
                String::from_utf8_lossy(&first.stderr)
            );
            if first.stdout != second.stdout {
                all_identical = false;
            }
        }
    }
    report(10, "determinism", all_identical, "outputs differed between identical runs");
}
