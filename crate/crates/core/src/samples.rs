//! Seeded random test states: Gaussian-mixture densities with smooth,
//! compactly damped action fields.
//!
//! The family is built directly as (rho, s) so the action is single-valued
//! by construction; an exponential envelope pins both fields to zero well
//! inside the domain boundary, which keeps periodic spectral operations
//! clean and bridge-pair exponentials representable.

use crate::grid::{Grid1D, RealField};
use crate::state::HydroState;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Envelope width for the action field.
const ACTION_ENVELOPE: f64 = 2.5;

/// Default working grid for randomized tests: wide enough that mixture
/// tails fall below double precision at the wrap point.
pub fn standard_grid() -> Grid1D {
    Grid1D::periodic(-18.0, 18.0, 1024).expect("static grid parameters are valid")
}

/// Normalized Gaussian-mixture density. Seed zero yields a single standard
/// normal so the family always contains the minimum-uncertainty case.
pub fn seeded_density(grid: &Grid1D, seed: u64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let components: Vec<(f64, f64, f64)> = if seed == 0 {
        vec![(1.0, 0.0, 1.0)]
    } else {
        let count = rng.gen_range(2..=4usize);
        (0..count)
            .map(|_| {
                (
                    rng.gen_range(0.5..1.5),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(0.5..2.0),
                )
            })
            .collect()
    };
    let total: f64 = components.iter().map(|c| c.0).sum();
    let rho = RealField::from_fn(grid, |x| {
        components
            .iter()
            .map(|&(w, c, v)| {
                w * (-(x - c) * (x - c) / (2.0 * v)).exp()
                    / (2.0 * std::f64::consts::PI * v).sqrt()
            })
            .sum::<f64>()
            / total
    });
    rho.normalized().expect("mixture carries positive mass")
}

/// Smooth damped action field rescaled so max |s| / hbar lies in
/// [0.3, 1.0] x `action_cap`.
fn seeded_action(grid: &Grid1D, rng: &mut ChaCha8Rng, action_cap: f64, hbar: f64) -> RealField {
    let c1: f64 = rng.gen_range(-1.0..1.0);
    let c2: f64 = rng.gen_range(-1.0..1.0);
    let level = action_cap * rng.gen_range(0.3..1.0);
    let raw = RealField::from_fn(grid, |x| {
        (c1 * x + c2 * x * x) * (-x * x / (2.0 * ACTION_ENVELOPE * ACTION_ENVELOPE)).exp()
    });
    let peak = raw.max_abs();
    if peak == 0.0 {
        return raw;
    }
    raw.scaled(level * hbar / peak)
}

pub fn seeded_state_on(
    grid: &Grid1D,
    seed: u64,
    action_cap: f64,
    hbar: f64,
    mass: f64,
) -> HydroState {
    let rho = seeded_density(grid, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
    let s = seeded_action(grid, &mut rng, action_cap, hbar);
    HydroState::new(rho, s, hbar, mass).expect("sample family satisfies state invariants")
}

/// Random state on the standard periodic grid with hbar = mass = 1.
pub fn seeded_state(seed: u64, action_cap: f64) -> HydroState {
    seeded_state_on(&standard_grid(), seed, action_cap, 1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_deterministic() {
        let a = seeded_state(17, 3.0);
        let b = seeded_state(17, 3.0);
        assert_eq!(a, b);
        let c = seeded_state(18, 3.0);
        assert!(a.rho().values() != c.rho().values());
    }

    #[test]
    fn seed_zero_is_a_standard_normal() {
        let state = seeded_state(0, 1.0);
        let grid = state.grid();
        for i in (0..grid.len()).step_by(64) {
            let x = grid.point(i);
            let expected = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((state.rho().values()[i] - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn action_respects_the_cap() {
        for seed in 0..40 {
            let state = seeded_state(seed, 12.0);
            assert!(state.s().max_abs() <= 12.0 + 1e-12);
            assert!((state.rho().integrate().unwrap() - 1.0).abs() <= 1e-12);
        }
    }
}
