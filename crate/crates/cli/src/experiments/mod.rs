//! One module per experiment. Each `run` takes a validated configuration
//! and returns the numeric table to emit; `check` additionally reports how
//! many hard invariants failed so the binary can gate its exit status.

pub mod bridge;
pub mod check;
pub mod collapse;
pub mod curvature;
pub mod nlgt_sweep;
pub mod propagate;

use bridgelab_core::grid::{Grid1D, RealField};
use bridgelab_core::Result;

/// Grid-normalized Gaussian density.
pub(crate) fn normal_density(grid: &Grid1D, center: f64, variance: f64) -> Result<RealField> {
    RealField::from_fn(grid, |x| {
        (-(x - center) * (x - center) / (2.0 * variance)).exp()
            / (2.0 * std::f64::consts::PI * variance).sqrt()
    })
    .normalized()
}

/// Mean and centered variance of a (not necessarily normalized) density.
pub(crate) fn mean_and_variance(rho: &RealField) -> Result<(f64, f64)> {
    let rho = rho.normalized()?;
    let grid = rho.grid();
    let mean = RealField::from_fn(grid, |x| x).zip_with(&rho, |x, r| x * r)?.integrate()?;
    let variance = RealField::from_fn(grid, |x| x)
        .zip_with(&rho, |x, r| (x - mean) * (x - mean) * r)?
        .integrate()?;
    Ok((mean, variance))
}
