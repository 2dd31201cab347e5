//! bridgelab-core: hydrodynamic quantum states on 1-D grids, the family of
//! nonlinear gauge transformations connecting wavefunction and bridge-pair
//! pictures, uncertainty and energy functionals, exact unitary propagation,
//! a Schrödinger-bridge solver, and closed-form Gaussian references.

pub mod bridge;
pub mod error;
pub mod functionals;
pub mod gaussian;
pub mod grid;
pub mod propagator;
pub mod samples;
pub mod state;

pub use error::{CoreError, Result};
