use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid needs at least {needed} points for this operation, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error("periodic grids require a power-of-two point count of at least 8, got {0}")]
    BadPeriodicSize(usize),
    #[error("operation requires a {required:?} grid, got {got:?}")]
    WrongGridMode {
        required: crate::grid::GridMode,
        got: crate::grid::GridMode,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid domain: x_min = {x_min} must be smaller than x_max = {x_max}")]
    BadDomain { x_min: f64, x_max: f64 },
    #[error("density must be nonnegative everywhere (min value {0})")]
    NegativeDensity(f64),
    #[error("density integrates to {0}, expected 1 within 1e-8")]
    Unnormalized(f64),
    #[error("density has no representable mass on the grid")]
    ZeroMarginal,
    #[error("|s|/hbar reaches {0:.3e}; bridge-pair exponentials overflow beyond 300")]
    ActionOverflow(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Fisher information integral {0:.3e} is too small to invert")]
    DegenerateFisher(f64),
    #[error("iteration did not converge: residual {residual:.3e} after {iterations} steps")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("target marginal places mass at x = {x} that the kernel image of the source cannot reach")]
    InfeasibleBridge { x: f64 },
    #[error(
        "anti-heat step is unstable: norm fraction {fraction:.3e} above the spectral cutoff"
    )]
    AntiHeatUnstable { fraction: f64 },
    #[error("anti-heat step would drive the Gaussian variance {variance:.3e} below zero")]
    VarianceCollapse { variance: f64 },
    #[error("no admissible root: every candidate width profile vanishes inside the window")]
    NoValidRoot,
}

pub type Result<T> = std::result::Result<T, CoreError>;
