//! Flat `key=value` configuration files with dotted keys.
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! ignored. Keys are grouped by prefix (`grid.`, `physics.`, `schedule.`,
//! `solver.`, `collapse.`, `output.`); every key not meaningful for the
//! requested experiment is rejected rather than ignored, so typos fail
//! loudly before any computation starts.

use std::fmt;
use std::path::PathBuf;

use bridgelab_core::grid::{Grid1D, GridMode};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(String),
    #[error("line {line}: expected key=value, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("duplicate key `{0}`")]
    Duplicate(String),
    #[error("unknown key `{key}` for experiment `{experiment}`")]
    Unknown { key: String, experiment: String },
    #[error("key `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("config declares experiment `{declared}` but the command line requested `{requested}`")]
    ExperimentMismatch { declared: String, requested: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Propagate,
    Bridge,
    Collapse,
    NlgtSweep,
    Curvature,
    Check,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Propagate => "propagate",
            Experiment::Bridge => "bridge",
            Experiment::Collapse => "collapse",
            Experiment::NlgtSweep => "nlgt-sweep",
            Experiment::Curvature => "curvature",
            Experiment::Check => "check",
        }
    }

    fn from_name(name: &str) -> Option<Experiment> {
        match name {
            "propagate" => Some(Experiment::Propagate),
            "bridge" => Some(Experiment::Bridge),
            "collapse" => Some(Experiment::Collapse),
            "nlgt-sweep" => Some(Experiment::NlgtSweep),
            "curvature" => Some(Experiment::Curvature),
            "check" => Some(Experiment::Check),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSettings {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub mode: GridMode,
}

#[derive(Debug, Clone, Copy)]
pub struct PhysicsSettings {
    pub hbar: f64,
    pub mass: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScheduleSettings {
    pub t: f64,
    pub tau: f64,
    pub dt: f64,
    pub dtau: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone)]
pub struct OutputSettings {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CollapseSettings {
    pub x_m: f64,
    pub width_floor: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridSettings,
    pub physics: PhysicsSettings,
    pub schedule: ScheduleSettings,
    pub output: OutputSettings,
    pub solver: SolverSettings,
    pub collapse: CollapseSettings,
    pub seed: u64,
}

const COMMON_KEYS: &[&str] = &[
    "experiment",
    "seed",
    "grid.x_min",
    "grid.x_max",
    "grid.n",
    "grid.mode",
    "physics.hbar",
    "physics.mass",
    "physics.sigma",
    "output.path",
    "output.format",
];

fn experiment_keys(experiment: Experiment) -> &'static [&'static str] {
    match experiment {
        Experiment::Propagate => &["schedule.t", "schedule.dt", "schedule.n_samples"],
        Experiment::Bridge => &[
            "schedule.t",
            "schedule.tau",
            "schedule.n_samples",
            "solver.tol",
            "solver.max_iter",
        ],
        Experiment::Collapse => &[
            "schedule.tau",
            "schedule.n_samples",
            "solver.tol",
            "solver.max_iter",
            "collapse.x_m",
            "collapse.width_floor",
        ],
        Experiment::NlgtSweep => &["schedule.n_samples"],
        Experiment::Curvature => &["schedule.dt", "schedule.dtau", "schedule.n_samples"],
        Experiment::Check => &[
            "schedule.tau",
            "schedule.n_samples",
            "solver.tol",
            "solver.max_iter",
        ],
    }
}

fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: idx + 1,
            text: line.to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Malformed { line: idx + 1, text: line.to_string() });
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::Duplicate(key));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), message: message.into() }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed: f64 =
        value.parse().map_err(|_| bad(key, format!("`{value}` is not a number")))?;
    if !parsed.is_finite() {
        return Err(bad(key, "value must be finite"));
    }
    Ok(parsed)
}

fn parse_positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed = parse_f64(key, value)?;
    if parsed <= 0.0 {
        return Err(bad(key, "value must be positive"));
    }
    Ok(parsed)
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| bad(key, format!("`{value}` is not a non-negative integer")))
}

/// Parse `text` for the experiment selected on the command line. A config
/// may omit `experiment`; if present it must agree with the subcommand.
pub fn load(text: &str, requested: Experiment) -> Result<ExperimentConfig, ConfigError> {
    let entries = parse_entries(text)?;
    if let Some((_, declared)) = entries.iter().find(|(k, _)| k == "experiment") {
        let declared_exp = Experiment::from_name(declared).ok_or_else(|| {
            bad("experiment", format!("`{declared}` is not a known experiment"))
        })?;
        if declared_exp != requested {
            return Err(ConfigError::ExperimentMismatch {
                declared: declared_exp.name().to_string(),
                requested: requested.name().to_string(),
            });
        }
    }

    let mut config = ExperimentConfig {
        experiment: requested,
        grid: GridSettings { x_min: -18.0, x_max: 18.0, n: 1024, mode: GridMode::Periodic },
        physics: PhysicsSettings { hbar: 1.0, mass: 1.0, sigma: 1.0 },
        schedule: ScheduleSettings { t: 2.0, tau: 1.0, dt: 0.01, dtau: 0.0, n_samples: 9 },
        output: OutputSettings { path: None, format: OutputFormat::Csv },
        solver: SolverSettings { tol: 1e-10, max_iter: 200 },
        collapse: CollapseSettings { x_m: 2.0, width_floor: 1e-3 },
        seed: 1,
    };
    let mut dtau_set = false;

    for (key, value) in &entries {
        let allowed =
            COMMON_KEYS.contains(&key.as_str()) || experiment_keys(requested).contains(&key.as_str());
        if !allowed {
            return Err(ConfigError::Unknown {
                key: key.clone(),
                experiment: requested.name().to_string(),
            });
        }
        match key.as_str() {
            "experiment" => {}
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|_| bad(key, format!("`{value}` is not an unsigned integer")))?;
            }
            "grid.x_min" => config.grid.x_min = parse_f64(key, value)?,
            "grid.x_max" => config.grid.x_max = parse_f64(key, value)?,
            "grid.n" => config.grid.n = parse_usize(key, value)?,
            "grid.mode" => {
                config.grid.mode = match value.as_str() {
                    "periodic" => GridMode::Periodic,
                    "closed" => GridMode::Closed,
                    other => return Err(bad(key, format!("`{other}` is not periodic|closed"))),
                };
            }
            "physics.hbar" => config.physics.hbar = parse_positive(key, value)?,
            "physics.mass" => config.physics.mass = parse_positive(key, value)?,
            "physics.sigma" => config.physics.sigma = parse_positive(key, value)?,
            "schedule.t" => {
                let t = parse_f64(key, value)?;
                if t < 0.0 {
                    return Err(bad(key, "value must be non-negative"));
                }
                config.schedule.t = t;
            }
            "schedule.tau" => config.schedule.tau = parse_positive(key, value)?,
            "schedule.dt" => config.schedule.dt = parse_positive(key, value)?,
            "schedule.dtau" => {
                config.schedule.dtau = parse_positive(key, value)?;
                dtau_set = true;
            }
            "schedule.n_samples" => config.schedule.n_samples = parse_usize(key, value)?,
            "solver.tol" => config.solver.tol = parse_positive(key, value)?,
            "solver.max_iter" => {
                config.solver.max_iter = parse_usize(key, value)?;
                if config.solver.max_iter == 0 {
                    return Err(bad(key, "value must be at least 1"));
                }
            }
            "collapse.x_m" => config.collapse.x_m = parse_f64(key, value)?,
            "collapse.width_floor" => {
                let floor = parse_positive(key, value)?;
                if floor >= 1.0 {
                    return Err(bad(key, "width floor must lie strictly below 1"));
                }
                config.collapse.width_floor = floor;
            }
            "output.path" => config.output.path = Some(PathBuf::from(value)),
            "output.format" => {
                config.output.format = match value.as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(bad(key, format!("`{other}` is not csv|json"))),
                };
            }
            _ => unreachable!("key `{key}` accepted but not handled"),
        }
    }

    if !dtau_set {
        config.schedule.dtau = config.schedule.dt;
    }
    validate(&config)?;
    Ok(config)
}

fn validate(config: &ExperimentConfig) -> Result<(), ConfigError> {
    // Building the grid exercises every grid invariant (ordering, size,
    // power-of-two for periodic modes) before any computation runs.
    config.build_grid()?;
    let min_samples = match config.experiment {
        Experiment::Curvature | Experiment::Check => 1,
        _ => 2,
    };
    if config.schedule.n_samples < min_samples {
        return Err(bad(
            "schedule.n_samples",
            format!("experiment `{}` needs at least {min_samples}", config.experiment),
        ));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn build_grid(&self) -> Result<Grid1D, ConfigError> {
        let g = &self.grid;
        let built = match g.mode {
            GridMode::Periodic => Grid1D::periodic(g.x_min, g.x_max, g.n),
            GridMode::Closed => Grid1D::closed(g.x_min, g.x_max, g.n),
        };
        built.map_err(|e| ConfigError::BadValue { key: "grid".into(), message: e.to_string() })
    }
}
