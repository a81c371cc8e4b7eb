//! Run configuration: the JSON schema and its validation into solver inputs.
//!
//! ```json
//! {
//!   "mode": "timedep",
//!   "model": { "paradigm_shift": { "a1": 1.0, "a2": 0.0, "r": 1.0 } },
//!   "grid": { "T": 8.0, "N": 450 },
//!   "boundary": { "theta0": [0.5, 0.5], "uT": [0.0, 0.0] },
//!   "init": { "kind": "linear", "theta_guess": [0.8, 0.2], "u_guess": [2.0, 0.0] },
//!   "flow": { "step": 0.0177, "max_iters": 5000, "tol": 1e-4 },
//!   "reference": "analytic_paradigm",
//!   "output_dir": "out/timedep",
//!   "seed": 0
//! }
//! ```

use std::path::{Path, PathBuf};

use mfg_core::stationary::StationaryState;
use mfg_core::{
    project_simplex, Execution, ParadigmShift, ParadigmShiftParams, SimplexVector, StationaryConfig, TdConfig,
    TimeGrid, TrajectoryPair, ValueVector,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Stationary,
    Timedep,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    ParadigmShift { a1: f64, a2: f64, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub theta0: Vec<f64>,
    #[serde(rename = "uT")]
    pub u_terminal: Vec<f64>,
}

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    /// Stationary mode: the initial pair.
    State { theta: Vec<f64>, u: Vec<f64> },
    /// Time-dependent mode: `θ ≡ θ̄₀`, `u ≡ ū_T`.
    Constant,
    /// Time-dependent mode: straight lines from `θ̄₀` to `theta_guess` and
    /// from `u_guess` to `ū_T`.
    Linear { theta_guess: Vec<f64>, u_guess: Vec<f64> },
    /// Time-dependent mode: a smooth random bump on the constant start,
    /// drawn from `seed`.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub step: f64,
    pub max_iters: usize,
    pub tol: f64,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    AnalyticParadigm,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub boundary: Option<BoundaryConfig>,
    pub init: InitConfig,
    pub flow: FlowConfig,
    #[serde(default)]
    pub reference: Option<Reference>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "(document)".to_string() } else { path };
            CliError::config(field, e.into_inner())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunConfig::from_json(&text)
    }

    /// Checks every field and builds the solver inputs.
    pub fn plan(&self) -> Result<Plan> {
        let model = self.model()?;
        let flow = &self.flow;
        if !(flow.step.is_finite() && flow.step > 0.0) {
            return Err(CliError::config(
                "flow.step",
                format!("must be positive and finite, got {}", flow.step),
            ));
        }
        if !(flow.tol.is_finite() && flow.tol >= 0.0) {
            return Err(CliError::config(
                "flow.tol",
                format!("must be nonnegative and finite, got {}", flow.tol),
            ));
        }
        match self.mode {
            Mode::Stationary => self.stationary_plan(model),
            Mode::Timedep => self.timedep_plan(model),
        }
    }

    fn model(&self) -> Result<ParadigmShift> {
        let ModelConfig::ParadigmShift { a1, a2, r } = self.model;
        let params = ParadigmShiftParams::new(a1, a2, r).map_err(|e| CliError::config("model.paradigm_shift", e))?;
        Ok(ParadigmShift::new(params))
    }

    fn stationary_plan(&self, model: ParadigmShift) -> Result<Plan> {
        if self.grid.is_some() {
            return Err(CliError::config("grid", "not used in stationary mode"));
        }
        if self.boundary.is_some() {
            return Err(CliError::config("boundary", "not used in stationary mode"));
        }
        let InitConfig::State { theta, u } = &self.init else {
            return Err(CliError::config("init.kind", "stationary mode needs \"state\""));
        };
        let theta = simplex("init.theta", theta)?;
        let u = values("init.u", u)?;
        for (field, dim) in [("init.theta", theta.dim()), ("init.u", u.dim())] {
            two_states(field, dim)?;
        }
        let init = StationaryState::new(theta, u).map_err(|e| CliError::config("init", e))?;
        let reference = match self.reference {
            Some(Reference::AnalyticParadigm) => {
                require_reference_instance(&model)?;
                let p = init.u.as_slice().iter().sum::<f64>() / init.dim() as f64;
                let (theta, u, _) = ParadigmShift::stationary_solution(p);
                Some(StationaryState::new(theta, u)?)
            }
            None => None,
        };
        let config = StationaryConfig {
            step: self.flow.step,
            max_iters: self.flow.max_iters,
            residual_tol: self.flow.tol,
            record_every: self.flow.record_every,
            reference,
        };
        Ok(Plan::Stationary { model, init, config })
    }

    fn timedep_plan(&self, model: ParadigmShift) -> Result<Plan> {
        let grid = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::config("grid", "required in timedep mode"))?;
        let grid = TimeGrid::new(grid.horizon, grid.intervals).map_err(|e| CliError::config("grid", e))?;
        let boundary = self
            .boundary
            .as_ref()
            .ok_or_else(|| CliError::config("boundary", "required in timedep mode"))?;
        let theta0 = simplex("boundary.theta0", &boundary.theta0)?;
        let u_terminal = values("boundary.uT", &boundary.u_terminal)?;
        for (field, dim) in [("boundary.theta0", theta0.dim()), ("boundary.uT", u_terminal.dim())] {
            two_states(field, dim)?;
        }
        let init = match &self.init {
            InitConfig::State { .. } => {
                return Err(CliError::config("init.kind", "\"state\" is for stationary mode"));
            }
            InitConfig::Constant => TrajectoryPair::constant(grid, &theta0, &u_terminal)?,
            InitConfig::Linear { theta_guess, u_guess } => {
                let theta_guess = simplex("init.theta_guess", theta_guess)?;
                let u_guess = values("init.u_guess", u_guess)?;
                TrajectoryPair::linear(grid, &theta0, &theta_guess, &u_guess, &u_terminal)
                    .map_err(|e| CliError::config("init", e))?
            }
            InitConfig::Random { amplitude } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(CliError::config("init.amplitude", "must be nonnegative and finite"));
                }
                random_start(grid, &theta0, &u_terminal, *amplitude, self.seed)?
            }
        };
        let reference = match self.reference {
            Some(Reference::AnalyticParadigm) => {
                require_reference_instance(&model)?;
                let u = u_terminal.as_slice();
                if u[0] != u[1] || theta0.as_slice() != [0.5, 0.5] {
                    return Err(CliError::config(
                        "reference",
                        "the analytic solution needs theta0 = [0.5, 0.5] and equal uT entries",
                    ));
                }
                Some(ParadigmShift::analytic_trajectory(grid, &u_terminal)?)
            }
            None => None,
        };
        let config = TdConfig {
            step: self.flow.step,
            max_iters: self.flow.max_iters,
            fixpoint_tol: self.flow.tol,
            record_every: self.flow.record_every,
            reference,
            execution: Execution::default(),
        };
        Ok(Plan::Timedep { model, init, config })
    }
}

/// Validated solver inputs.
#[derive(Debug, Clone)]
pub enum Plan {
    Stationary {
        model: ParadigmShift,
        init: StationaryState,
        config: StationaryConfig,
    },
    Timedep {
        model: ParadigmShift,
        init: TrajectoryPair,
        config: TdConfig,
    },
}

fn simplex(field: &str, x: &[f64]) -> Result<SimplexVector> {
    SimplexVector::new(x.to_vec()).map_err(|e| CliError::config(field, e))
}

fn values(field: &str, x: &[f64]) -> Result<ValueVector> {
    ValueVector::new(x.to_vec()).map_err(|e| CliError::config(field, e))
}

fn two_states(field: &str, dim: usize) -> Result<()> {
    if dim == 2 {
        Ok(())
    } else {
        Err(CliError::config(
            field,
            format!("the paradigm-shift model has 2 states, got {dim}"),
        ))
    }
}

fn require_reference_instance(model: &ParadigmShift) -> Result<()> {
    if model.params().is_reference() {
        Ok(())
    } else {
        Err(CliError::config(
            "reference",
            "analytic_paradigm is only known for a1 = 1, a2 = 0, r = 1",
        ))
    }
}

fn random_start(
    grid: TimeGrid,
    theta0: &SimplexVector,
    u_terminal: &ValueVector,
    amplitude: f64,
    seed: u64,
) -> Result<TrajectoryPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bump = if amplitude > 0.0 {
        rng.gen_range(-amplitude..=amplitude)
    } else {
        0.0
    };
    let slopes: Vec<f64> = (0..u_terminal.dim())
        .map(|_| {
            if amplitude > 0.0 {
                rng.gen_range(-amplitude..=amplitude)
            } else {
                0.0
            }
        })
        .collect();
    let n = grid.intervals();
    let t0 = theta0.as_slice();
    let mut theta = Vec::with_capacity(grid.nodes());
    let mut u = Vec::with_capacity(grid.nodes());
    for k in 0..=n {
        let s = k as f64 / n as f64;
        if k == 0 {
            theta.push(theta0.clone());
        } else {
            let w = bump * (std::f64::consts::PI * s).sin();
            theta.push(project_simplex(&[t0[0] + w, t0[1] - w])?.projected);
        }
        if k == n {
            u.push(u_terminal.clone());
        } else {
            let row = u_terminal
                .as_slice()
                .iter()
                .zip(&slopes)
                .map(|(x, c)| x + c * (1.0 - s) * grid.horizon());
            u.push(ValueVector::new(row.collect())?);
        }
    }
    Ok(TrajectoryPair::new(grid, theta, u)?)
}
