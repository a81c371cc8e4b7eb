//! Finite-state mean-field games: model interface, simplex projection,
//! stationary and time-dependent monotone-flow solvers.

pub mod elliptic;
pub mod error;
pub mod exec;
pub mod model;
pub mod models;
pub mod report;
pub mod simplex;
pub mod stationary;
pub mod timedep;
pub mod types;

pub use elliptic::{solve_elliptic, solve_elliptic_vector, BoundaryKind, EllipticProblem, EllipticSolver};
pub use error::{MfgError, Result};
pub use exec::Execution;
pub use model::{difference, hamiltonian_values, kolmogorov_drift, potential_energy, Model, ModelSpec, Potential};
pub use models::{ParadigmShift, ParadigmShiftParams};
pub use report::{DiagnosticsSink, IterationRecord, NoSink, SolveReport};
pub use simplex::{project_simplex, ProjectionResult};
pub use stationary::{StationaryConfig, StationarySolution, StationaryState};
pub use timedep::{TdConfig, TdSolution, TrajectoryDiff};
pub use types::{SimplexVector, State, TimeGrid, TrajectoryPair, ValueVector, SIMPLEX_TOL};
