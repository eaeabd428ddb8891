//! Canceller configuration optimization: continuous multi-start fitting,
//! hardware quantization, lattice local search, the heuristic RFIC
//! baseline, and tap-count x bandwidth sweeps.

mod levmar;
mod nelder_mead;
mod optimize;
mod param;
mod sweep;

pub use optimize::{
    config_objective, heuristic_init, heuristic_rfic_config, local_search, objective,
    optimize_config, optimize_pipeline, quantize_config, OptimizeReport, SolverOptions,
    StageResult,
};
pub use param::{wrap_angle, ConstraintSet, Family, ParamConstraint, Resolution};
pub use sweep::{restrict_band, sweep, Mode, SweepCell, SweepRow};
