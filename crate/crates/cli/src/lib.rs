//! Library side of the survey planner CLI: experiment spec parsing and the
//! mission pipeline. The domain types and algorithms live in
//! [`swathplan_core`] and are re-exported here for convenience.

pub mod pipeline;
pub mod spec;

pub use pipeline::{
    resolve_out_dir, run_experiment, run_single, write_atomic, write_mission_artifacts,
    ExperimentOutcome, OUT_ROOT_ENV,
};
pub use spec::ExperimentSpec;
pub use swathplan_core as core;
