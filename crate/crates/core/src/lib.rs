//! Coverage path planning with adaptive track spacing for seabed surveys
//! with a side-looking sonar.
//!
//! A vehicle towing a side-looking sonar covers a rectangular area with
//! parallel tracks. The sensor is blind directly underneath (the nadir
//! gap), so tracks are laid in pairs that cover each other's gap. Data
//! quality falls off towards the outer end of the swath; this crate plans
//! track spacing so that wherever coverage must overlap, the overlap lands
//! on that low-quality tail instead of on the best part of the swath.
//!
//! The pieces:
//!
//! - [`survey`]: area and sensor geometry, pairing feasibility.
//! - [`pdmodel`]: detection-probability curves, their estimation from
//!   observations and the effective-range threshold crossing.
//! - [`planner`]: paired-track layout, track-count function, exhaustive
//!   range adaptation and online replanning.
//! - [`simulator`]: gridded mission execution with multiplicative
//!   residual-risk accumulation and seeded reproducibility.
//! - [`analysis`]: coverage metrics, risk histograms, Gaussian-mixture
//!   fits and control-versus-adaptive comparison reports.

pub mod analysis;
pub mod error;
pub mod pdmodel;
pub mod planner;
pub mod simulator;
pub mod survey;
pub mod track;

pub use analysis::{
    analyze_grid, compare_missions, coverage_metrics, fit_gmm, rightmost_component_stats,
    rr_histogram, AnalysisReport, ComparisonReport, CoverageMetrics, GmmComponent, GmmFit,
    Histogram, MissionSummary,
};
pub use error::{Error, Result};
pub use pdmodel::{
    effective_range, fit_curve, synth_curve, PdCurve, PdCurveParams, PdSample, DEFAULT_PD_THRESHOLD,
};
pub use planner::{
    layout_tracks, pair_period, polygon_adaptation, replan, tracks_needed, RangeInterval,
};
pub use simulator::{
    ensonify, run_mission, sample_pd_observations, MissionConfig, MissionResult, ReplanDecision,
    RiskGrid, Strategy,
};
pub use survey::{validate_sensor, SensorSpec, SurveyArea, DEFAULT_CELL_SIZE_M};
pub use track::{PairIndex, Track, TrackPlan};
