//! Shared fixtures for the benchmark suite.

use swathplan_core::{synth_curve, MissionConfig, PdCurveParams, SensorSpec, Strategy, SurveyArea};

/// The optimum-range survey scenario at full desk scale, adaptive strategy.
pub fn optimum_range_mission() -> MissionConfig {
    MissionConfig {
        area: SurveyArea::with_default_cell(1212.0, 400.0).expect("valid area"),
        sensor: SensorSpec::new(40.0, 130.0, 130.0),
        strategy: Strategy::Adaptive,
        true_curve: synth_curve(&PdCurveParams::default(), 40.0, 130.0).expect("valid curve"),
        threshold: 0.05,
        noise_sd: 0.02,
        rng_seed: 3,
        pool_samples: false,
        perimeter_margin_cells: 2,
    }
}
