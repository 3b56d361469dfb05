//! Survey area and sensor geometry.
//!
//! The survey region is a rectangle. Tracks are straight lines running
//! parallel to the `length_m` side; the planner only reasons about
//! positions along the perpendicular sweep axis (`width_m`). The
//! side-looking sonar ensonifies two lateral strips per track, one on each
//! side, between the nadir half-gap `r_min_m` and the sensor range.

use crate::error::{Error, Result};

/// Default grid resolution in metres.
pub const DEFAULT_CELL_SIZE_M: f64 = 5.0;

/// Rectangular survey region gridded into square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyArea {
    /// Extent along the sweep axis (perpendicular to the tracks), metres.
    pub width_m: f64,
    /// Extent along the track direction, metres.
    pub length_m: f64,
    /// Grid cell edge, metres.
    pub cell_size_m: f64,
}

impl SurveyArea {
    pub fn new(width_m: f64, length_m: f64, cell_size_m: f64) -> Result<Self> {
        let finite = width_m.is_finite() && length_m.is_finite() && cell_size_m.is_finite();
        if !finite || width_m <= 0.0 || length_m <= 0.0 || cell_size_m <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "survey area requires positive width, length and cell size, got {width_m} x {length_m} at {cell_size_m}"
            )));
        }
        Ok(Self {
            width_m,
            length_m,
            cell_size_m,
        })
    }

    /// Area with the default 5 m cells.
    pub fn with_default_cell(width_m: f64, length_m: f64) -> Result<Self> {
        Self::new(width_m, length_m, DEFAULT_CELL_SIZE_M)
    }

    /// Cell count along the sweep axis. A partial trailing cell is promoted
    /// to a full cell so the grid always covers the whole extent.
    pub fn cells_sweep(&self) -> usize {
        cell_count(self.width_m, self.cell_size_m)
    }

    /// Cell count along the track axis.
    pub fn cells_along(&self) -> usize {
        cell_count(self.length_m, self.cell_size_m)
    }
}

fn cell_count(extent_m: f64, cell_m: f64) -> usize {
    ((extent_m / cell_m) - 1e-9).ceil().max(1.0) as usize
}

/// Side-looking sonar ranges, all in metres per side of the track.
///
/// `r_planned_m` is what the operator assumes before the mission;
/// `r_true_m` is the hard limit beyond which the simulator collects no
/// data. They differ in the overestimated-range scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSpec {
    /// Nadir half-gap: blind strip directly under the vehicle.
    pub r_min_m: f64,
    /// Operator-assumed maximum range.
    pub r_planned_m: f64,
    /// Hard ensonification limit actually realised in the water.
    pub r_true_m: f64,
}

impl SensorSpec {
    pub fn new(r_min_m: f64, r_planned_m: f64, r_true_m: f64) -> Self {
        Self {
            r_min_m,
            r_planned_m,
            r_true_m,
        }
    }

    /// Smallest range at which paired tracks can cover each other's nadir
    /// gap: three times the half-gap.
    pub fn pairing_floor_m(&self) -> f64 {
        3.0 * self.r_min_m
    }
}

/// Checks that paired tracks are feasible for this sensor.
///
/// Each track of a pair must ensonify the other's nadir gap, which works
/// out to `r_planned >= 3 * r_min`. A spec that violates the bound cannot
/// be planned with the paired-track model at all.
pub fn validate_sensor(spec: SensorSpec) -> Result<SensorSpec> {
    if !spec.r_min_m.is_finite() || spec.r_min_m <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "nadir gap must be positive, got {}",
            spec.r_min_m
        )));
    }
    if spec.r_true_m < spec.r_min_m {
        return Err(Error::InvalidParams(format!(
            "true range {} m is below the nadir gap {} m",
            spec.r_true_m, spec.r_min_m
        )));
    }
    if spec.r_planned_m < spec.pairing_floor_m() {
        return Err(Error::InfeasiblePairing {
            r_min_m: spec.r_min_m,
            range_m: spec.r_planned_m,
        });
    }
    Ok(spec)
}
