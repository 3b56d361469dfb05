//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by planning, simulation and analysis operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Paired tracks cannot cover each other's nadir gap: the available
    /// range is below three times the nadir half-gap.
    #[error(
        "paired tracks infeasible: range {range_m} m is below 3 x nadir gap ({} m)",
        3.0 * r_min_m
    )]
    InfeasiblePairing { r_min_m: f64, range_m: f64 },

    /// The detection-probability curve never reaches the admissibility
    /// threshold, so no effective range exists.
    #[error("pd curve never reaches threshold {threshold}")]
    NoAdmissibleRange { threshold: f64 },

    /// A parameter violated its documented precondition.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Not enough observations to estimate a curve over the requested span.
    #[error("insufficient samples: {0}")]
    InsufficientData(String),

    /// A mixture component collapsed onto a point mass and restarting with
    /// fresh seeds did not help.
    #[error("mixture component collapsed (sd < {min_sd}) after {attempts} seeded attempts")]
    DegenerateComponent { min_sd: f64, attempts: u32 },

    /// An analysis was requested on a grid with no covered cells.
    #[error("no data: every cell is uncovered")]
    EmptyData,

    /// Two missions being compared were run over different areas.
    #[error("mission areas differ: {0}")]
    AreaMismatch(String),

    /// A text artifact (grid, curve, experiment spec) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for [`Error::Parse`].
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
