//! Mission execution over a gridded survey area.
//!
//! The simulator ensonifies a residual-risk grid track by track. Each cell
//! keeps the running product of `1 - Pd` over every look it has received,
//! so an untouched cell carries maximum risk 1 and every additional look
//! can only lower it. The hidden true curve and the hard true range govern
//! what data exists regardless of what the planner assumed.
//!
//! An adaptive mission alternates execution and estimation: after each
//! completed pair it samples noisy detection observations from the true
//! curve, fits a fresh curve, recomputes the effective range and replans
//! whatever width is still uncovered.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::analysis::{coverage_metrics, CoverageMetrics};
use crate::error::{Error, Result};
use crate::pdmodel::{effective_range, fit_curve, PdCurve, PdSample};
use crate::planner::{layout_tracks, replan};
use crate::survey::{validate_sensor, SensorSpec, SurveyArea};
use crate::track::{PairIndex, Track, TrackPlan};

/// Residual-risk grid: sweep-axis columns by track-axis rows.
///
/// Stores per cell the accumulated residual risk, the look tally and the
/// lateral range of every recorded look, so the risk can be recomputed
/// from first principles.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskGrid {
    n_sweep: usize,
    n_along: usize,
    cell_size_m: f64,
    rr: Vec<f64>,
    look_counts: Vec<u32>,
    look_ranges: Vec<Vec<f64>>,
}

impl RiskGrid {
    pub fn new(area: &SurveyArea) -> Self {
        let n_sweep = area.cells_sweep();
        let n_along = area.cells_along();
        let n = n_sweep * n_along;
        Self {
            n_sweep,
            n_along,
            cell_size_m: area.cell_size_m,
            rr: vec![1.0; n],
            look_counts: vec![0; n],
            look_ranges: vec![Vec::new(); n],
        }
    }

    pub fn n_sweep(&self) -> usize {
        self.n_sweep
    }

    pub fn n_along(&self) -> usize {
        self.n_along
    }

    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    fn idx(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.n_sweep && row < self.n_along);
        col * self.n_along + row
    }

    pub fn rr_at(&self, col: usize, row: usize) -> f64 {
        self.rr[self.idx(col, row)]
    }

    pub fn look_count_at(&self, col: usize, row: usize) -> u32 {
        self.look_counts[self.idx(col, row)]
    }

    pub fn look_ranges_at(&self, col: usize, row: usize) -> &[f64] {
        &self.look_ranges[self.idx(col, row)]
    }

    /// Sweep-axis centre of a column, metres.
    pub fn col_center_m(&self, col: usize) -> f64 {
        (col as f64 + 0.5) * self.cell_size_m
    }

    /// Residual-risk values of all covered cells (risk strictly below 1)
    /// inside the margin-trimmed region.
    pub fn covered_values(&self, margin_cells: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for col in margin_cells..self.n_sweep.saturating_sub(margin_cells) {
            for row in margin_cells..self.n_along.saturating_sub(margin_cells) {
                let v = self.rr_at(col, row);
                if v < 1.0 {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Number of uncovered cells (risk exactly 1) inside the margin.
    pub fn uncovered_in_margin(&self, margin_cells: usize) -> usize {
        let mut n = 0;
        for col in margin_cells..self.n_sweep.saturating_sub(margin_cells) {
            for row in margin_cells..self.n_along.saturating_sub(margin_cells) {
                if self.rr_at(col, row) == 1.0 {
                    n += 1;
                }
            }
        }
        n
    }

    /// Cells analysed once the margin is trimmed.
    pub fn analyzed_cells(&self, margin_cells: usize) -> usize {
        self.n_sweep.saturating_sub(2 * margin_cells)
            * self.n_along.saturating_sub(2 * margin_cells)
    }

    /// Text form: one header line with dimensions and cell size, then one
    /// line of comma-separated risk values per sweep column.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# risk_grid v1 {} {} {}\n",
            self.n_sweep, self.n_along, self.cell_size_m
        );
        for col in 0..self.n_sweep {
            let row_vals: Vec<String> = (0..self.n_along)
                .map(|row| format!("{}", self.rr_at(col, row)))
                .collect();
            s.push_str(&row_vals.join(","));
            s.push('\n');
        }
        s
    }

    /// Look-count grid in the same schema as [`RiskGrid::to_text`].
    pub fn looks_to_text(&self) -> String {
        let mut s = format!(
            "# look_grid v1 {} {} {}\n",
            self.n_sweep, self.n_along, self.cell_size_m
        );
        for col in 0..self.n_sweep {
            let row_vals: Vec<String> = (0..self.n_along)
                .map(|row| format!("{}", self.look_count_at(col, row)))
                .collect();
            s.push_str(&row_vals.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses a risk grid written by [`RiskGrid::to_text`]. Imported grids
    /// carry risk values only; look records are not serialised.
    pub fn from_text(text: &str) -> Result<Self> {
        let header = text
            .lines()
            .next()
            .ok_or_else(|| Error::parse(1, "empty grid file"))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 6 || parts[0] != "#" || parts[1] != "risk_grid" || parts[2] != "v1" {
            return Err(Error::parse(
                1,
                format!("expected '# risk_grid v1 <sweep> <track> <cell>', got '{header}'"),
            ));
        }
        let n_sweep: usize = parts[3]
            .parse()
            .map_err(|_| Error::parse(1, "bad sweep dimension"))?;
        let n_along: usize = parts[4]
            .parse()
            .map_err(|_| Error::parse(1, "bad track dimension"))?;
        let cell_size_m: f64 = parts[5]
            .parse()
            .map_err(|_| Error::parse(1, "bad cell size"))?;
        if n_sweep == 0 || n_along == 0 || cell_size_m.is_nan() || cell_size_m <= 0.0 {
            return Err(Error::parse(1, "degenerate grid dimensions"));
        }
        let mut rr = Vec::with_capacity(n_sweep * n_along);
        let mut n_lines = 0;
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(n + 1, "invalid risk value"))?;
            if vals.len() != n_along {
                return Err(Error::parse(
                    n + 1,
                    format!("expected {n_along} values, got {}", vals.len()),
                ));
            }
            if vals.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::parse(n + 1, "risk value outside [0, 1]"));
            }
            rr.extend(vals);
            n_lines += 1;
        }
        if n_lines != n_sweep {
            return Err(Error::parse(
                n_lines + 1,
                format!("expected {n_sweep} data lines, got {n_lines}"),
            ));
        }
        let n = n_sweep * n_along;
        Ok(Self {
            n_sweep,
            n_along,
            cell_size_m,
            rr,
            look_counts: vec![0; n],
            look_ranges: vec![Vec::new(); n],
        })
    }
}

/// Applies one track pass to the grid.
///
/// Every cell whose centre lies laterally between the nadir gap and the
/// hard true range receives a look: its risk is multiplied by
/// `1 - true_curve(y)` and the look is recorded. Cells outside that band
/// are untouched no matter what range the planner assumed; swath portions
/// outside the grid clip away naturally.
pub fn ensonify(grid: &mut RiskGrid, track: &Track, true_curve: &PdCurve, r_true_m: f64) {
    let r_min = true_curve.r_min_m();
    for col in 0..grid.n_sweep {
        let y = (grid.col_center_m(col) - track.x_m).abs();
        if y < r_min || y > r_true_m {
            continue;
        }
        let pd = true_curve.eval(y);
        if pd <= 0.0 {
            // No detection power means no data collected at this range.
            continue;
        }
        for row in 0..grid.n_along {
            let i = grid.idx(col, row);
            grid.rr[i] *= 1.0 - pd;
            grid.look_counts[i] += 1;
            grid.look_ranges[i].push(y);
        }
    }
}

/// Draws one noisy detection observation per metre of range across
/// `[r_min, r_true]`, clamped to `[0, 1]`. Deterministic for a given
/// generator state.
pub fn sample_pd_observations(
    true_curve: &PdCurve,
    r_min_m: f64,
    r_true_m: f64,
    noise_sd: f64,
    rng: &mut impl Rng,
) -> Vec<PdSample> {
    let normal = Normal::new(0.0, noise_sd.max(0.0)).expect("valid noise sd");
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let y = r_min_m + k as f64;
        if y > r_true_m + 1e-9 {
            break;
        }
        let noise = if noise_sd > 0.0 {
            normal.sample(rng)
        } else {
            0.0
        };
        out.push(PdSample {
            range_m: y,
            pd_obs: (true_curve.eval(y) + noise).clamp(0.0, 1.0),
        });
        k += 1;
    }
    out
}

/// Track layout strategy for a mission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Lay every track up front from the planned range and never adapt.
    Predefined,
    /// Re-estimate the effective range after each pair and replan.
    Adaptive,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predefined" | "control" => Ok(Strategy::Predefined),
            "adaptive" => Ok(Strategy::Adaptive),
            other => Err(Error::InvalidParams(format!(
                "unknown strategy '{other}' (expected predefined|adaptive)"
            ))),
        }
    }
}

/// Everything needed to run one mission.
#[derive(Debug, Clone)]
pub struct MissionConfig {
    pub area: SurveyArea,
    pub sensor: SensorSpec,
    pub strategy: Strategy,
    /// Hidden ground truth the simulator samples and ensonifies from.
    pub true_curve: PdCurve,
    /// Admissibility threshold on detection probability.
    pub threshold: f64,
    /// Standard deviation of the observation noise.
    pub noise_sd: f64,
    pub rng_seed: u64,
    /// Pool samples across all pairs instead of fitting on the latest pair.
    pub pool_samples: bool,
    /// Perimeter cells excluded from coverage accounting.
    pub perimeter_margin_cells: usize,
}

/// One replanning decision of an adaptive mission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplanDecision {
    /// Tracks executed before this decision was taken.
    pub after_track_index: usize,
    /// Effective range fed into the adaptation (the planned range for the
    /// very first decision, before any data exists).
    pub r_eff_m: f64,
    pub r_adpt_m: f64,
    pub tracks_planned: usize,
}

/// Outcome of a mission run.
#[derive(Debug, Clone)]
pub struct MissionResult {
    pub grid: RiskGrid,
    /// Tracks as actually executed, in order.
    pub plan: TrackPlan,
    /// Changes of the adapted range: `(after track index, r_adpt)`.
    pub r_adpt_history: Vec<(usize, f64)>,
    /// Every replanning decision, one per planning round.
    pub decisions: Vec<ReplanDecision>,
    pub metrics: CoverageMetrics,
    /// Last curve estimated from the data (adaptive missions only).
    pub fitted_curve: Option<PdCurve>,
    /// Set when the mission stopped early; the partial grid and plan are
    /// retained.
    pub aborted: Option<String>,
}

impl MissionResult {
    pub fn executed_positions(&self) -> Vec<f64> {
        self.plan.positions()
    }
}

/// Runs one mission to completion (or abort) and returns the grid, the
/// executed plan, the replanning log and coverage metrics.
pub fn run_mission(config: &MissionConfig) -> Result<MissionResult> {
    let sensor = validate_sensor(config.sensor)?;
    if config.threshold.is_nan() || config.threshold <= 0.0 || config.threshold >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "threshold must be in (0, 1), got {}",
            config.threshold
        )));
    }
    match config.strategy {
        Strategy::Predefined => run_predefined(config, sensor),
        Strategy::Adaptive => run_adaptive(config, sensor),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    config: &MissionConfig,
    grid: RiskGrid,
    executed: Vec<Track>,
    covered: f64,
    r_adpt_history: Vec<(usize, f64)>,
    decisions: Vec<ReplanDecision>,
    fitted_curve: Option<PdCurve>,
    aborted: Option<String>,
) -> Result<MissionResult> {
    let mut metrics = coverage_metrics(&grid, config.perimeter_margin_cells);
    metrics.n_tracks = executed.len();
    metrics.path_length_m = executed.len() as f64 * config.area.length_m;
    Ok(MissionResult {
        grid,
        plan: TrackPlan {
            tracks: executed,
            covered_up_to_m: covered,
        },
        r_adpt_history,
        decisions,
        metrics,
        fitted_curve,
        aborted,
    })
}

fn run_predefined(config: &MissionConfig, sensor: SensorSpec) -> Result<MissionResult> {
    let plan = layout_tracks(config.area.width_m, sensor.r_planned_m, sensor.r_min_m, 0.0)?;
    let mut grid = RiskGrid::new(&config.area);
    for track in &plan.tracks {
        ensonify(&mut grid, track, &config.true_curve, sensor.r_true_m);
    }
    let decisions = vec![ReplanDecision {
        after_track_index: 0,
        r_eff_m: sensor.r_planned_m,
        r_adpt_m: sensor.r_planned_m,
        tracks_planned: plan.n_tracks(),
    }];
    let covered = plan.covered_up_to_m;
    finish(
        config,
        grid,
        plan.tracks,
        covered,
        vec![(0, sensor.r_planned_m)],
        decisions,
        None,
        None,
    )
}

fn run_adaptive(config: &MissionConfig, sensor: SensorSpec) -> Result<MissionResult> {
    let width = config.area.width_m;
    let r_min = sensor.r_min_m;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut grid = RiskGrid::new(&config.area);
    let mut executed: Vec<Track> = Vec::new();
    let mut pooled: Vec<PdSample> = Vec::new();
    let mut covered = 0.0_f64;
    let mut r_eff = sensor.r_planned_m;
    let mut pair_counter = 0usize;
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut decisions: Vec<ReplanDecision> = Vec::new();
    let mut fitted: Option<PdCurve> = None;
    let mut aborted: Option<String> = None;

    while covered < width - 1e-9 {
        let (r_adpt, plan) = match replan(covered, width, r_eff, r_min) {
            Ok(v) => v,
            Err(e @ Error::NoAdmissibleRange { .. }) => {
                aborted = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        decisions.push(ReplanDecision {
            after_track_index: executed.len(),
            r_eff_m: r_eff,
            r_adpt_m: r_adpt,
            tracks_planned: plan.n_tracks(),
        });
        if history.last().map(|(_, r)| *r) != Some(r_adpt) {
            history.push((executed.len(), r_adpt));
        }

        // Execute the leading pair of the fresh plan, or the lone single
        // when the residual strip needs only one more track.
        let take = match plan.tracks.first() {
            Some(t) if t.pair_index == PairIndex::Single => 1,
            Some(_) => 2,
            None => break,
        };
        let mut pair_samples: Vec<PdSample> = Vec::new();
        for t in plan.tracks.iter().take(take) {
            let renumbered = Track {
                x_m: t.x_m,
                pair_index: match t.pair_index {
                    PairIndex::Pair(_) => PairIndex::Pair(pair_counter),
                    PairIndex::Single => PairIndex::Single,
                },
                r_used_m: t.r_used_m,
            };
            ensonify(&mut grid, &renumbered, &config.true_curve, sensor.r_true_m);
            pair_samples.extend(sample_pd_observations(
                &config.true_curve,
                r_min,
                sensor.r_true_m,
                config.noise_sd,
                &mut rng,
            ));
            executed.push(renumbered);
        }
        covered = if take == 2 {
            pair_counter += 1;
            executed[executed.len() - 1].x_m + r_adpt
        } else {
            plan.covered_up_to_m
        };
        if covered >= width - 1e-9 {
            break;
        }

        // Estimate a fresh curve from the data just collected.
        let samples: &[PdSample] = if config.pool_samples {
            pooled.extend(pair_samples.iter().copied());
            &pooled
        } else {
            &pair_samples
        };
        let support = samples
            .iter()
            .map(|s| s.range_m)
            .fold(f64::NEG_INFINITY, f64::max);
        match fit_curve(samples, r_min, support).and_then(|c| {
            let r = effective_range(&c, config.threshold)?;
            Ok((c, r))
        }) {
            Ok((curve, r)) => {
                fitted = Some(curve);
                r_eff = r;
            }
            Err(e @ (Error::NoAdmissibleRange { .. } | Error::InsufficientData(_))) => {
                aborted = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }

    finish(
        config, grid, executed, covered, history, decisions, fitted, aborted,
    )
}
