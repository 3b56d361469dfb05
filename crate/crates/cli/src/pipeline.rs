//! Runs missions from a spec and writes the output artifacts.
//!
//! Everything is plain text so downstream plotting can happen anywhere.
//! Files are written atomically (temp file then rename) and contain no
//! timestamps, so identical runs produce byte-identical trees.

use std::path::{Path, PathBuf};

use swathplan_core::{
    compare_missions, run_mission, ComparisonReport, Error, MissionResult, Result, Strategy,
};

use crate::spec::ExperimentSpec;

/// Environment variable that redirects relative output directories.
pub const OUT_ROOT_ENV: &str = "SWATHPLAN_OUT_ROOT";

/// Resolves the effective output directory: an explicit override wins,
/// then the spec's own directory, both re-rooted under `SWATHPLAN_OUT_ROOT`
/// when that is set and the path is relative.
pub fn resolve_out_dir(spec: &ExperimentSpec, cli_override: Option<&Path>) -> PathBuf {
    let dir = cli_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| spec.output_dir.clone());
    match std::env::var_os(OUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir,
    }
}

/// Atomic text write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err =
        |e: std::io::Error| Error::InvalidParams(format!("cannot write {}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

fn decisions_text(result: &MissionResult) -> String {
    let mut s = String::from("# replan_log v1\n# after_track r_eff r_adpt tracks_planned\n");
    for d in &result.decisions {
        s.push_str(&format!(
            "{} {} {} {}\n",
            d.after_track_index, d.r_eff_m, d.r_adpt_m, d.tracks_planned
        ));
    }
    s
}

/// Writes the artifact set of one mission under `dir` with a strategy
/// prefix: risk grid, look grid, executed plan, replanning log and, for
/// adaptive runs, the last fitted curve.
pub fn write_mission_artifacts(dir: &Path, prefix: &str, result: &MissionResult) -> Result<()> {
    write_atomic(
        &dir.join(format!("{prefix}_risk.csv")),
        &result.grid.to_text(),
    )?;
    write_atomic(
        &dir.join(format!("{prefix}_looks.csv")),
        &result.grid.looks_to_text(),
    )?;
    write_atomic(
        &dir.join(format!("{prefix}_plan.txt")),
        &result.plan.to_table(),
    )?;
    write_atomic(
        &dir.join(format!("{prefix}_decisions.txt")),
        &decisions_text(result),
    )?;
    if let Some(curve) = &result.fitted_curve {
        write_atomic(&dir.join(format!("{prefix}_curve.txt")), &curve.to_text())?;
    }
    if let Some(reason) = &result.aborted {
        write_atomic(
            &dir.join(format!("{prefix}_aborted.txt")),
            &format!("{reason}\n"),
        )?;
    }
    Ok(())
}

/// Result of running one experiment end to end.
pub struct ExperimentOutcome {
    pub control: MissionResult,
    pub adaptive: MissionResult,
    /// Present when both missions completed.
    pub report: Option<ComparisonReport>,
    pub out_dir: PathBuf,
}

impl ExperimentOutcome {
    pub fn aborted(&self) -> bool {
        self.control.aborted.is_some() || self.adaptive.aborted.is_some()
    }
}

/// Runs the control and adaptive missions of a spec with identical seeds
/// and true curve, writes all artifacts and the side-by-side report.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentOutcome> {
    let control = run_mission(&spec.mission_config(Strategy::Predefined)?)?;
    let adaptive = run_mission(&spec.mission_config(Strategy::Adaptive)?)?;

    write_mission_artifacts(out_dir, "control", &control)?;
    write_mission_artifacts(out_dir, "adaptive", &adaptive)?;

    let report = if control.aborted.is_none() && adaptive.aborted.is_none() {
        let report = compare_missions(
            &control,
            &adaptive,
            spec.gmm_components,
            spec.perimeter_margin_cells,
            spec.seed,
        )?;
        write_atomic(&out_dir.join("comparison.txt"), &report.render_table())?;
        write_atomic(&out_dir.join("comparison.kv"), &report.render_kv())?;
        Some(report)
    } else {
        None
    };

    Ok(ExperimentOutcome {
        control,
        adaptive,
        report,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Runs a single mission from a spec and writes its artifacts.
pub fn run_single(
    spec: &ExperimentSpec,
    strategy: Strategy,
    out_dir: &Path,
) -> Result<MissionResult> {
    let prefix = match strategy {
        Strategy::Predefined => "control",
        Strategy::Adaptive => "adaptive",
    };
    let result = run_mission(&spec.mission_config(strategy)?)?;
    write_mission_artifacts(out_dir, prefix, &result)?;
    Ok(result)
}
