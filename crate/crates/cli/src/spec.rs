//! Experiment spec files: flat `key = value` text with `[section]` headers.
//!
//! The format is deliberately plain so specs diff well and parse without
//! any dependency. Unknown sections or keys are rejected rather than
//! silently ignored.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use swathplan_core::{
    synth_curve, Error, MissionConfig, PdCurveParams, Result, SensorSpec, Strategy, SurveyArea,
};

/// A parsed experiment definition: one survey scenario run with both a
/// predefined control mission and an adaptive mission.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
    pub gmm_components: usize,
    pub area: SurveyArea,
    pub sensor: SensorSpec,
    pub curve_params: PdCurveParams,
    /// Support bound of the true curve; defaults to the true range.
    pub curve_support_m: f64,
    pub threshold: f64,
    pub noise_sd: f64,
    pub perimeter_margin_cells: usize,
    pub histogram_bins: usize,
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut seed: u64 = 0;
        let mut gmm_components: usize = 2;
        let mut width = None;
        let mut length = None;
        let mut cell_size = swathplan_core::DEFAULT_CELL_SIZE_M;
        let mut r_min = None;
        let mut r_planned = None;
        let mut r_true = None;
        let mut curve = PdCurveParams::default();
        let mut support: Option<f64> = None;
        let mut threshold = swathplan_core::DEFAULT_PD_THRESHOLD;
        let mut noise_sd = 0.02;
        let mut margin: usize = 2;
        let mut bins: usize = 25;
        let mut output_dir = None;

        let mut section = String::new();
        let mut seen: HashSet<String> = HashSet::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(sec) = line.strip_prefix('[') {
                let sec = sec
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line_no, "unterminated section header"))?
                    .trim();
                match sec {
                    "experiment" | "area" | "sensor" | "curve" | "run" => {
                        section = sec.to_string();
                    }
                    other => {
                        return Err(Error::parse(line_no, format!("unknown section '{other}'")))
                    }
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(line_no, format!("expected 'key = value', got '{line}'"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let qualified = format!("{section}.{key}");
            if !seen.insert(qualified.clone()) {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate key '{qualified}'"),
                ));
            }

            let parse_f64 = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("invalid number '{v}' for {key}")))
            };
            let parse_usize = |v: &str| -> Result<usize> {
                v.parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("invalid integer '{v}' for {key}")))
            };

            match qualified.as_str() {
                "experiment.name" => name = Some(value.to_string()),
                "experiment.seed" => {
                    seed = value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid seed '{value}'")))?
                }
                "experiment.gmm_components" => gmm_components = parse_usize(value)?,
                "area.width_m" => width = Some(parse_f64(value)?),
                "area.length_m" => length = Some(parse_f64(value)?),
                "area.cell_size_m" => cell_size = parse_f64(value)?,
                "sensor.r_min_m" => r_min = Some(parse_f64(value)?),
                "sensor.r_planned_m" => r_planned = Some(parse_f64(value)?),
                "sensor.r_true_m" => r_true = Some(parse_f64(value)?),
                "curve.peak_range_m" => curve.peak_range_m = parse_f64(value)?,
                "curve.peak_pd" => curve.peak_pd = parse_f64(value)?,
                "curve.rise_width_m" => curve.rise_width_m = parse_f64(value)?,
                "curve.fall_width_m" => curve.fall_width_m = parse_f64(value)?,
                "curve.support_m" => support = Some(parse_f64(value)?),
                "run.threshold" => threshold = parse_f64(value)?,
                "run.noise_sd" => noise_sd = parse_f64(value)?,
                "run.perimeter_margin_cells" => margin = parse_usize(value)?,
                "run.histogram_bins" => bins = parse_usize(value)?,
                "run.output_dir" => output_dir = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::parse(line_no, format!("unknown key '{other}'")));
                }
            }
        }

        let name = name.ok_or_else(|| Error::parse(0, "missing experiment.name"))?;
        let width = width.ok_or_else(|| Error::parse(0, "missing area.width_m"))?;
        let length = length.ok_or_else(|| Error::parse(0, "missing area.length_m"))?;
        let r_min = r_min.ok_or_else(|| Error::parse(0, "missing sensor.r_min_m"))?;
        let r_planned = r_planned.ok_or_else(|| Error::parse(0, "missing sensor.r_planned_m"))?;
        let r_true = r_true.ok_or_else(|| Error::parse(0, "missing sensor.r_true_m"))?;

        let area = SurveyArea::new(width, length, cell_size)?;
        let sensor = SensorSpec::new(r_min, r_planned, r_true);
        swathplan_core::validate_sensor(sensor)?;
        let curve_support_m = support.unwrap_or(r_true);
        // Surface bad curve parameters at parse time, not mid-mission.
        synth_curve(&curve, r_min, curve_support_m)?;

        Ok(Self {
            output_dir: output_dir.unwrap_or_else(|| PathBuf::from("out").join(&name)),
            name,
            seed,
            gmm_components,
            area,
            sensor,
            curve_params: curve,
            curve_support_m,
            threshold,
            noise_sd,
            perimeter_margin_cells: margin,
            histogram_bins: bins,
        })
    }

    /// Mission configuration for one strategy; control and adaptive runs
    /// share the seed and the true curve.
    pub fn mission_config(&self, strategy: Strategy) -> Result<MissionConfig> {
        Ok(MissionConfig {
            area: self.area,
            sensor: self.sensor,
            strategy,
            true_curve: synth_curve(
                &self.curve_params,
                self.sensor.r_min_m,
                self.curve_support_m,
            )?,
            threshold: self.threshold,
            noise_sd: self.noise_sd,
            rng_seed: self.seed,
            pool_samples: false,
            perimeter_margin_cells: self.perimeter_margin_cells,
        })
    }
}
