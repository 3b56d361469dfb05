//! Range-dependent detection-probability curves.
//!
//! Image quality from a side-looking sonar degrades towards both ends of
//! the swath: close to the nadir gap and out at the range limit. Everything
//! the planner does is driven by a curve mapping lateral range to the
//! probability of detecting a target at that range. This module provides
//! the curve representation, a synthetic parametric generator used by the
//! simulator as ground truth, an estimator that fits a curve to noisy
//! per-range observations, and the threshold crossing that turns a curve
//! into an effective range.
//!
//! Curves are piecewise linear over knots at 1 m spacing, matching the
//! 1 m discretisation of the planner's range search.

use crate::error::{Error, Result};

/// Piecewise-linear detection-probability curve on 1 m knots.
///
/// The value is clamped to zero inside the nadir gap (`y < r_min_m`) and
/// beyond the support bound. Over its support the curve is unimodal: it
/// rises to a single peak and falls off after it.
#[derive(Debug, Clone, PartialEq)]
pub struct PdCurve {
    r_min_m: f64,
    /// knots[i] is the probability at lateral range i metres.
    knots: Vec<f64>,
}

impl PdCurve {
    /// Builds a curve from knot values at 0, 1, 2, ... metres, validating
    /// range, clamping and unimodality.
    pub fn from_knots(knots: Vec<f64>, r_min_m: f64) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParams(
                "a pd curve needs at least two knots".into(),
            ));
        }
        if !r_min_m.is_finite() || r_min_m < 0.0 {
            return Err(Error::InvalidParams(format!(
                "nadir gap must be non-negative, got {r_min_m}"
            )));
        }
        for (i, v) in knots.iter().enumerate() {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidParams(format!(
                    "knot {i} is outside [0, 1]: {v}"
                )));
            }
            if (i as f64) < r_min_m && *v != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "knot {i} lies inside the nadir gap but is nonzero"
                )));
            }
        }
        check_unimodal(&knots)?;
        Ok(Self { r_min_m, knots })
    }

    pub fn r_min_m(&self) -> f64 {
        self.r_min_m
    }

    /// Upper support bound: the last knot's range.
    pub fn support_m(&self) -> f64 {
        (self.knots.len() - 1) as f64
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Detection probability at lateral range `y_m`, linear between knots,
    /// zero inside the nadir gap and beyond the support.
    pub fn eval(&self, y_m: f64) -> f64 {
        if y_m < self.r_min_m || y_m > self.support_m() || y_m.is_nan() {
            return 0.0;
        }
        let i = y_m.floor() as usize;
        if i + 1 >= self.knots.len() {
            return self.knots[self.knots.len() - 1];
        }
        let frac = y_m - i as f64;
        self.knots[i] * (1.0 - frac) + self.knots[i + 1] * frac
    }

    /// Two-column text form: `range_m pd`, one knot per line.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# pd_curve v1\n");
        for (i, v) in self.knots.iter().enumerate() {
            s.push_str(&format!("{i} {v}\n"));
        }
        s
    }

    /// Parses the text form written by [`PdCurve::to_text`]. The nadir gap
    /// is inferred as the range of the first nonzero knot.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "# pd_curve v1" => {}
            Some((n, h)) => {
                return Err(Error::parse(
                    n + 1,
                    format!("expected '# pd_curve v1', got '{h}'"),
                ))
            }
            None => return Err(Error::parse(1, "empty curve file")),
        }
        let mut knots = Vec::new();
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let range: usize = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::parse(n + 1, "missing or invalid range column"))?;
            let pd: f64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::parse(n + 1, "missing or invalid pd column"))?;
            if range != knots.len() {
                return Err(Error::parse(
                    n + 1,
                    format!(
                        "knot ranges must be consecutive integers, expected {}",
                        knots.len()
                    ),
                ));
            }
            knots.push(pd);
        }
        let r_min = knots
            .iter()
            .position(|v| *v > 0.0)
            .map(|i| i as f64)
            .unwrap_or(0.0);
        Self::from_knots(knots, r_min)
    }
}

fn check_unimodal(knots: &[f64]) -> Result<()> {
    const TOL: f64 = 1e-12;
    let peak = knots
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    for i in 1..=peak {
        if knots[i] < knots[i - 1] - TOL {
            return Err(Error::InvalidParams(format!(
                "curve is not unimodal: dip at knot {i} before the peak"
            )));
        }
    }
    for i in peak + 1..knots.len() {
        if knots[i] > knots[i - 1] + TOL {
            return Err(Error::InvalidParams(format!(
                "curve is not unimodal: rise at knot {i} after the peak"
            )));
        }
    }
    Ok(())
}

/// Parameters of the synthetic asymmetric bell curve.
///
/// The default peak sits at 70 m with probability 0.4. The fall-off width
/// is calibrated so the default curve crosses the 0.05 admissibility
/// threshold at exactly 130 m, the nominal good-data limit of the sensor
/// this model stands in for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdCurveParams {
    pub peak_range_m: f64,
    pub peak_pd: f64,
    pub rise_width_m: f64,
    pub fall_width_m: f64,
}

/// Default admissibility threshold separating good from bad data.
pub const DEFAULT_PD_THRESHOLD: f64 = 0.05;

const DEFAULT_PEAK_RANGE_M: f64 = 70.0;
const DEFAULT_PEAK_PD: f64 = 0.4;
const NOMINAL_GOOD_LIMIT_M: f64 = 130.0;

impl Default for PdCurveParams {
    fn default() -> Self {
        Self {
            peak_range_m: DEFAULT_PEAK_RANGE_M,
            peak_pd: DEFAULT_PEAK_PD,
            rise_width_m: 15.0,
            fall_width_m: default_fall_width_m(),
        }
    }
}

/// Width that makes the default bell hit `DEFAULT_PD_THRESHOLD` at the
/// nominal 130 m limit: solve peak_pd * exp(-d^2 / (2 w^2)) = threshold.
pub fn default_fall_width_m() -> f64 {
    let d = NOMINAL_GOOD_LIMIT_M - DEFAULT_PEAK_RANGE_M;
    d / (2.0 * (DEFAULT_PEAK_PD / DEFAULT_PD_THRESHOLD).ln()).sqrt()
}

/// One observation of detection quality at a lateral range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdSample {
    pub range_m: f64,
    pub pd_obs: f64,
}

/// Builds an asymmetric Gaussian bell curve, clamped to zero outside
/// `[r_min_m, support_m]`.
///
/// Below the peak the rise width applies, at and above it the fall width,
/// so the two flanks can decay at different rates.
pub fn synth_curve(params: &PdCurveParams, r_min_m: f64, support_m: f64) -> Result<PdCurve> {
    if !r_min_m.is_finite() || !support_m.is_finite() || r_min_m <= 0.0 || support_m <= r_min_m {
        return Err(Error::InvalidParams(format!(
            "need 0 < r_min ({r_min_m}) < support ({support_m})"
        )));
    }
    if params.peak_range_m.is_nan()
        || params.peak_range_m <= r_min_m
        || params.peak_range_m >= support_m
    {
        return Err(Error::InvalidParams(format!(
            "peak range {} must lie inside ({r_min_m}, {support_m})",
            params.peak_range_m
        )));
    }
    if params.peak_pd.is_nan() || params.peak_pd <= 0.0 || params.peak_pd > 1.0 {
        return Err(Error::InvalidParams(format!(
            "peak pd must be in (0, 1], got {}",
            params.peak_pd
        )));
    }
    if !(params.rise_width_m.is_finite() && params.fall_width_m.is_finite())
        || params.rise_width_m <= 0.0
        || params.fall_width_m <= 0.0
    {
        return Err(Error::InvalidParams(
            "spread widths must be positive".into(),
        ));
    }

    let n = (support_m + 1e-9).floor() as usize;
    let knots: Vec<f64> = (0..=n)
        .map(|i| {
            let y = i as f64;
            if y < r_min_m || y > support_m {
                0.0
            } else {
                let w = if y < params.peak_range_m {
                    params.rise_width_m
                } else {
                    params.fall_width_m
                };
                let d = y - params.peak_range_m;
                params.peak_pd * (-d * d / (2.0 * w * w)).exp()
            }
        })
        .collect();
    PdCurve::from_knots(knots, r_min_m)
}

/// Largest range, at 1 m resolution, where the curve still meets the
/// threshold. This is the effective range that bounds the planner's
/// search interval from above.
pub fn effective_range(curve: &PdCurve, threshold: f64) -> Result<f64> {
    if threshold.is_nan() || threshold <= 0.0 || threshold >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    for (i, v) in curve.knots.iter().enumerate().rev() {
        if *v >= threshold {
            return Ok(i as f64);
        }
    }
    Err(Error::NoAdmissibleRange { threshold })
}

/// Fits a curve to noisy per-range observations.
///
/// Samples are averaged in 5 m range bins, the bin means are smoothed to a
/// unimodal shape by pool-adjacent-violators on each side of the empirical
/// peak, and the result is resampled onto 1 m knots. Requires at least one
/// sample in every 10 m bin across `[r_min_m, support_m]`.
pub fn fit_curve(samples: &[PdSample], r_min_m: f64, support_m: f64) -> Result<PdCurve> {
    if !r_min_m.is_finite() || !support_m.is_finite() || r_min_m <= 0.0 || support_m <= r_min_m {
        return Err(Error::InvalidParams(format!(
            "need 0 < r_min ({r_min_m}) < support ({support_m})"
        )));
    }
    let in_span: Vec<&PdSample> = samples
        .iter()
        .filter(|s| s.range_m >= r_min_m - 1e-9 && s.range_m <= support_m + 1e-9)
        .collect();

    // Coverage precondition at 10 m granularity, final bin right-inclusive.
    let coarse = 10.0;
    let n_coarse = ((support_m - r_min_m) / coarse).ceil().max(1.0) as usize;
    for b in 0..n_coarse {
        let lo = r_min_m + coarse * b as f64;
        let hi = (lo + coarse).min(support_m);
        let last = b + 1 == n_coarse;
        let hit = in_span
            .iter()
            .any(|s| s.range_m >= lo && (s.range_m < hi || (last && s.range_m <= hi + 1e-9)));
        if !hit {
            return Err(Error::InsufficientData(format!(
                "no observations in range bin [{lo}, {hi}] m"
            )));
        }
    }

    // 5 m bins; knot position is the mean observed range so a sparse final
    // bin anchors the curve where its data actually sits.
    let fine = 5.0;
    let n_fine = ((support_m - r_min_m) / fine).ceil().max(1.0) as usize;
    let mut positions = Vec::new();
    let mut means = Vec::new();
    let mut weights = Vec::new();
    let bin_stats = |lo: f64, hi: f64, hi_inclusive: bool| -> Option<(f64, f64, f64)> {
        let bin: Vec<&&PdSample> = in_span
            .iter()
            .filter(|s| {
                s.range_m >= lo && (s.range_m < hi || (hi_inclusive && s.range_m <= hi + 1e-9))
            })
            .collect();
        if bin.is_empty() {
            return None;
        }
        let n = bin.len() as f64;
        Some((
            bin.iter().map(|s| s.range_m).sum::<f64>() / n,
            (bin.iter().map(|s| s.pd_obs).sum::<f64>() / n).clamp(0.0, 1.0),
            n,
        ))
    };
    // Half-bin anchors pin the span boundaries; a flat extension there
    // would misstate steep flanks by more than the fit is allowed to err.
    if let Some((_, mean, n)) = bin_stats(r_min_m, r_min_m + fine / 2.0, false) {
        positions.push(r_min_m);
        means.push(mean);
        weights.push(n);
    }
    for b in 0..n_fine {
        let lo = r_min_m + fine * b as f64;
        let hi = (lo + fine).min(support_m);
        if let Some((pos, mean, n)) = bin_stats(lo, hi, b + 1 == n_fine) {
            if positions.last().is_some_and(|p| pos <= *p) {
                continue;
            }
            if pos >= support_m {
                break;
            }
            positions.push(pos);
            means.push(mean);
            weights.push(n);
        }
    }
    if let Some((_, mean, n)) = bin_stats(support_m - fine / 2.0, support_m, true) {
        positions.push(support_m);
        means.push(mean);
        weights.push(n);
    }

    // Unimodal smoothing around the empirical peak.
    let peak = means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    pav_nondecreasing(&mut means[..=peak], &weights[..=peak]);
    pav_nonincreasing(&mut means[peak..], &weights[peak..]);

    // Resample onto 1 m knots, flat-extended to the span boundaries.
    let n_knots = (support_m + 1e-9).floor() as usize;
    let knots: Vec<f64> = (0..=n_knots)
        .map(|i| {
            let y = i as f64;
            if y < r_min_m || y > support_m {
                0.0
            } else {
                interp(&positions, &means, y).clamp(0.0, 1.0)
            }
        })
        .collect();
    PdCurve::from_knots(knots, r_min_m)
}

/// Linear interpolation through `(xs, ys)` with flat extrapolation.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let j = xs.partition_point(|&p| p <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] * (1.0 - t) + ys[j] * t
}

/// Weighted pool-adjacent-violators for a non-decreasing fit, in place.
fn pav_nondecreasing(values: &mut [f64], weights: &[f64]) {
    // (weighted mean, weight, run length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (v, w) in values.iter().zip(weights) {
        blocks.push((*v, *w, 1));
        while blocks.len() > 1 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            if prev.0 <= last.0 {
                break;
            }
            let w_sum = prev.1 + last.1;
            let merged = (
                (prev.0 * prev.1 + last.0 * last.1) / w_sum,
                w_sum,
                prev.2 + last.2,
            );
            blocks.truncate(blocks.len() - 2);
            blocks.push(merged);
        }
    }
    let mut i = 0;
    for (mean, _, len) in blocks {
        for _ in 0..len {
            values[i] = mean;
            i += 1;
        }
    }
}

fn pav_nonincreasing(values: &mut [f64], weights: &[f64]) {
    let mut rev_v: Vec<f64> = values.iter().rev().copied().collect();
    let rev_w: Vec<f64> = weights.iter().rev().copied().collect();
    pav_nondecreasing(&mut rev_v, &rev_w);
    for (dst, src) in values.iter_mut().zip(rev_v.iter().rev()) {
        *dst = *src;
    }
}
