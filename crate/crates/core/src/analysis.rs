//! Post-mission data-quality analysis.
//!
//! Uncovered cells (risk exactly 1) are routed to coverage accounting and
//! treated as outliers everywhere else; the histogram and the mixture
//! model only ever see covered cells. The mixture fit is a plain 1-D EM
//! with k-means++ seeding, restarted on fresh seeds when a component
//! collapses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simulator::{MissionResult, RiskGrid};

/// Coverage bookkeeping for one mission.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoverageMetrics {
    pub uncovered_cells: usize,
    pub uncovered_area_m2: f64,
    /// Uncovered cells over analysed (margin-trimmed) cells.
    pub uncovered_fraction: f64,
    /// Filled by the mission runner; zero for grids analysed standalone.
    pub n_tracks: usize,
    pub path_length_m: f64,
}

/// Counts uncovered cells inside the margin-trimmed region.
///
/// The margin must leave at least one analysed cell per axis.
pub fn coverage_metrics(grid: &RiskGrid, perimeter_margin_cells: usize) -> CoverageMetrics {
    assert!(
        2 * perimeter_margin_cells < grid.n_sweep().min(grid.n_along()),
        "margin {perimeter_margin_cells} swallows the whole {}x{} grid",
        grid.n_sweep(),
        grid.n_along()
    );
    let uncovered = grid.uncovered_in_margin(perimeter_margin_cells);
    let analyzed = grid.analyzed_cells(perimeter_margin_cells);
    CoverageMetrics {
        uncovered_cells: uncovered,
        uncovered_area_m2: uncovered as f64 * grid.cell_size_m() * grid.cell_size_m(),
        uncovered_fraction: uncovered as f64 / analyzed as f64,
        n_tracks: 0,
        path_length_m: 0.0,
    }
}

/// Histogram of residual-risk values over uniform bins on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub counts: Vec<usize>,
    pub n_values: usize,
}

impl Histogram {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.counts.len() as f64
    }
}

/// Histogram of all covered cells in the grid. Cells at risk 1 are
/// excluded as no-coverage outliers.
pub fn rr_histogram(grid: &RiskGrid, n_bins: usize) -> Result<Histogram> {
    histogram_of(&grid.covered_values(0), n_bins)
}

/// Histogram over pre-extracted risk values.
pub fn histogram_of(values: &[f64], n_bins: usize) -> Result<Histogram> {
    if n_bins < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 bins, got {n_bins}"
        )));
    }
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut counts = vec![0usize; n_bins];
    for v in values {
        let bin = ((v * n_bins as f64) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    Ok(Histogram {
        counts,
        n_values: values.len(),
    })
}

/// One Gaussian mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// A fitted 1-D Gaussian mixture, components sorted by mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub components: Vec<GmmComponent>,
    pub log_likelihood: f64,
    pub n_points: usize,
    /// Log-likelihood after every EM iteration, for monotonicity checks.
    pub ll_history: Vec<f64>,
    /// Seed that produced the returned fit (restarts advance it).
    pub seed_used: u64,
}

const GMM_MIN_SD: f64 = 1e-6;
const GMM_MAX_ITER: usize = 500;
const GMM_LL_TOL: f64 = 1e-8;
const GMM_RESTARTS: u32 = 5;

/// Fits a k-component 1-D Gaussian mixture by expectation-maximisation.
///
/// k = 1 is returned in closed form (sample mean, population sd). Larger k
/// runs EM from a k-means++ seeding until the log-likelihood improves by
/// less than 1e-8 or 500 iterations pass. A component whose sd collapses
/// below 1e-6 triggers a restart with the next seed, up to 5 restarts.
pub fn fit_gmm(values: &[f64], k: usize, rng_seed: u64) -> Result<GmmFit> {
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if k > distinct.len() {
        return Err(Error::InvalidParams(format!(
            "k = {k} exceeds the {} distinct values",
            distinct.len()
        )));
    }

    if k == 1 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        let ll = if sd > 0.0 {
            values.iter().map(|v| ln_normal_pdf(*v, mean, sd)).sum()
        } else {
            f64::INFINITY
        };
        return Ok(GmmFit {
            components: vec![GmmComponent {
                weight: 1.0,
                mean,
                sd,
            }],
            log_likelihood: ll,
            n_points: values.len(),
            ll_history: vec![ll],
            seed_used: rng_seed,
        });
    }

    let mut last_err = None;
    for attempt in 0..=GMM_RESTARTS {
        let seed = rng_seed.wrapping_add(attempt as u64);
        match fit_gmm_once(values, k, seed) {
            Ok(mut fit) => {
                fit.seed_used = seed;
                fit.components.sort_by(|a, b| a.mean.total_cmp(&b.mean));
                return Ok(fit);
            }
            Err(e @ Error::DegenerateComponent { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::DegenerateComponent {
        min_sd: GMM_MIN_SD,
        attempts: GMM_RESTARTS + 1,
    }))
}

fn ln_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
    let z = (x - mean) / sd;
    -LN_SQRT_2PI - sd.ln() - 0.5 * z * z
}

fn fit_gmm_once(values: &[f64], k: usize, seed: u64) -> Result<GmmFit> {
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Residual-risk grids repeat the same value across whole columns, so
    // EM runs over distinct values with multiplicities. Identical in exact
    // arithmetic to iterating the raw points.
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut xs: Vec<f64> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    for v in sorted {
        if xs.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1.0;
        } else {
            xs.push(v);
            counts.push(1.0);
        }
    }
    let m = xs.len();

    // k-means++ seeding, multiplicity-weighted.
    let mut means: Vec<f64> = Vec::with_capacity(k);
    let first_draw = rng.gen_range(0.0..n as f64);
    let mut acc = 0.0;
    let mut first = xs[m - 1];
    for (x, c) in xs.iter().zip(&counts) {
        acc += c;
        if first_draw < acc {
            first = *x;
            break;
        }
    }
    means.push(first);
    while means.len() < k {
        let d2: Vec<f64> = xs
            .iter()
            .zip(&counts)
            .map(|(x, c)| {
                c * means
                    .iter()
                    .map(|mu| (x - mu) * (x - mu))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            // Every remaining mass coincides with a centre; take the next
            // distinct value (one exists because k <= distinct count).
            let next = xs
                .iter()
                .find(|x| !means.contains(x))
                .expect("distinct value available");
            means.push(*next);
            continue;
        }
        let mut draw = rng.gen_range(0.0..total);
        let mut chosen = xs[m - 1];
        for (x, w) in xs.iter().zip(&d2) {
            if draw < *w {
                chosen = *x;
                break;
            }
            draw -= w;
        }
        means.push(chosen);
    }

    let global_mean = xs.iter().zip(&counts).map(|(x, c)| x * c).sum::<f64>() / n as f64;
    let global_sd = (xs
        .iter()
        .zip(&counts)
        .map(|(x, c)| c * (x - global_mean) * (x - global_mean))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        .max(GMM_MIN_SD * 10.0);
    let mut sds = vec![global_sd; k];
    let mut weights = vec![1.0 / k as f64; k];
    let mut resp = vec![0.0f64; m * k];
    let mut lw = vec![0.0f64; k];
    let mut ll_history = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;

    for _iter in 0..GMM_MAX_ITER {
        // E-step in log space; each point's responsibilities sum to one.
        let mut ll = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let mut max = f64::NEG_INFINITY;
            for c in 0..k {
                lw[c] = weights[c].ln() + ln_normal_pdf(*x, means[c], sds[c]);
                if lw[c] > max {
                    max = lw[c];
                }
            }
            let sum_exp: f64 = lw.iter().map(|l| (l - max).exp()).sum();
            let lse = max + sum_exp.ln();
            ll += counts[i] * lse;
            for c in 0..k {
                resp[i * k + c] = (lw[c] - lse).exp();
            }
            debug_assert!(
                ((0..k).map(|c| resp[i * k + c]).sum::<f64>() - 1.0).abs() < 1e-9,
                "responsibilities of point {i} do not sum to one"
            );
        }
        ll_history.push(ll);
        // EM never decreases the likelihood; allow only float wobble.
        debug_assert!(
            ll >= prev_ll - 1e-9 * (1.0 + prev_ll.abs()),
            "log-likelihood decreased: {prev_ll} -> {ll}"
        );
        let converged = ll_history.len() > 1 && (ll - prev_ll).abs() < GMM_LL_TOL && ll.is_finite();
        prev_ll = ll;

        // M-step, multiplicity-weighted.
        for c in 0..k {
            let r_sum: f64 = (0..m).map(|i| counts[i] * resp[i * k + c]).sum();
            if r_sum <= 0.0 || !r_sum.is_finite() {
                return Err(Error::DegenerateComponent {
                    min_sd: GMM_MIN_SD,
                    attempts: 1,
                });
            }
            let mean = (0..m)
                .map(|i| counts[i] * resp[i * k + c] * xs[i])
                .sum::<f64>()
                / r_sum;
            let var = (0..m)
                .map(|i| counts[i] * resp[i * k + c] * (xs[i] - mean) * (xs[i] - mean))
                .sum::<f64>()
                / r_sum;
            let sd = var.sqrt();
            if !sd.is_finite() || sd < GMM_MIN_SD {
                return Err(Error::DegenerateComponent {
                    min_sd: GMM_MIN_SD,
                    attempts: 1,
                });
            }
            weights[c] = r_sum / n as f64;
            means[c] = mean;
            sds[c] = sd;
        }

        if converged {
            break;
        }
    }

    let weight_sum: f64 = weights.iter().sum();
    debug_assert!((weight_sum - 1.0).abs() < 1e-9);
    Ok(GmmFit {
        components: (0..k)
            .map(|c| GmmComponent {
                weight: weights[c] / weight_sum,
                mean: means[c],
                sd: sds[c],
            })
            .collect(),
        log_likelihood: prev_ll,
        n_points: n,
        ll_history,
        seed_used: seed,
    })
}

/// Mean, sd and estimated point count of the highest-mean component: the
/// worst-quality covered data.
pub fn rightmost_component_stats(fit: &GmmFit) -> (f64, f64, usize) {
    let c = fit
        .components
        .last()
        .expect("a fit always has at least one component");
    (
        c.mean,
        c.sd,
        (c.weight * fit.n_points as f64).round() as usize,
    )
}

/// Per-mission numbers that enter the side-by-side report.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionSummary {
    pub n_tracks: usize,
    pub path_length_m: f64,
    pub uncovered_cells: usize,
    pub uncovered_fraction: f64,
    /// Mean risk over all covered analysed cells.
    pub full_mean: f64,
    pub rc_mean: f64,
    pub rc_sd: f64,
    pub rc_n: usize,
    pub r_adpt_history: Vec<(usize, f64)>,
}

/// Control-versus-adaptive comparison over identical areas.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub control: MissionSummary,
    pub adaptive: MissionSummary,
    pub delta_n_tracks: i64,
    pub delta_uncovered_fraction: f64,
    pub delta_full_mean: f64,
    pub delta_rc_mean: f64,
}

fn summarize(result: &MissionResult, k: usize, margin: usize, seed: u64) -> Result<MissionSummary> {
    let values = result.grid.covered_values(margin);
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    let full_mean = values.iter().sum::<f64>() / values.len() as f64;
    let fit = fit_gmm(&values, k, seed)?;
    let (rc_mean, rc_sd, rc_n) = rightmost_component_stats(&fit);
    Ok(MissionSummary {
        n_tracks: result.metrics.n_tracks,
        path_length_m: result.metrics.path_length_m,
        uncovered_cells: result.metrics.uncovered_cells,
        uncovered_fraction: result.metrics.uncovered_fraction,
        full_mean,
        rc_mean,
        rc_sd,
        rc_n,
        r_adpt_history: result.r_adpt_history.clone(),
    })
}

/// Effective component count: never more than the data can support.
pub fn clamp_components(values: &[f64], k: usize) -> usize {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    k.min(distinct.len()).max(1)
}

/// Builds the side-by-side report for a control and an adaptive mission
/// run over the same area. Both mixtures are fitted with the same seed.
pub fn compare_missions(
    control: &MissionResult,
    adaptive: &MissionResult,
    k: usize,
    perimeter_margin_cells: usize,
    rng_seed: u64,
) -> Result<ComparisonReport> {
    let (cg, ag) = (&control.grid, &adaptive.grid);
    if cg.n_sweep() != ag.n_sweep()
        || cg.n_along() != ag.n_along()
        || cg.cell_size_m() != ag.cell_size_m()
    {
        return Err(Error::AreaMismatch(format!(
            "{}x{} @ {} vs {}x{} @ {}",
            cg.n_sweep(),
            cg.n_along(),
            cg.cell_size_m(),
            ag.n_sweep(),
            ag.n_along(),
            ag.cell_size_m()
        )));
    }
    let k_c = clamp_components(&cg.covered_values(perimeter_margin_cells), k);
    let k_a = clamp_components(&ag.covered_values(perimeter_margin_cells), k);
    let control_s = summarize(control, k_c, perimeter_margin_cells, rng_seed)?;
    let adaptive_s = summarize(adaptive, k_a, perimeter_margin_cells, rng_seed)?;
    Ok(ComparisonReport {
        delta_n_tracks: adaptive_s.n_tracks as i64 - control_s.n_tracks as i64,
        delta_uncovered_fraction: adaptive_s.uncovered_fraction - control_s.uncovered_fraction,
        delta_full_mean: adaptive_s.full_mean - control_s.full_mean,
        delta_rc_mean: adaptive_s.rc_mean - control_s.rc_mean,
        control: control_s,
        adaptive: adaptive_s,
    })
}

impl ComparisonReport {
    /// Aligned plain-text table.
    pub fn render_table(&self) -> String {
        let rows = [
            (
                "tracks",
                format!("{}", self.control.n_tracks),
                format!("{}", self.adaptive.n_tracks),
                format!("{:+}", self.delta_n_tracks),
            ),
            (
                "path length (m)",
                format!("{:.1}", self.control.path_length_m),
                format!("{:.1}", self.adaptive.path_length_m),
                format!(
                    "{:+.1}",
                    self.adaptive.path_length_m - self.control.path_length_m
                ),
            ),
            (
                "uncovered cells",
                format!("{}", self.control.uncovered_cells),
                format!("{}", self.adaptive.uncovered_cells),
                format!(
                    "{:+}",
                    self.adaptive.uncovered_cells as i64 - self.control.uncovered_cells as i64
                ),
            ),
            (
                "uncovered fraction",
                format!("{:.6}", self.control.uncovered_fraction),
                format!("{:.6}", self.adaptive.uncovered_fraction),
                format!("{:+.6}", self.delta_uncovered_fraction),
            ),
            (
                "mean RR (full)",
                format!("{:.6}", self.control.full_mean),
                format!("{:.6}", self.adaptive.full_mean),
                format!("{:+.6}", self.delta_full_mean),
            ),
            (
                "rightmost mean",
                format!("{:.6}", self.control.rc_mean),
                format!("{:.6}", self.adaptive.rc_mean),
                format!("{:+.6}", self.delta_rc_mean),
            ),
            (
                "rightmost sd",
                format!("{:.6}", self.control.rc_sd),
                format!("{:.6}", self.adaptive.rc_sd),
                format!("{:+.6}", self.adaptive.rc_sd - self.control.rc_sd),
            ),
            (
                "rightmost n",
                format!("{}", self.control.rc_n),
                format!("{}", self.adaptive.rc_n),
                format!("{:+}", self.adaptive.rc_n as i64 - self.control.rc_n as i64),
            ),
        ];
        let mut s = format!(
            "{:<22} {:>14} {:>14} {:>14}\n",
            "metric", "control", "adaptive", "delta"
        );
        for (name, c, a, d) in rows {
            s.push_str(&format!("{name:<22} {c:>14} {a:>14} {d:>14}\n"));
        }
        s
    }

    /// Machine-readable key-value block, one metric per line. Values use
    /// the shortest exact decimal form so the block is reproducible
    /// byte for byte.
    pub fn render_kv(&self) -> String {
        let mut s = String::new();
        for (prefix, m) in [("control", &self.control), ("adaptive", &self.adaptive)] {
            s.push_str(&format!("{prefix}.n_tracks = {}\n", m.n_tracks));
            s.push_str(&format!("{prefix}.path_length_m = {}\n", m.path_length_m));
            s.push_str(&format!(
                "{prefix}.uncovered_cells = {}\n",
                m.uncovered_cells
            ));
            s.push_str(&format!(
                "{prefix}.uncovered_fraction = {}\n",
                m.uncovered_fraction
            ));
            s.push_str(&format!("{prefix}.full_mean = {}\n", m.full_mean));
            s.push_str(&format!("{prefix}.rc_mean = {}\n", m.rc_mean));
            s.push_str(&format!("{prefix}.rc_sd = {}\n", m.rc_sd));
            s.push_str(&format!("{prefix}.rc_n = {}\n", m.rc_n));
            let hist: Vec<String> = m
                .r_adpt_history
                .iter()
                .map(|(i, r)| format!("{i}:{r}"))
                .collect();
            s.push_str(&format!("{prefix}.r_adpt_history = {}\n", hist.join(",")));
        }
        s.push_str(&format!("delta.n_tracks = {}\n", self.delta_n_tracks));
        s.push_str(&format!(
            "delta.uncovered_fraction = {}\n",
            self.delta_uncovered_fraction
        ));
        s.push_str(&format!("delta.full_mean = {}\n", self.delta_full_mean));
        s.push_str(&format!("delta.rc_mean = {}\n", self.delta_rc_mean));
        s
    }
}

/// Standalone analysis of a risk grid: coverage, histogram, mixture.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub metrics: CoverageMetrics,
    pub histogram: Histogram,
    pub fit: GmmFit,
    pub rc_mean: f64,
    pub rc_sd: f64,
    pub rc_n: usize,
    pub full_mean: f64,
}

/// Analyses one grid the same way [`compare_missions`] treats each side,
/// so an exported grid re-analysed from disk reproduces the in-process
/// numbers exactly.
pub fn analyze_grid(
    grid: &RiskGrid,
    k: usize,
    perimeter_margin_cells: usize,
    n_bins: usize,
    rng_seed: u64,
) -> Result<AnalysisReport> {
    let metrics = coverage_metrics(grid, perimeter_margin_cells);
    let values = grid.covered_values(perimeter_margin_cells);
    if values.is_empty() {
        return Err(Error::EmptyData);
    }
    let histogram = histogram_of(&values, n_bins)?;
    let fit = fit_gmm(&values, clamp_components(&values, k), rng_seed)?;
    let (rc_mean, rc_sd, rc_n) = rightmost_component_stats(&fit);
    let full_mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(AnalysisReport {
        metrics,
        histogram,
        fit,
        rc_mean,
        rc_sd,
        rc_n,
        full_mean,
    })
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "uncovered_cells = {}\nuncovered_area_m2 = {}\nuncovered_fraction = {}\n",
            self.metrics.uncovered_cells,
            self.metrics.uncovered_area_m2,
            self.metrics.uncovered_fraction
        ));
        s.push_str(&format!("covered_values = {}\n", self.histogram.n_values));
        s.push_str(&format!("full_mean = {}\n", self.full_mean));
        s.push_str(&format!(
            "histogram_bins = {}\nhistogram_counts = {}\n",
            self.histogram.n_bins(),
            self.histogram
                .counts
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        for (i, c) in self.fit.components.iter().enumerate() {
            s.push_str(&format!(
                "component.{i} = weight {} mean {} sd {}\n",
                c.weight, c.mean, c.sd
            ));
        }
        s.push_str(&format!(
            "rc_mean = {}\nrc_sd = {}\nrc_n = {}\n",
            self.rc_mean, self.rc_sd, self.rc_n
        ));
        s
    }
}
