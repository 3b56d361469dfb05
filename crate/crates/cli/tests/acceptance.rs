//! Acceptance suite: one test per criterion, each printing a pass line
//! (run with `--nocapture` to see them). The criteria pin the reference
//! behaviours of the planner and simulator: track counts, adaptation
//! sequences, gap recovery, overlap placement, the multiplicative risk
//! bookkeeping, the worst-data quality shift, mixture-fit correctness and
//! the argmin tie-break of the range adaptation.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use swathplan_cli::{run_experiment, ExperimentSpec};
use swathplan_core::{
    analyze_grid, compare_missions, fit_gmm, layout_tracks, polygon_adaptation, run_mission,
    tracks_needed, MissionResult, RangeInterval, Strategy,
};

fn spec(name: &str) -> ExperimentSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name);
    ExperimentSpec::from_file(&path).expect("bundled spec parses")
}

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "swathplan_acceptance_{}_{}_{}",
        tag,
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(spec: &ExperimentSpec, strategy: Strategy) -> MissionResult {
    run_mission(&spec.mission_config(strategy).unwrap()).unwrap()
}

#[test]
fn criterion_1_track_counts() {
    let started = Instant::now();
    assert_eq!(tracks_needed(1212.0, 145.0, 40.0).unwrap(), 7);
    assert_eq!(tracks_needed(1212.0, 130.0, 40.0).unwrap(), 8);
    assert_eq!(tracks_needed(1212.0, 120.0, 40.0).unwrap(), 8);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1e-3,
        "track counting took {elapsed:?}, budget is 1 ms"
    );
    println!("criterion 1 (track-count reproduction): PASS ({elapsed:?})");
}

#[test]
fn criterion_2_adaptation_sequences() {
    let started = Instant::now();

    // Overestimated range: one pair at 138 m, then 120 m for the rest.
    let exp1 = spec("experiment1.spec");
    let adaptive1 = run(&exp1, Strategy::Adaptive);
    assert!(adaptive1.aborted.is_none());
    let history: Vec<f64> = adaptive1.r_adpt_history.iter().map(|(_, r)| *r).collect();
    assert_eq!(history, vec![138.0, 120.0], "adaptation history");
    assert_eq!(adaptive1.plan.n_tracks(), 8, "total adaptive tracks");

    // Underestimated range: adaptation changes nothing.
    let exp2 = spec("experiment2.spec");
    let control2 = run(&exp2, Strategy::Predefined);
    let adaptive2 = run(&exp2, Strategy::Adaptive);
    assert!(adaptive2.decisions.iter().all(|d| d.r_adpt_m == 120.0));
    assert_eq!(
        adaptive2.executed_positions(),
        control2.executed_positions(),
        "track positions must not change"
    );

    // Optimum range: 120 m chosen at every pair even though the data keeps
    // confirming an effective range out at 130 m.
    let exp3 = spec("experiment3.spec");
    let adaptive3 = run(&exp3, Strategy::Adaptive);
    assert_eq!(adaptive3.decisions.len(), 4, "one decision per pair");
    for d in &adaptive3.decisions {
        assert_eq!(
            d.r_adpt_m, 120.0,
            "decision after track {}",
            d.after_track_index
        );
    }
    for d in &adaptive3.decisions[1..] {
        assert!(
            d.r_eff_m >= 127.0 && d.r_eff_m <= 130.0,
            "estimated effective range strayed: {} m",
            d.r_eff_m
        );
    }
    assert_eq!(adaptive3.plan.n_tracks(), 8);

    // Full desk-scale suite, all three experiments end to end.
    for name in ["experiment1.spec", "experiment2.spec", "experiment3.spec"] {
        let s = spec(name);
        let dir = scratch_dir("crit2");
        run_experiment(&s, &dir).unwrap();
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "experiment suite took {elapsed:?}, budget is 10 s"
    );
    println!("criterion 2 (adaptation sequences): PASS ({elapsed:?})");
}

#[test]
fn criterion_3_gap_recovery() {
    let exp1 = spec("experiment1.spec");
    let control = run(&exp1, Strategy::Predefined);
    let adaptive = run(&exp1, Strategy::Adaptive);

    assert!(
        control.metrics.uncovered_fraction > 0.01,
        "control mission must leave visible gaps, got fraction {}",
        control.metrics.uncovered_fraction
    );
    assert!(
        adaptive.metrics.uncovered_fraction < control.metrics.uncovered_fraction,
        "adaptation must reduce the uncovered area"
    );
    // Recovery bound: the adaptive mission is allowed at most 0.2 %
    // uncovered. The first pair is executed at the overestimated 138 m
    // spacing before any data exists, against a hard 130 m truth limit;
    // its three 8 m seam strips (x in [0,8), (98,106), (268,276)) are never
    // revisited, so two interior columns stay uncovered and the fraction
    // lands near 0.8 %.
    assert!(
        adaptive.metrics.uncovered_fraction < 0.002,
        "adaptive uncovered fraction {} is not below 0.2 % \
         (uncovered cells: {} of {} analysed)",
        adaptive.metrics.uncovered_fraction,
        adaptive.metrics.uncovered_cells,
        adaptive.grid.analyzed_cells(exp1.perimeter_margin_cells),
    );
    println!("criterion 3 (gap recovery): PASS");
}

#[test]
fn criterion_4_overlap_at_tail() {
    // Randomized single-stage adaptive plans, brute-forced on a 1 m grid:
    // every multi-look cell must keep one look at lateral range
    // >= 2 r_adpt - r_true.
    let mut rng = ChaCha8Rng::seed_from_u64(20_2020);
    let mut cases = 0;
    let mut violations: Vec<String> = Vec::new();
    while cases < 100 {
        let r_min = rng.gen_range(5..=50) as f64;
        let r_eff = 3.0 * r_min + rng.gen_range(0..=60) as f64;
        let width = rng.gen_range(200..=2500) as f64;
        let interval = RangeInterval::new(r_min, r_eff).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();
        let r_true = r_adpt + rng.gen_range(0..=40) as f64;
        let plan = layout_tracks(width, r_adpt, r_min, 0.0).unwrap();
        let positions = plan.positions();
        let tail = 2.0 * r_adpt - r_true;
        cases += 1;

        for i in 0..width as usize {
            let c = i as f64 + 0.5;
            let looks: Vec<f64> = positions
                .iter()
                .map(|x| (c - x).abs())
                .filter(|y| *y >= r_min && *y <= r_true)
                .collect();
            if looks.len() >= 2 {
                let deepest = looks.iter().cloned().fold(0.0, f64::max);
                if deepest < tail - 1e-9 {
                    violations.push(format!(
                        "W={width} r_min={r_min} r_adpt={r_adpt} r_true={r_true}: \
                         cell {c} m has looks {looks:?}, all below {tail}"
                    ));
                    break;
                }
            }
        }
    }
    assert!(
        violations.is_empty(),
        "{} of {cases} plans violate the tail bound; first: {}",
        violations.len(),
        violations[0]
    );
    println!("criterion 4 (overlap at tail): PASS ({cases} cases)");
}

#[test]
fn criterion_5_risk_product_oracle() {
    // Recompute every cell's residual risk from its recorded look ranges
    // and the true curve; the accumulated grid must match to 1e-12.
    for name in ["experiment1.spec", "experiment2.spec", "experiment3.spec"] {
        let s = spec(name);
        let curve = s.mission_config(Strategy::Predefined).unwrap().true_curve;
        for strategy in [Strategy::Predefined, Strategy::Adaptive] {
            let result = run(&s, strategy);
            let grid = &result.grid;
            for col in 0..grid.n_sweep() {
                for row in 0..grid.n_along() {
                    let recomputed: f64 = grid
                        .look_ranges_at(col, row)
                        .iter()
                        .map(|y| 1.0 - curve.eval(*y))
                        .product();
                    let stored = grid.rr_at(col, row);
                    assert!(
                        (recomputed - stored).abs() <= 1e-12,
                        "{name} {strategy:?} cell ({col},{row}): stored {stored}, oracle {recomputed}"
                    );
                }
            }
        }
    }
    println!("criterion 5 (risk product oracle): PASS");
}

#[test]
fn criterion_6_worst_data_direction() {
    let exp3 = spec("experiment3.spec");
    let control = run(&exp3, Strategy::Predefined);
    let adaptive = run(&exp3, Strategy::Adaptive);
    let report = compare_missions(
        &control,
        &adaptive,
        exp3.gmm_components,
        exp3.perimeter_margin_cells,
        exp3.seed,
    )
    .unwrap();
    let gap = report.control.rc_mean - report.adaptive.rc_mean;
    assert!(
        report.adaptive.rc_mean < report.control.rc_mean && gap > 0.005,
        "worst-data component must shift down by more than 0.005: \
         control {} adaptive {}",
        report.control.rc_mean,
        report.adaptive.rc_mean
    );
    println!(
        "criterion 6 (worst-data direction): PASS (control {:.4} -> adaptive {:.4})",
        report.control.rc_mean, report.adaptive.rc_mean
    );
}

#[test]
fn criterion_7_gmm_correctness() {
    // Closed-form agreement at k = 1.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sample: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..1.0)).collect();
    let fit = fit_gmm(&sample, 1, 0).unwrap();
    let mean = sample.iter().sum::<f64>() / sample.len() as f64;
    let sd =
        (sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / sample.len() as f64).sqrt();
    assert!((fit.components[0].mean - mean).abs() < 1e-9);
    assert!((fit.components[0].sd - sd).abs() < 1e-9);

    // Synthetic two-component recovery within 0.01.
    let lo = Normal::new(0.3, 0.02).unwrap();
    let hi = Normal::new(0.8, 0.02).unwrap();
    let values: Vec<f64> = (0..10_000)
        .map(|i| {
            if i % 2 == 0 {
                lo.sample(&mut rng)
            } else {
                hi.sample(&mut rng)
            }
        })
        .collect();
    let fit2 = fit_gmm(&values, 2, 1).unwrap();
    assert!((fit2.components[0].mean - 0.3).abs() < 0.01);
    assert!((fit2.components[1].mean - 0.8).abs() < 0.01);

    // Log-likelihood is non-decreasing on every iteration of every fit,
    // including the fits over all six experiment grids.
    let mut fits = vec![fit, fit2];
    for name in ["experiment1.spec", "experiment2.spec", "experiment3.spec"] {
        let s = spec(name);
        for strategy in [Strategy::Predefined, Strategy::Adaptive] {
            let result = run(&s, strategy);
            let report = analyze_grid(
                &result.grid,
                s.gmm_components,
                s.perimeter_margin_cells,
                s.histogram_bins,
                s.seed,
            )
            .unwrap();
            fits.push(report.fit);
        }
    }
    for (i, f) in fits.iter().enumerate() {
        for w in f.ll_history.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()),
                "fit {i}: log-likelihood fell from {} to {}",
                w[0],
                w[1]
            );
        }
    }
    println!(
        "criterion 7 (mixture-fit correctness): PASS ({} fits checked)",
        fits.len()
    );
}

#[test]
fn criterion_8_argmin_least_element() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for case in 0..1000 {
        let r_min = rng.gen_range(2..=60) as f64;
        let span = rng.gen_range(0..=60);
        let width = rng.gen_range(50..=3000) as f64;
        let interval = RangeInterval::new(r_min, 3.0 * r_min + span as f64).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();

        // Exhaustive oracle over the same candidates.
        let mut best_n = usize::MAX;
        let mut best_r = f64::NAN;
        for r in interval.candidates() {
            let n = tracks_needed(width, r, r_min).unwrap();
            if n < best_n {
                best_n = n;
                best_r = r;
            }
        }
        assert_eq!(
            r_adpt, best_r,
            "case {case}: W={width} r_min={r_min} span={span}"
        );
        for r in interval.candidates() {
            if r < r_adpt {
                assert!(
                    tracks_needed(width, r, r_min).unwrap() > best_n,
                    "case {case}: r={r} ties the minimum below r_adpt={r_adpt}"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "argmin scan took {elapsed:?}, budget is 1 s"
    );
    println!("criterion 8 (argmin least element): PASS ({elapsed:?})");
}
