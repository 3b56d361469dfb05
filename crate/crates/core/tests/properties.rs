//! Property tests for the planner geometry and the quality model.

use proptest::prelude::*;

use swathplan_core::{
    effective_range, layout_tracks, pair_period, polygon_adaptation, synth_curve, tracks_needed,
    validate_sensor, PairIndex, PdCurveParams, RangeInterval, SensorSpec,
};

/// 1 m brute-force coverage oracle: which cells of `[0, width)` receive a
/// look from any track, with reach `r_reach` and nadir gap `r_min`.
fn brute_looks(positions: &[f64], width: f64, r_min: f64, r_reach: f64) -> Vec<Vec<f64>> {
    let n = width.ceil() as usize;
    (0..n)
        .map(|i| {
            let c = i as f64 + 0.5;
            positions
                .iter()
                .map(|x| (c - x).abs())
                .filter(|y| *y >= r_min && *y <= r_reach)
                .collect()
        })
        .collect()
}

proptest! {
    /// The feasibility check accepts exactly the specs with
    /// r_planned >= 3 r_min.
    #[test]
    fn sensor_validation_is_exactly_the_pairing_bound(
        r_min in 1.0f64..80.0,
        slack in -30.0f64..60.0,
    ) {
        let spec = SensorSpec::new(r_min, 3.0 * r_min + slack, 3.0 * r_min + 100.0);
        let ok = validate_sensor(spec).is_ok();
        prop_assert_eq!(ok, slack >= 0.0);
    }

    /// Wider ranges never need more tracks.
    #[test]
    fn track_count_is_non_increasing_in_range(
        r_min in 1.0f64..60.0,
        width in 50.0f64..3000.0,
        span in 1u32..80,
    ) {
        let r_min = r_min.round().max(1.0);
        let width = width.round();
        let lo = 3.0 * r_min;
        let mut prev = usize::MAX;
        for k in 0..=span {
            let r = lo + k as f64;
            let n = tracks_needed(width, r, r_min).unwrap();
            prop_assert!(n <= prev, "count rose from {prev} to {n} at r = {r}");
            prev = n;
        }
    }

    /// The adaptation returns the least element of the argmin set.
    #[test]
    fn adaptation_is_the_least_argmin(
        r_min in 1.0f64..60.0,
        width in 50.0f64..3000.0,
        span in 0u32..60,
    ) {
        let r_min = r_min.round().max(1.0);
        let width = width.round();
        let interval = RangeInterval::new(r_min, 3.0 * r_min + span as f64).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();
        let n_best = tracks_needed(width, r_adpt, r_min).unwrap();
        for r in interval.candidates() {
            let n = tracks_needed(width, r, r_min).unwrap();
            prop_assert!(n >= n_best);
            if r < r_adpt {
                prop_assert!(n > n_best, "tie below the returned range at r = {r}");
            }
        }
    }

    /// Simulating a plan with the true reach equal to the assumed range
    /// leaves no uncovered metre cell inside the planned width.
    #[test]
    fn layouts_are_sound_at_their_assumed_range(
        r_min in 1.0f64..60.0,
        width in 50.0f64..3000.0,
        span in 0u32..60,
    ) {
        let r_min = r_min.round().max(1.0);
        let width = width.round();
        let interval = RangeInterval::new(r_min, 3.0 * r_min + span as f64).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();
        let plan = layout_tracks(width, r_adpt, r_min, 0.0).unwrap();
        let looks = brute_looks(&plan.positions(), width, r_min, r_adpt);
        for (i, cell) in looks.iter().enumerate() {
            prop_assert!(!cell.is_empty(), "cell {i} uncovered at r = {r_adpt}");
        }
    }

    /// When the true reach exceeds the assumed range, overlap lands only at
    /// the two low-quality ends of the swath. Every multi-look cell either
    /// keeps a look out at the far tail (lateral range at least
    /// 2 r_adpt - r_true, the deepest partner an abutting seam can have) or
    /// is a near-nadir cell inside a pair, where the members' nadir-covering
    /// swaths meet and the two look ranges sum to exactly r_adpt - r_min.
    /// The near-nadir band is empty when the adaptation lands on the pairing
    /// floor 3 r_min, which is what the range minimisation drives towards.
    #[test]
    fn overlap_lands_on_the_swath_ends(
        r_min in 1.0f64..60.0,
        width in 50.0f64..3000.0,
        span in 0u32..60,
        extra in 0.0f64..40.0,
    ) {
        let r_min = r_min.round().max(1.0);
        let width = width.round();
        let interval = RangeInterval::new(r_min, 3.0 * r_min + span as f64).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();
        let r_true = r_adpt + extra.round();
        let plan = layout_tracks(width, r_adpt, r_min, 0.0).unwrap();
        let tail = 2.0 * r_adpt - r_true;
        let looks = brute_looks(&plan.positions(), width, r_min, r_true);
        for (i, cell) in looks.iter().enumerate() {
            if cell.len() >= 2 {
                let deepest = cell.iter().cloned().fold(0.0, f64::max);
                let tail_overlap = deepest >= tail - 1e-9;
                let nadir_overlap = cell.len() == 2
                    && (cell[0] + cell[1] - (r_adpt - r_min)).abs() < 1e-9;
                prop_assert!(
                    tail_overlap || nadir_overlap,
                    "cell {i}: looks {cell:?} neither reach tail bound {tail} \
                     nor form a nadir-cover pair at r_adpt = {r_adpt}"
                );
            }
        }
        // At the pairing floor the near-nadir band vanishes and the pure
        // tail form holds.
        if r_adpt == 3.0 * r_min {
            for cell in &looks {
                if cell.len() >= 2 {
                    let deepest = cell.iter().cloned().fold(0.0, f64::max);
                    prop_assert!(deepest >= tail - 1e-9);
                }
            }
        }
    }

    /// Every plan the planner emits keeps pair members exactly
    /// r_used - r_min apart and positions strictly increasing.
    #[test]
    fn emitted_plans_respect_pair_spacing(
        r_min in 1.0f64..60.0,
        width in 50.0f64..3000.0,
        span in 0u32..60,
        origin in 0.0f64..500.0,
    ) {
        let r_min = r_min.round().max(1.0);
        let width = width.round();
        let origin = origin.round();
        let interval = RangeInterval::new(r_min, 3.0 * r_min + span as f64).unwrap();
        let r_adpt = polygon_adaptation(width, &interval).unwrap();
        let plan = layout_tracks(width, r_adpt, r_min, origin).unwrap();
        for w in plan.tracks.windows(2) {
            prop_assert!(w[1].x_m > w[0].x_m);
            if let (PairIndex::Pair(a), PairIndex::Pair(b)) = (w[0].pair_index, w[1].pair_index) {
                if a == b {
                    prop_assert_eq!(w[1].x_m - w[0].x_m, w[0].r_used_m - r_min);
                }
            }
        }
        prop_assert!(plan.covers_interval(r_min, origin, origin + width));
    }

    /// A pair covers exactly its period: the brute-force contiguous width
    /// equals 3r - r_min.
    #[test]
    fn pair_period_matches_brute_coverage(
        r_min in 1.0f64..60.0,
        slack in 0u32..50,
    ) {
        let r_min = r_min.round().max(1.0);
        let r = 3.0 * r_min + slack as f64;
        let period = pair_period(r, r_min).unwrap();
        let positions = [r, r + (r - r_min)];
        let looks = brute_looks(&positions, period, r_min, r);
        for (i, cell) in looks.iter().enumerate() {
            prop_assert!(!cell.is_empty(), "gap at metre {i} inside one pair period");
        }
        // The metre just past the period is out of reach.
        let c = period + 0.5;
        let out = positions.iter().all(|x| {
            let y = (c - x).abs();
            y < r_min || y > r
        });
        prop_assert!(out);
    }

    /// Raising the threshold never increases the effective range.
    #[test]
    fn effective_range_monotone_in_threshold(
        peak_pd in 0.2f64..0.9,
        t1 in 0.01f64..0.5,
        t2 in 0.01f64..0.5,
    ) {
        let params = PdCurveParams {
            peak_pd,
            ..PdCurveParams::default()
        };
        let curve = synth_curve(&params, 40.0, 130.0).unwrap();
        let (t_lo, t_hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        if let (Ok(r_lo), Ok(r_hi)) = (
            effective_range(&curve, t_lo),
            effective_range(&curve, t_hi),
        ) {
            prop_assert!(r_lo >= r_hi);
        }
    }
}
