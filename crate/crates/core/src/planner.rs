//! Paired-track layout and adaptive track spacing.
//!
//! Tracks are laid out in pairs so that each member ensonifies the other's
//! nadir gap: within a pair the outer edge of one swath is aligned with the
//! nadir edge of the other, and consecutive pairs abut outer edge to outer
//! edge. With range `r` and nadir half-gap `r_min` one pair therefore tiles
//! a sweep-axis strip of width `3r - r_min` without internal gaps.
//!
//! The spacing adaptation searches the admissible range interval
//! exhaustively at 1 m steps and keeps the smallest range that achieves the
//! minimum track count. Minimising the count keeps the mission short;
//! among equally short missions the smallest range spreads the inevitable
//! coverage surplus across every track seam, where the real sensor reach
//! exceeds the assumed range and the data quality is at its worst.

use crate::error::{Error, Result};
use crate::track::{PairIndex, Track, TrackPlan};

const EPS: f64 = 1e-9;

fn require_pairable(r_m: f64, r_min_m: f64) -> Result<()> {
    if !r_min_m.is_finite() || r_min_m <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "nadir gap must be positive, got {r_min_m}"
        )));
    }
    if r_m < 3.0 * r_min_m - EPS {
        return Err(Error::InfeasiblePairing {
            r_min_m,
            range_m: r_m,
        });
    }
    Ok(())
}

/// Sweep-axis width covered by one pair of tracks at range `r_m`:
/// `3r - r_min`. Intra-pair spacing is `r - r_min`, and the pair's outer
/// planned edges extend `r` beyond each member.
pub fn pair_period(r_m: f64, r_min_m: f64) -> Result<f64> {
    require_pairable(r_m, r_min_m)?;
    Ok(3.0 * r_m - r_min_m)
}

/// Number of tracks needed to cover a width `width_m` at range `r_m`.
///
/// Full pairs tile the width; a remainder narrower than one side swath
/// (`r - r_min`) is mopped up by a single unpaired track whose near swath
/// lies over the residual strip, its nadir falling on already-covered
/// ground or outside the region. A wider remainder costs one more pair.
pub fn tracks_needed(width_m: f64, r_m: f64, r_min_m: f64) -> Result<usize> {
    if !width_m.is_finite() || width_m <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "width must be positive, got {width_m}"
        )));
    }
    let period = pair_period(r_m, r_min_m)?;
    let n_full = ((width_m / period) + EPS).floor() as usize;
    let remainder = width_m - n_full as f64 * period;
    if remainder <= EPS * width_m.max(1.0) {
        Ok(2 * n_full)
    } else if remainder <= r_m - r_min_m + EPS {
        Ok(2 * n_full + 1)
    } else {
        Ok(2 * n_full + 2)
    }
}

/// Discretised candidate interval for the adapted range.
///
/// The lower bound is the pairing floor `3 * r_min`; the upper bound is the
/// current effective range, or the planned range before any data exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeInterval {
    pub r_min_m: f64,
    pub lo_m: f64,
    pub hi_m: f64,
    pub step_m: f64,
}

impl RangeInterval {
    /// Interval `[3 r_min, hi]` at 1 m steps.
    pub fn new(r_min_m: f64, hi_m: f64) -> Result<Self> {
        Self::bounded(r_min_m, 3.0 * r_min_m, hi_m)
    }

    /// Interval `[max(lo, 3 r_min), hi]` at 1 m steps, for callers that
    /// want to restrict the search from below.
    pub fn bounded(r_min_m: f64, lo_m: f64, hi_m: f64) -> Result<Self> {
        if !r_min_m.is_finite() || r_min_m <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "nadir gap must be positive, got {r_min_m}"
            )));
        }
        if hi_m < 3.0 * r_min_m - EPS {
            return Err(Error::InfeasiblePairing {
                r_min_m,
                range_m: hi_m,
            });
        }
        let lo = lo_m.max(3.0 * r_min_m);
        if hi_m < lo - EPS {
            return Err(Error::InvalidParams(format!(
                "empty range interval [{lo_m}, {hi_m}]"
            )));
        }
        Ok(Self {
            r_min_m,
            lo_m: lo,
            hi_m,
            step_m: 1.0,
        })
    }

    pub fn with_step(mut self, step_m: f64) -> Result<Self> {
        if !step_m.is_finite() || step_m <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "step must be positive, got {step_m}"
            )));
        }
        self.step_m = step_m;
        Ok(self)
    }

    /// Ascending candidate ranges `lo, lo + step, ...` up to `hi`.
    pub fn candidates(&self) -> impl Iterator<Item = f64> + '_ {
        let n = ((self.hi_m - self.lo_m) / self.step_m + EPS).floor() as usize;
        (0..=n).map(move |k| self.lo_m + k as f64 * self.step_m)
    }
}

/// Exhaustive search for the adapted range: evaluates the track count at
/// every candidate and returns the smallest range attaining the minimum
/// count.
pub fn polygon_adaptation(width_m: f64, interval: &RangeInterval) -> Result<f64> {
    let mut best: Option<(usize, f64)> = None;
    for r in interval.candidates() {
        let n = tracks_needed(width_m, r, interval.r_min_m)?;
        // Strict comparison keeps the first (smallest) range on ties.
        if best.is_none_or(|(bn, _)| n < bn) {
            best = Some((n, r));
        }
    }
    best.map(|(_, r)| r)
        .ok_or_else(|| Error::InvalidParams("empty range interval".into()))
}

/// Lays the tracks for a width starting at `origin_m`.
///
/// The first track sits at `origin + r_adpt` so its outer planned edge is
/// flush with the origin. Within a pair the second track follows at
/// `r_adpt - r_min`; the next pair starts `2 r_adpt` after that. A trailing
/// single track, when the count is odd, is placed so its near swath edge is
/// flush with the residual strip.
pub fn layout_tracks(
    width_m: f64,
    r_adpt_m: f64,
    r_min_m: f64,
    origin_m: f64,
) -> Result<TrackPlan> {
    let n_tracks = tracks_needed(width_m, r_adpt_m, r_min_m)?;
    let period = 3.0 * r_adpt_m - r_min_m;
    let n_pairs = n_tracks / 2;
    let mut tracks = Vec::with_capacity(n_tracks);
    for p in 0..n_pairs {
        let first = origin_m + r_adpt_m + p as f64 * period;
        tracks.push(Track {
            x_m: first,
            pair_index: PairIndex::Pair(p),
            r_used_m: r_adpt_m,
        });
        tracks.push(Track {
            x_m: first + (r_adpt_m - r_min_m),
            pair_index: PairIndex::Pair(p),
            r_used_m: r_adpt_m,
        });
    }
    if n_tracks % 2 == 1 {
        // Near swath flush with the start of the residual strip.
        let strip_start = origin_m + n_pairs as f64 * period;
        tracks.push(Track {
            x_m: strip_start + r_adpt_m,
            pair_index: PairIndex::Single,
            r_used_m: r_adpt_m,
        });
    }
    let plan = TrackPlan {
        tracks,
        covered_up_to_m: origin_m + width_m,
    };
    debug_assert!(plan.covers_interval(r_min_m, origin_m, origin_m + width_m));
    Ok(plan)
}

/// Re-optimises the remaining width after some prefix has been covered.
///
/// Runs the range adaptation over `[3 r_min, new_r_eff]` for the width
/// still ahead of `covered_up_to_m`, then lays tracks from there. Fails
/// with `NoAdmissibleRange` when the effective range has collapsed below
/// the pairing floor; the paired-track model cannot proceed in that case.
pub fn replan(
    covered_up_to_m: f64,
    width_total_m: f64,
    new_r_eff_m: f64,
    r_min_m: f64,
) -> Result<(f64, TrackPlan)> {
    if covered_up_to_m >= width_total_m {
        return Err(Error::InvalidParams(format!(
            "nothing left to plan: covered {covered_up_to_m} of {width_total_m}"
        )));
    }
    if new_r_eff_m < 3.0 * r_min_m - EPS {
        return Err(Error::NoAdmissibleRange {
            threshold: new_r_eff_m,
        });
    }
    let remaining = width_total_m - covered_up_to_m;
    let interval = RangeInterval::new(r_min_m, new_r_eff_m)?;
    let r_adpt = polygon_adaptation(remaining, &interval)?;
    let plan = layout_tracks(remaining, r_adpt, r_min_m, covered_up_to_m)?;
    Ok((r_adpt, plan))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_period_arithmetic() {
        assert_eq!(pair_period(120.0, 40.0).unwrap(), 320.0);
        assert_eq!(pair_period(130.0, 40.0).unwrap(), 350.0);
    }

    // Brute-force oracle: simulate a single pair on a 1 m grid and measure
    // the contiguous covered width starting at the pair's left edge.
    fn pair_coverage_width_brute(r: f64, r_min: f64) -> f64 {
        let x1 = r;
        let x2 = x1 + (r - r_min);
        let span = (3.0 * r - r_min) as usize + 2 * r as usize;
        let covered = |c: f64| {
            [x1, x2].iter().any(|&t| {
                let y = (c - t).abs();
                y >= r_min && y <= r
            })
        };
        let mut width = 0.0;
        for i in 0..span {
            let c = i as f64 + 0.5;
            if covered(c) {
                width += 1.0;
            } else {
                break;
            }
        }
        width
    }

    #[test]
    fn pair_period_matches_brute_force_coverage() {
        for (r, r_min) in [(138.0, 40.0), (120.0, 40.0), (145.0, 40.0), (90.0, 30.0)] {
            let period = pair_period(r, r_min).unwrap();
            assert_eq!(pair_coverage_width_brute(r, r_min), period);
        }
        assert_eq!(pair_period(138.0, 40.0).unwrap(), 374.0);
    }

    #[test]
    fn pair_period_rejects_infeasible_ranges() {
        assert!(matches!(
            pair_period(119.0, 40.0),
            Err(Error::InfeasiblePairing { .. })
        ));
    }

    #[test]
    fn track_counts_for_the_reference_area() {
        assert_eq!(tracks_needed(1212.0, 145.0, 40.0).unwrap(), 7);
        assert_eq!(tracks_needed(1212.0, 130.0, 40.0).unwrap(), 8);
        assert_eq!(tracks_needed(1212.0, 120.0, 40.0).unwrap(), 8);
    }

    #[test]
    fn one_exact_pair_period_needs_two_tracks() {
        assert_eq!(tracks_needed(320.0, 120.0, 40.0).unwrap(), 2);
    }

    #[test]
    fn adaptation_picks_the_smallest_range_with_the_fewest_tracks() {
        let iv = RangeInterval::bounded(40.0, 120.0, 145.0).unwrap();
        assert_eq!(polygon_adaptation(1212.0, &iv).unwrap(), 138.0);

        let iv = RangeInterval::bounded(40.0, 120.0, 130.0).unwrap();
        assert_eq!(polygon_adaptation(838.0, &iv).unwrap(), 120.0);
        assert_eq!(polygon_adaptation(1212.0, &iv).unwrap(), 120.0);

        let iv = RangeInterval::bounded(40.0, 120.0, 120.0).unwrap();
        assert_eq!(polygon_adaptation(1212.0, &iv).unwrap(), 120.0);
    }

    #[test]
    fn adaptation_result_is_the_least_of_the_argmin_set() {
        // Exhaustive oracle over the same interval.
        let iv = RangeInterval::bounded(40.0, 120.0, 145.0).unwrap();
        let r_adpt = polygon_adaptation(1212.0, &iv).unwrap();
        let n_best = tracks_needed(1212.0, r_adpt, 40.0).unwrap();
        for r in iv.candidates() {
            let n = tracks_needed(1212.0, r, 40.0).unwrap();
            assert!(n >= n_best);
            if r < r_adpt {
                assert!(n > n_best, "r = {r} ties the minimum below r_adpt");
            }
        }
    }

    #[test]
    fn layout_covers_one_pair_width() {
        let plan = layout_tracks(320.0, 120.0, 40.0, 0.0).unwrap();
        assert_eq!(plan.positions(), vec![120.0, 200.0]);
        assert!(plan.covers_interval(40.0, 0.0, 320.0));
    }

    #[test]
    fn layout_matches_the_first_adaptive_pair() {
        let plan = layout_tracks(374.0, 138.0, 40.0, 0.0).unwrap();
        assert_eq!(plan.positions(), vec![138.0, 236.0]);
        assert!(plan.covers_interval(40.0, 0.0, 374.0));
    }

    #[test]
    fn layout_rejects_zero_width() {
        assert!(layout_tracks(0.0, 120.0, 40.0, 0.0).is_err());
    }

    #[test]
    fn layout_places_a_trailing_single_over_the_residual_strip() {
        // 7 tracks at r = 145: three pairs and one single.
        let plan = layout_tracks(1212.0, 145.0, 40.0, 0.0).unwrap();
        assert_eq!(plan.n_tracks(), 7);
        assert_eq!(
            plan.positions(),
            vec![145.0, 250.0, 540.0, 645.0, 935.0, 1040.0, 1330.0]
        );
        assert_eq!(plan.tracks[6].pair_index, PairIndex::Single);
        assert!(plan.covers_interval(40.0, 0.0, 1212.0));
    }

    #[test]
    fn replan_after_the_first_pair_of_the_overestimated_mission() {
        let (r_adpt, plan) = replan(374.0, 1212.0, 130.0, 40.0).unwrap();
        assert_eq!(r_adpt, 120.0);
        assert_eq!(plan.n_tracks(), 6);
        assert_eq!(plan.tracks[0].x_m, 494.0);
        assert!(plan.covers_interval(40.0, 374.0, 1212.0));
    }

    #[test]
    fn replan_with_an_unchanged_range_keeps_the_spacing() {
        let (r_adpt, plan) = replan(320.0, 1212.0, 130.0, 40.0).unwrap();
        assert_eq!(r_adpt, 120.0);
        assert_eq!(plan.n_tracks(), 6);
    }

    #[test]
    fn replan_refuses_a_collapsed_effective_range() {
        assert!(matches!(
            replan(0.0, 100.0, 119.0, 40.0),
            Err(Error::NoAdmissibleRange { .. })
        ));
    }

    #[test]
    fn pair_members_are_spaced_exactly_r_minus_rmin() {
        let plan = layout_tracks(1500.0, 123.0, 40.0, 17.0).unwrap();
        for w in plan.tracks.windows(2) {
            if let (PairIndex::Pair(a), PairIndex::Pair(b)) = (w[0].pair_index, w[1].pair_index) {
                if a == b {
                    assert_eq!(w[1].x_m - w[0].x_m, w[0].r_used_m - 40.0);
                }
            }
        }
    }
}
