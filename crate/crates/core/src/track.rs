//! Track and track-plan types.

use std::fmt;

/// Pair membership of a track within a plan.
///
/// Tracks normally come in pairs whose nadir gaps cover each other. A plan
/// may end with one unpaired track whose near swath mops up a residual
/// strip narrower than a full pair period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairIndex {
    Pair(usize),
    Single,
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairIndex::Pair(i) => write!(f, "{i}"),
            PairIndex::Single => write!(f, "single"),
        }
    }
}

/// One survey line, spanning the full track-axis extent of the area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Track {
    /// Position along the sweep axis, metres.
    pub x_m: f64,
    /// Which pair this track belongs to, or `Single`.
    pub pair_index: PairIndex,
    /// The adapted range the planner assumed when placing this track.
    pub r_used_m: f64,
}

/// An ordered sequence of tracks along the sweep axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackPlan {
    /// Tracks in execution order; `x_m` strictly increasing.
    pub tracks: Vec<Track>,
    /// Sweep-axis coordinate up to which planned coverage is contiguous
    /// from the plan origin.
    pub covered_up_to_m: f64,
}

impl TrackPlan {
    pub fn n_tracks(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.tracks.iter().map(|t| t.x_m).collect()
    }

    /// Planned swath intervals `(lo, hi)` of every track, both sides, using
    /// each track's `r_used_m` as the outer edge.
    pub fn planned_swaths(&self, r_min_m: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.tracks.len() * 2);
        for t in &self.tracks {
            out.push((t.x_m - t.r_used_m, t.x_m - r_min_m));
            out.push((t.x_m + r_min_m, t.x_m + t.r_used_m));
        }
        out
    }

    /// True when the union of planned swaths covers `[lo, hi]` without gaps.
    pub fn covers_interval(&self, r_min_m: f64, lo: f64, hi: f64) -> bool {
        covers(&self.planned_swaths(r_min_m), lo, hi)
    }

    /// Plain-text table: one track per line with index, position, pair tag
    /// and the range used to place it.
    pub fn to_table(&self) -> String {
        let mut s = String::from("# track_plan v1\n");
        for (i, t) in self.tracks.iter().enumerate() {
            s.push_str(&format!("{i} {} {} {}\n", t.x_m, t.pair_index, t.r_used_m));
        }
        s
    }
}

/// Interval-union check: do the (possibly overlapping) `spans` cover
/// `[lo, hi]` contiguously?
pub fn covers(spans: &[(f64, f64)], lo: f64, hi: f64) -> bool {
    const EPS: f64 = 1e-9;
    let mut sorted: Vec<_> = spans.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = lo;
    for (a, b) in sorted {
        if a > reach + EPS {
            return false;
        }
        if b > reach {
            reach = b;
        }
        if reach >= hi - EPS {
            return true;
        }
    }
    reach >= hi - EPS
}
