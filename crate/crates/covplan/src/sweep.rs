//! Per-partition parallel-track sweep candidates.
//!
//! Each feasible axis yields up to four corner-based serpentines (start
//! corner x first-track direction); geometrically identical variants are
//! deduplicated, so a partition carries 4 candidates when one axis is
//! feasible and up to 8 when both are.

use serde::{Deserialize, Serialize};

use crate::decompose::{Axis, Partition};
use crate::error::{Error, Result};
use crate::geom::{count_turns, dedup_consecutive, polyline_length, Point, TURN_TOLERANCE_RAD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartCorner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

impl StartCorner {
    pub const ALL: [StartCorner; 4] = [
        StartCorner::BottomLeft,
        StartCorner::BottomRight,
        StartCorner::TopLeft,
        StartCorner::TopRight,
    ];
}

/// One parallel-track traversal of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCandidate {
    pub partition_id: usize,
    pub orientation: Axis,
    pub start_corner: StartCorner,
    pub entry: Point,
    pub exit: Point,
    pub length: f64,
    pub turns: usize,
    pub waypoints: Vec<Point>,
}

impl SweepCandidate {
    /// Builds a candidate directly from waypoints, recomputing the derived
    /// tuple fields.
    pub fn from_waypoints(
        partition_id: usize,
        orientation: Axis,
        start_corner: StartCorner,
        waypoints: Vec<Point>,
    ) -> Self {
        let waypoints = dedup_consecutive(waypoints);
        let entry = *waypoints.first().expect("nonempty waypoints");
        let exit = *waypoints.last().expect("nonempty waypoints");
        SweepCandidate {
            partition_id,
            orientation,
            start_corner,
            entry,
            exit,
            length: polyline_length(&waypoints),
            turns: count_turns(&waypoints, TURN_TOLERANCE_RAD),
            waypoints,
        }
    }
}

/// One track per grid band: at the band center, spanning the partition's
/// single occupied interval there. Ordered by ascending band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackSegment {
    pub start: Point,
    pub end: Point,
}

struct Track {
    cross: f64,
    lo: f64,
    hi: f64,
}

fn tracks_for(partition: &Partition, orientation: Axis) -> Result<Vec<Track>> {
    if !partition.feasible_axes.contains(orientation) {
        return Err(Error::InfeasibleOrientation {
            orientation,
            partition: partition.id,
        });
    }
    let region = &partition.region;
    let grid = region.grid();
    let map = match orientation {
        Axis::Horizontal => region.rows_map(),
        Axis::Vertical => region.cols_map(),
    };
    let mut tracks = Vec::with_capacity(map.len());
    for (band, indices) in map {
        let runs = crate::grid::CellRegion::runs(&indices);
        debug_assert_eq!(runs.len(), 1, "monotone axis has one run per band");
        let (a, b) = runs[0];
        let (cross, lo, hi) = match orientation {
            Axis::Horizontal => (
                (grid.y_line(band) + grid.y_line(band + 1)) / 2.0,
                grid.x_line(a),
                grid.x_line(b + 1),
            ),
            Axis::Vertical => (
                (grid.x_line(band) + grid.x_line(band + 1)) / 2.0,
                grid.y_line(a),
                grid.y_line(b + 1),
            ),
        };
        tracks.push(Track { cross, lo, hi });
    }
    Ok(tracks)
}

/// The track set for one orientation, each segment from its low end.
pub fn track_layout(partition: &Partition, orientation: Axis) -> Result<Vec<TrackSegment>> {
    let tracks = tracks_for(partition, orientation)?;
    Ok(tracks
        .iter()
        .map(|t| TrackSegment {
            start: point_at(orientation, t.lo, t.cross),
            end: point_at(orientation, t.hi, t.cross),
        })
        .collect())
}

fn point_at(orientation: Axis, along: f64, cross: f64) -> Point {
    match orientation {
        Axis::Horizontal => Point::new(along, cross),
        Axis::Vertical => Point::new(cross, along),
    }
}

fn serpentine(partition: &Partition, orientation: Axis, corner: StartCorner, tracks: &[Track]) -> SweepCandidate {
    use StartCorner::*;
    // Track visit order along the cross axis, and the first along-direction.
    let ascending = match (orientation, corner) {
        (Axis::Horizontal, BottomLeft | BottomRight) => true,
        (Axis::Horizontal, TopLeft | TopRight) => false,
        (Axis::Vertical, BottomLeft | TopLeft) => true,
        (Axis::Vertical, BottomRight | TopRight) => false,
    };
    let first_from_low = match (orientation, corner) {
        (Axis::Horizontal, BottomLeft | TopLeft) => true,
        (Axis::Horizontal, BottomRight | TopRight) => false,
        (Axis::Vertical, BottomLeft | BottomRight) => true,
        (Axis::Vertical, TopLeft | TopRight) => false,
    };

    let ordered: Vec<&Track> = if ascending {
        tracks.iter().collect()
    } else {
        tracks.iter().rev().collect()
    };

    let mut waypoints: Vec<Point> = Vec::with_capacity(ordered.len() * 3);
    let mut prev: Option<(&Track, bool)> = None; // (track, ended_high)
    for (i, track) in ordered.iter().enumerate() {
        let from_low = first_from_low == (i % 2 == 0);
        let (start_along, end_along) = if from_low {
            (track.lo, track.hi)
        } else {
            (track.hi, track.lo)
        };
        if let Some((pt, ended_high)) = prev {
            let prev_end = if ended_high { pt.hi } else { pt.lo };
            // Connect along the shared side, crossing bands inside both runs.
            let pivot = if ended_high {
                prev_end.min(start_along)
            } else {
                prev_end.max(start_along)
            };
            waypoints.push(point_at(orientation, pivot, pt.cross));
            waypoints.push(point_at(orientation, pivot, track.cross));
        }
        waypoints.push(point_at(orientation, start_along, track.cross));
        waypoints.push(point_at(orientation, end_along, track.cross));
        // Traversing from the low end leaves the sweep at the high end.
        prev = Some((track, from_low));
    }
    SweepCandidate::from_waypoints(partition.id, orientation, corner, waypoints)
}

/// All corner-based serpentine candidates for every feasible axis,
/// deduplicated by exact waypoint equality.
pub fn candidates(partition: &Partition) -> Vec<SweepCandidate> {
    let mut out: Vec<SweepCandidate> = Vec::with_capacity(8);
    for orientation in [Axis::Horizontal, Axis::Vertical] {
        if !partition.feasible_axes.contains(orientation) {
            continue;
        }
        let tracks = tracks_for(partition, orientation).expect("checked feasible");
        for corner in StartCorner::ALL {
            let cand = serpentine(partition, orientation, corner, &tracks);
            if !out.iter().any(|c| c.waypoints == cand.waypoints) {
                out.push(cand);
            }
        }
    }
    out
}
