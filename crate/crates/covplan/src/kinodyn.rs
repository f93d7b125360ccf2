//! Execution-time estimation for stitched waypoint routes.
//!
//! The route is cut at every turn vertex; each maximal collinear run is
//! flown as one rest-to-rest profile under velocity/acceleration/jerk
//! limits. Infinite jerk selects the closed-form trapezoidal profile,
//! finite jerk the seven-phase S-curve. Stopping at every turn is a
//! conservative model: no corner blending, no multi-axis coupling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, TURN_TOLERANCE_RAD};

/// Per-axis motion limits. `j_max` may be infinite, selecting the
/// trapezoidal profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionLimits {
    pub v_max: f64,
    pub a_max: f64,
    pub j_max: f64,
}

impl MotionLimits {
    pub fn trapezoidal(v_max: f64, a_max: f64) -> Self {
        MotionLimits {
            v_max,
            a_max,
            j_max: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_max > 0.0) || !(self.a_max > 0.0) || !(self.j_max > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "motion limits must be positive (v={}, a={}, j={})",
                self.v_max, self.a_max, self.j_max
            )));
        }
        Ok(())
    }
}

impl Default for MotionLimits {
    fn default() -> Self {
        MotionLimits::trapezoidal(5.0, 2.5)
    }
}

/// Timing of one route: durations of the rest-to-rest runs between
/// consecutive stop vertices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingProfile {
    /// Duration of the run between stop vertex `t` and `t+1`.
    pub segment_durations: Vec<f64>,
    pub total: f64,
    /// Indices into the polyline where commanded speed is zero: the first
    /// point, every turn vertex, and the last point.
    pub stop_vertices: Vec<usize>,
}

/// Minimum time to traverse `distance` from rest to rest.
pub fn rest_to_rest_time(distance: f64, limits: &MotionLimits) -> f64 {
    let d = distance;
    if d <= 0.0 {
        return 0.0;
    }
    let (v, a, j) = (limits.v_max, limits.a_max, limits.j_max);
    if j.is_infinite() {
        // Trapezoidal: triangular profile when cruise speed is unreachable.
        if d * a <= v * v {
            2.0 * (d / a).sqrt()
        } else {
            d / v + v / a
        }
    } else {
        // S-curve. Accelerating to speed s takes t_acc(s); by symmetry the
        // distance covered is s * t_acc(s) / 2.
        let va = a * a / j; // speed reached when the accel ramp saturates
        let t_acc = |s: f64| {
            if s >= va {
                s / a + a / j
            } else {
                2.0 * (s / j).sqrt()
            }
        };
        let d_acc = |s: f64| s * t_acc(s) / 2.0;
        if 2.0 * d_acc(v) <= d {
            2.0 * t_acc(v) + (d - 2.0 * d_acc(v)) / v
        } else {
            // Peak speed below v_max: solve 2 * d_acc(s) = d. With the
            // saturated ramp this is s²/a + s·a/j = d.
            let half_ramp = va / 2.0;
            let s_sat = -half_ramp + (half_ramp * half_ramp + a * d).sqrt();
            if s_sat >= va {
                2.0 * t_acc(s_sat)
            } else {
                // Jerk-limited triangle: 2·s^(3/2)/sqrt(j) = d.
                let s_tri = (d * j.sqrt() / 2.0).powf(2.0 / 3.0);
                2.0 * t_acc(s_tri)
            }
        }
    }
}

/// Splits the polyline at turn vertices and times each collinear run as one
/// rest-to-rest profile.
pub fn time_parameterize(polyline: &[Point], limits: &MotionLimits) -> TimingProfile {
    // Collapse zero-length segments, remembering original indices.
    let mut kept: Vec<(usize, Point)> = Vec::with_capacity(polyline.len());
    for (i, &p) in polyline.iter().enumerate() {
        if kept.last().map(|&(_, q)| q) != Some(p) {
            kept.push((i, p));
        }
    }
    if kept.len() < 2 {
        return TimingProfile {
            segment_durations: Vec::new(),
            total: 0.0,
            stop_vertices: kept.iter().map(|&(i, _)| i).collect(),
        };
    }

    let mut stop_vertices = vec![kept[0].0];
    let mut segment_durations = Vec::new();
    let mut run_length = 0.0;
    for k in 1..kept.len() {
        let (idx, p) = kept[k];
        let (_, prev) = kept[k - 1];
        run_length += prev.distance(p);
        let is_last = k == kept.len() - 1;
        let is_turn = if is_last {
            false
        } else {
            let (_, next) = kept[k + 1];
            heading_change(prev, p, next) > TURN_TOLERANCE_RAD
        };
        if is_last || is_turn {
            segment_durations.push(rest_to_rest_time(run_length, limits));
            stop_vertices.push(idx);
            run_length = 0.0;
        }
    }
    TimingProfile {
        total: segment_durations.iter().sum(),
        segment_durations,
        stop_vertices,
    }
}

fn heading_change(a: Point, b: Point, c: Point) -> f64 {
    let (ux, uy) = (b.x - a.x, b.y - a.y);
    let (vx, vy) = (c.x - b.x, c.y - b.y);
    let dot = ux * vx + uy * vy;
    let cross = ux * vy - uy * vx;
    cross.abs().atan2(dot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_boundary_case_is_exact() {
        // v²/a = 10 = d: triangular and cruise formulas agree at 4 s.
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        assert_eq!(rest_to_rest_time(10.0, &limits), 4.0);
    }

    #[test]
    fn zero_distance_is_zero_time() {
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        assert_eq!(rest_to_rest_time(0.0, &limits), 0.0);
    }

    #[test]
    fn cruise_dominated_case_is_exact() {
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        assert_eq!(rest_to_rest_time(100.0, &limits), 22.0);
    }

    #[test]
    fn s_curve_dominates_trapezoid_and_converges() {
        let trap = MotionLimits::trapezoidal(5.0, 2.5);
        for d in [0.5, 3.0, 10.0, 42.0, 250.0] {
            let t_trap = rest_to_rest_time(d, &trap);
            let mut prev = f64::INFINITY;
            for j in [1.0, 10.0, 100.0, 1e4, 1e8] {
                let t_s = rest_to_rest_time(d, &MotionLimits { v_max: 5.0, a_max: 2.5, j_max: j });
                assert!(t_s >= t_trap - 1e-9, "d={d} j={j}: {t_s} < {t_trap}");
                assert!(t_s <= prev + 1e-9, "duration should fall as jerk relaxes");
                prev = t_s;
            }
            assert!((prev - t_trap).abs() < 1e-3, "j -> inf should approach trapezoid");
        }
    }

    #[test]
    fn profile_splits_at_turns() {
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        let l_path = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
        ];
        let profile = time_parameterize(&l_path, &limits);
        assert_eq!(profile.stop_vertices, vec![0, 1, 2]);
        assert_eq!(profile.segment_durations.len(), 2);
        assert_eq!(profile.total, 8.0); // two boundary-case runs of 10 m

        // Same length, no turn: one run of 20 m.
        let straight = [Point::new(0.0, 0.0), Point::new(20.0, 0.0)];
        let p2 = time_parameterize(&straight, &limits);
        assert_eq!(p2.stop_vertices, vec![0, 1]);
        assert!(p2.total < profile.total);
    }

    #[test]
    fn collinear_vertices_do_not_stop() {
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        let path = [
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 0.0), // duplicate collapses
            Point::new(20.0, 0.0),
        ];
        let profile = time_parameterize(&path, &limits);
        assert_eq!(profile.stop_vertices, vec![0, 3]);
        assert_eq!(profile.total, rest_to_rest_time(20.0, &limits));
    }

    #[test]
    fn reversal_symmetry() {
        let limits = MotionLimits::trapezoidal(4.0, 1.5);
        let path = [
            Point::new(0.0, 0.0),
            Point::new(7.0, 0.0),
            Point::new(7.0, 3.0),
            Point::new(2.0, 3.0),
        ];
        let fwd = time_parameterize(&path, &limits);
        let mut rev = path;
        rev.reverse();
        let bwd = time_parameterize(&rev, &limits);
        assert!((fwd.total - bwd.total).abs() < 1e-12);
    }

    #[test]
    fn duration_monotone_in_length_and_turns() {
        let limits = MotionLimits::trapezoidal(5.0, 2.5);
        let mut prev = 0.0;
        for d in 1..40 {
            let t = rest_to_rest_time(d as f64, &limits);
            assert!(t >= prev);
            prev = t;
        }
        // Fixed length, more turns: zig-zag vs straight.
        let straight = [Point::new(0.0, 0.0), Point::new(30.0, 0.0)];
        let zigzag = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(20.0, 10.0),
        ];
        let t_straight = time_parameterize(&straight, &limits).total;
        let t_zigzag = time_parameterize(&zigzag, &limits).total;
        assert!(t_zigzag > t_straight);
    }

    #[test]
    fn degenerate_polylines() {
        let limits = MotionLimits::default();
        assert_eq!(time_parameterize(&[], &limits).total, 0.0);
        let point = [Point::new(1.0, 1.0)];
        let profile = time_parameterize(&point, &limits);
        assert_eq!(profile.total, 0.0);
        assert_eq!(profile.stop_vertices, vec![0]);
    }
}
