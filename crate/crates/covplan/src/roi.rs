//! Polygonal regions of interest, footprint-grid rasterization, and the
//! sub-sampling coverage oracle.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{clip_area_to_rect, linf_segment_distance, point_in_ring, ring_signed_area, Point, Rect};
use crate::grid::{Cell, CellRegion, GridSpec};

/// Polygon with optional holes, in meters. The outer ring is
/// counterclockwise, hole rings clockwise; rings omit the closing vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonROI {
    pub id: String,
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
}

impl PolygonROI {
    pub fn bounding_rect(&self) -> Option<Rect> {
        let mut pts = self.outer.iter();
        let first = pts.next()?;
        let mut rect = Rect::new(*first, *first);
        for p in self.outer.iter().chain(self.holes.iter().flatten()) {
            rect.min.x = rect.min.x.min(p.x);
            rect.min.y = rect.min.y.min(p.y);
            rect.max.x = rect.max.x.max(p.x);
            rect.max.y = rect.max.y.max(p.y);
        }
        Some(rect)
    }

    /// Checks ring simplicity, orientation, and hole containment/disjointness.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidPolygon {
                id: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.outer.len() < 3 {
            return fail("outer ring needs at least 3 vertices");
        }
        if ring_signed_area(&self.outer) <= 0.0 {
            return fail("outer ring must be counterclockwise");
        }
        if !ring_is_simple(&self.outer) {
            return fail("outer ring self-intersects");
        }
        for (k, hole) in self.holes.iter().enumerate() {
            if hole.len() < 3 {
                return fail(&format!("hole {k} needs at least 3 vertices"));
            }
            if ring_signed_area(hole) >= 0.0 {
                return fail(&format!("hole {k} must be clockwise"));
            }
            if !ring_is_simple(hole) {
                return fail(&format!("hole {k} self-intersects"));
            }
            for p in hole {
                if !point_in_ring(*p, &self.outer) && !on_ring_vertex(*p, &self.outer) {
                    return fail(&format!("hole {k} reaches outside the outer ring"));
                }
            }
        }
        for a in 0..self.holes.len() {
            for b in (a + 1)..self.holes.len() {
                if rings_touch(&self.holes[a], &self.holes[b]) {
                    return fail(&format!("holes {a} and {b} are not disjoint"));
                }
            }
        }
        Ok(())
    }

    /// Point containment honoring holes (even-odd on each ring).
    pub fn contains(&self, p: Point) -> bool {
        point_in_ring(p, &self.outer) && !self.holes.iter().any(|h| point_in_ring(p, h))
    }
}

fn on_ring_vertex(p: Point, ring: &[Point]) -> bool {
    ring.iter().any(|v| *v == p)
}

fn segments(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    (0..ring.len()).map(|i| (ring[i], ring[(i + 1) % ring.len()]))
}

fn proper_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

fn ring_is_simple(ring: &[Point]) -> bool {
    let segs: Vec<_> = segments(ring).collect();
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            if proper_cross(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                return false;
            }
        }
    }
    true
}

fn rings_touch(a: &[Point], b: &[Point]) -> bool {
    for (p, q) in segments(a) {
        for (r, s) in segments(b) {
            if proper_cross(p, q, r, s) {
                return true;
            }
        }
    }
    // One fully inside the other also counts as touching.
    point_in_ring(a[0], b) || point_in_ring(b[0], a)
}

/// Source of the footprint width: either measured directly or derived from
/// altitude and the field-of-view half-angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FootprintSpec {
    Direct { width: f64 },
    Derived { altitude: f64, half_angle: f64 },
}

/// Cross-track footprint width: `2 * h * tan(half_angle)` for the derived
/// form, or the direct width unchanged.
pub fn footprint_width(spec: &FootprintSpec) -> Result<f64> {
    match *spec {
        FootprintSpec::Direct { width } => {
            if !(width > 0.0) || !width.is_finite() {
                return Err(Error::InvalidFootprint(format!(
                    "direct width must be positive, got {width}"
                )));
            }
            Ok(width)
        }
        FootprintSpec::Derived { altitude, half_angle } => {
            if !(altitude > 0.0) || !altitude.is_finite() {
                return Err(Error::InvalidFootprint(format!(
                    "altitude must be positive, got {altitude}"
                )));
            }
            if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
                return Err(Error::InvalidFootprint(format!(
                    "half-angle must lie in (0, pi/2), got {half_angle}"
                )));
            }
            Ok(2.0 * altitude * half_angle.tan())
        }
    }
}

/// Coverage acceptance parameters: a cell counts as covered once the swath
/// union reaches fraction `alpha` of its area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    pub alpha: f64,
    pub footprint: f64,
}

impl CoverageParams {
    pub fn new(alpha: f64, footprint: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(footprint > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "footprint must be positive, got {footprint}"
            )));
        }
        Ok(CoverageParams { alpha, footprint })
    }
}

/// Grid whose origin is the ROI bounding-box minimum floored to a multiple
/// of the cell size, sized to contain the whole outer ring.
pub fn grid_for_roi(roi: &PolygonROI, cell_size: f64) -> Result<GridSpec> {
    let bbox = roi.bounding_rect().ok_or(Error::EmptyInput)?;
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "cell size must be positive, got {cell_size}"
        )));
    }
    let origin = Point::new(
        (bbox.min.x / cell_size).floor() * cell_size,
        (bbox.min.y / cell_size).floor() * cell_size,
    );
    let columns = ((bbox.max.x - origin.x) / cell_size).ceil().max(1.0) as u32;
    let rows = ((bbox.max.y - origin.y) / cell_size).ceil().max(1.0) as u32;
    GridSpec::new(origin, cell_size, columns, rows)
}

/// Cells flagged during rasterization: they intersect a hole without lying
/// entirely inside it, so they are retained but worth inspecting.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RasterDiagnostics {
    pub hole_boundary_cells: Vec<Cell>,
}

/// Rasterizes a polygon onto the grid. A cell is retained when its closed
/// square intersects the outer polygon with positive area and does not lie
/// entirely within any hole.
pub fn rasterize(roi: &PolygonROI, grid: &GridSpec) -> Result<CellRegion> {
    rasterize_detailed(roi, grid).map(|(region, _)| region)
}

pub fn rasterize_detailed(roi: &PolygonROI, grid: &GridSpec) -> Result<(CellRegion, RasterDiagnostics)> {
    let bbox = roi.bounding_rect().ok_or(Error::EmptyInput)?;
    let w = grid.cell_size;
    let cell_area = w * w;
    let eps = 1e-9 * cell_area;

    let col_lo = (((bbox.min.x - grid.origin.x) / w).floor().max(0.0)) as u32;
    let row_lo = (((bbox.min.y - grid.origin.y) / w).floor().max(0.0)) as u32;
    let col_hi = ((((bbox.max.x - grid.origin.x) / w).ceil()) as u32).min(grid.columns);
    let row_hi = ((((bbox.max.y - grid.origin.y) / w).ceil()) as u32).min(grid.rows);

    let mut cells = BTreeSet::new();
    let mut diag = RasterDiagnostics::default();
    for col in col_lo..col_hi {
        for row in row_lo..row_hi {
            let cell = Cell::new(col, row);
            let rect = grid.cell_rect(cell);
            if clip_area_to_rect(&roi.outer, &rect) <= eps {
                continue;
            }
            let mut inside_hole = false;
            let mut straddles = false;
            for hole in &roi.holes {
                let a = clip_area_to_rect(hole, &rect);
                if a >= cell_area - eps {
                    inside_hole = true;
                    break;
                }
                if a > eps {
                    straddles = true;
                }
            }
            if inside_hole {
                continue;
            }
            if straddles {
                diag.hole_boundary_cells.push(cell);
            }
            cells.insert(cell);
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyRegion(roi.id.clone()));
    }
    Ok((
        CellRegion::from_validated(grid.clone(), cells, roi.id.clone()),
        diag,
    ))
}

/// Default sub-sampling resolution (points per cell side) for coverage checks.
pub const DEFAULT_COVERAGE_SAMPLES: usize = 20;

/// Fraction of retained cells whose area is covered to at least `alpha` by
/// the union of footprint-wide swaths centered on the trajectory segments.
///
/// Coverage is evaluated on a `samples x samples` lattice per cell; a sample
/// is covered when its Chebyshev distance to some segment is at most half
/// the footprint. This sampling rule is the independent oracle the rest of
/// the pipeline is verified against, so it stays deliberately simple.
pub fn coverage_ratio_sampled(
    region: &CellRegion,
    trajectory: &[Point],
    params: &CoverageParams,
    samples: usize,
) -> f64 {
    if region.is_empty() {
        return 0.0;
    }
    if trajectory.is_empty() {
        return 0.0;
    }
    let w = params.footprint;
    let half = w / 2.0;
    let grid = region.grid();

    let segs: Vec<(Point, Point)> = if trajectory.len() == 1 {
        vec![(trajectory[0], trajectory[0])]
    } else {
        trajectory.windows(2).map(|p| (p[0], p[1])).collect()
    };

    // Bucket segments by the grid cells their inflated bounding box overlaps.
    let mut buckets: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    let cols = grid.columns as i64;
    let rows = grid.rows as i64;
    for (idx, (a, b)) in segs.iter().enumerate() {
        let r = Rect::new(
            Point::new(a.x.min(b.x), a.y.min(b.y)),
            Point::new(a.x.max(b.x), a.y.max(b.y)),
        )
        .inflate(half + 1e-9);
        let c0 = (((r.min.x - grid.origin.x) / w).floor() as i64).clamp(0, cols.max(1) - 1);
        let c1 = (((r.max.x - grid.origin.x) / w).floor() as i64).clamp(0, cols.max(1) - 1);
        let r0 = (((r.min.y - grid.origin.y) / w).floor() as i64).clamp(0, rows.max(1) - 1);
        let r1 = (((r.max.y - grid.origin.y) / w).floor() as i64).clamp(0, rows.max(1) - 1);
        for c in c0..=c1 {
            for row in r0..=r1 {
                buckets.entry((c as u32, row as u32)).or_default().push(idx);
            }
        }
    }

    let k = samples.max(1);
    let per_cell = (k * k) as f64;
    let mut covered_cells = 0usize;
    for cell in region.cells() {
        let Some(candidates) = buckets.get(&(cell.col, cell.row)) else {
            continue;
        };
        let rect = grid.cell_rect(cell);
        let step = w / k as f64;
        let mut covered = 0usize;
        for i in 0..k {
            let x = rect.min.x + (i as f64 + 0.5) * step;
            for j in 0..k {
                let y = rect.min.y + (j as f64 + 0.5) * step;
                let p = Point::new(x, y);
                if candidates
                    .iter()
                    .any(|&s| linf_segment_distance(p, segs[s].0, segs[s].1) <= half)
                {
                    covered += 1;
                }
            }
        }
        if covered as f64 / per_cell >= params.alpha {
            covered_cells += 1;
        }
    }
    covered_cells as f64 / region.len() as f64
}

/// [`coverage_ratio_sampled`] at the default resolution.
pub fn coverage_ratio(region: &CellRegion, trajectory: &[Point], params: &CoverageParams) -> f64 {
    coverage_ratio_sampled(region, trajectory, params, DEFAULT_COVERAGE_SAMPLES)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_ring(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
        vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ]
    }

    fn hole_ring(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
        let mut r = rect_ring(x0, y0, x1, y1);
        r.reverse();
        r
    }

    /// Brute-force area fraction of a cell inside the ROI, sampled on an
    /// `n x n` lattice. Independent of the clipping rasterizer.
    fn sampled_cell_fraction(roi: &PolygonROI, rect: &Rect, n: usize) -> f64 {
        let mut hit = 0usize;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(
                    rect.min.x + (i as f64 + 0.5) / n as f64 * rect.width(),
                    rect.min.y + (j as f64 + 0.5) / n as f64 * rect.height(),
                );
                if point_in_ring(p, &roi.outer) {
                    hit += 1;
                }
            }
        }
        hit as f64 / (n * n) as f64
    }

    #[test]
    fn footprint_width_examples() {
        let w = footprint_width(&FootprintSpec::Derived {
            altitude: 10.0,
            half_angle: std::f64::consts::FRAC_PI_4,
        })
        .unwrap();
        assert!((w - 20.0).abs() < 1e-9);

        let direct = footprint_width(&FootprintSpec::Direct { width: 3.5 }).unwrap();
        assert_eq!(direct, 3.5);

        // Frozen from a 50-digit evaluation of 2*100*tan(0.3).
        let derived = footprint_width(&FootprintSpec::Derived {
            altitude: 100.0,
            half_angle: 0.3,
        })
        .unwrap();
        assert!((derived - 61.867249921924647).abs() / 61.867249921924647 < 1e-12);

        assert!(footprint_width(&FootprintSpec::Derived {
            altitude: -1.0,
            half_angle: 0.3
        })
        .is_err());
        assert!(footprint_width(&FootprintSpec::Derived {
            altitude: 1.0,
            half_angle: 2.0
        })
        .is_err());
        assert!(footprint_width(&FootprintSpec::Direct { width: 0.0 }).is_err());
    }

    #[test]
    fn rasterize_aligned_square() {
        let w = 2.0;
        let roi = PolygonROI {
            id: "sq".into(),
            outer: rect_ring(0.0, 0.0, 2.0 * w, 2.0 * w),
            holes: vec![],
        };
        let grid = grid_for_roi(&roi, w).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        assert_eq!(region.len(), 4);
    }

    #[test]
    fn rasterize_small_hole_keeps_all_cells() {
        let w = 2.0;
        // Concentric hole of side w/2 straddles all four cells.
        let roi = PolygonROI {
            id: "sq-hole".into(),
            outer: rect_ring(0.0, 0.0, 2.0 * w, 2.0 * w),
            holes: vec![hole_ring(1.5, 1.5, 2.5, 2.5)],
        };
        roi.validate().unwrap();
        let grid = grid_for_roi(&roi, w).unwrap();
        let (region, diag) = rasterize_detailed(&roi, &grid).unwrap();
        assert_eq!(region.len(), 4);
        assert_eq!(diag.hole_boundary_cells.len(), 4);

        // Sampling agrees that no cell is entirely inside the hole.
        for cell in region.cells() {
            let rect = grid.cell_rect(cell);
            let mut inside_hole = 0usize;
            let n = 100;
            for i in 0..n {
                for j in 0..n {
                    let p = Point::new(
                        rect.min.x + (i as f64 + 0.5) / n as f64 * rect.width(),
                        rect.min.y + (j as f64 + 0.5) / n as f64 * rect.height(),
                    );
                    if point_in_ring(p, &roi.holes[0]) {
                        inside_hole += 1;
                    }
                }
            }
            assert!(inside_hole < n * n);
        }
    }

    #[test]
    fn rasterize_center_hole_drops_center_cell() {
        let w = 2.0;
        let roi = PolygonROI {
            id: "ring".into(),
            outer: rect_ring(0.0, 0.0, 3.0 * w, 3.0 * w),
            holes: vec![hole_ring(w, w, 2.0 * w, 2.0 * w)],
        };
        roi.validate().unwrap();
        let grid = grid_for_roi(&roi, w).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        assert_eq!(region.len(), 8);
        assert!(!region.contains(Cell::new(1, 1)));
    }

    #[test]
    fn rasterize_misses_tiny_offset_roi() {
        let roi = PolygonROI {
            id: "tiny".into(),
            outer: rect_ring(10.25, 10.25, 10.3, 10.3),
            holes: vec![],
        };
        let grid = grid_for_roi(&roi, 1.0).unwrap();
        // Tiny but still positive-area: the containing cell is retained.
        assert_eq!(rasterize(&roi, &grid).unwrap().len(), 1);

        // A near-degenerate sliver falls below the positive-area threshold.
        let sliver = PolygonROI {
            id: "sliver".into(),
            outer: rect_ring(0.25, 0.25, 0.25 + 1e-12, 0.75),
            holes: vec![],
        };
        let grid = grid_for_roi(&sliver, 1.0).unwrap();
        assert!(matches!(rasterize(&sliver, &grid), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn rasterized_cells_intersect_outer_by_sampling() {
        // Off-grid pentagon-ish blob; every retained cell should show
        // nonzero sampled overlap with the outer ring (1% tolerance).
        let roi = PolygonROI {
            id: "blob".into(),
            outer: vec![
                Point::new(0.3, 0.2),
                Point::new(6.7, 0.9),
                Point::new(7.4, 4.4),
                Point::new(3.1, 6.8),
                Point::new(-0.6, 3.9),
            ],
            holes: vec![],
        };
        roi.validate().unwrap();
        let grid = grid_for_roi(&roi, 1.0).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        for cell in region.cells() {
            let rect = grid.cell_rect(cell);
            let frac = sampled_cell_fraction(&roi, &rect, 100);
            let clipped = clip_area_to_rect(&roi.outer, &rect) / rect.area();
            assert!(clipped > 0.0);
            // The sampling oracle confirms the intersection to 1% of the cell.
            assert!(
                frac >= clipped - 0.01 && (frac - clipped).abs() <= 0.02,
                "cell ({},{}) sampled {frac} clipped {clipped}",
                cell.col,
                cell.row
            );
        }
    }

    #[test]
    fn rasterize_monotone_in_outer_ring() {
        let grid = GridSpec::new(Point::new(0.0, 0.0), 1.0, 32, 32).unwrap();
        let small = PolygonROI {
            id: "small".into(),
            outer: rect_ring(0.4, 0.4, 4.3, 3.1),
            holes: vec![],
        };
        let big = PolygonROI {
            id: "big".into(),
            outer: rect_ring(0.1, 0.2, 6.9, 5.5),
            holes: vec![],
        };
        let rs = rasterize(&small, &grid).unwrap();
        let rb = rasterize(&big, &grid).unwrap();
        assert!(rs.cell_set().is_subset(rb.cell_set()));
    }

    #[test]
    fn coverage_single_track_covers_row() {
        let w = 1.0;
        let roi = PolygonROI {
            id: "row".into(),
            outer: rect_ring(0.0, 0.0, 5.0, 1.0),
            holes: vec![],
        };
        let grid = grid_for_roi(&roi, w).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        let params = CoverageParams::new(1.0, w).unwrap();
        let track = [Point::new(0.0, 0.5), Point::new(5.0, 0.5)];
        assert_eq!(coverage_ratio(&region, &track, &params), 1.0);
    }

    #[test]
    fn coverage_point_counts_one_footprint_square() {
        let w = 1.0;
        let roi = PolygonROI {
            id: "pair".into(),
            outer: rect_ring(0.0, 0.0, 2.0, 1.0),
            holes: vec![],
        };
        let grid = grid_for_roi(&roi, w).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        let params = CoverageParams::new(0.99, w).unwrap();
        let hover = [Point::new(0.5, 0.5)];
        assert_eq!(coverage_ratio(&region, &hover, &params), 0.5);
    }

    #[test]
    fn coverage_serpentine_covers_block() {
        let w = 1.0;
        let roi = PolygonROI {
            id: "block".into(),
            outer: rect_ring(0.0, 0.0, 4.0, 4.0),
            holes: vec![],
        };
        let grid = grid_for_roi(&roi, w).unwrap();
        let region = rasterize(&roi, &grid).unwrap();
        let params = CoverageParams::new(1.0, w).unwrap();
        let mut path = Vec::new();
        for row in 0..4 {
            let y = row as f64 + 0.5;
            if row % 2 == 0 {
                path.push(Point::new(0.0, y));
                path.push(Point::new(4.0, y));
            } else {
                path.push(Point::new(4.0, y));
                path.push(Point::new(0.0, y));
            }
        }
        assert_eq!(coverage_ratio_sampled(&region, &path, &params, 50), 1.0);
    }

    #[test]
    fn validate_rejects_bad_rings() {
        let bowtie = PolygonROI {
            id: "bow".into(),
            outer: vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 2.0),
                Point::new(2.0, 0.0),
                Point::new(0.0, 2.0),
            ],
            holes: vec![],
        };
        assert!(bowtie.validate().is_err());

        let outside_hole = PolygonROI {
            id: "oh".into(),
            outer: rect_ring(0.0, 0.0, 2.0, 2.0),
            holes: vec![hole_ring(1.5, 1.5, 3.5, 3.5)],
        };
        assert!(outside_hole.validate().is_err());
    }
}
