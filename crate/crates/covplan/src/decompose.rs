//! Monotonicity-driven decomposition of rectilinear regions.
//!
//! A region is directly sweepable when it is monotone along at least one
//! cardinal axis (every probe line crosses it in a single interval). Regions
//! failing that in both axes are cut recursively; the cut axis and position
//! come from a cumulative gap-severity measure that locates where naive
//! sweeps would waste the most distance crossing out-of-region spans. A
//! post-pass merges adjacent partitions whose union is still sweepable.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::grid::{Cell, CellRegion};

/// Probe-line orientation. A region is `Horizontal`-monotone when every
/// horizontal probe line crosses it in one interval; sweep tracks then run
/// horizontally, one per row band. Likewise for `Vertical`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// One probe line: its coordinate on the perpendicular axis, the grid band
/// `span` it probes, and the occupied intervals it crosses (meters).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLine {
    pub coordinate: f64,
    pub span: (f64, f64),
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisProbe {
    pub axis: Axis,
    pub lines: Vec<ProbeLine>,
}

/// Probe lines at the midpoints of every occupied grid band. For horizontal
/// probes there is one line per occupied row; intervals are the row's
/// maximal occupied column runs. Line count is at most rows + columns.
pub fn axis_probe(region: &CellRegion, axis: Axis) -> AxisProbe {
    let grid = region.grid();
    let map = match axis {
        Axis::Horizontal => region.rows_map(),
        Axis::Vertical => region.cols_map(),
    };
    let lines = map
        .into_iter()
        .map(|(band, indices)| {
            let (lo, hi) = match axis {
                Axis::Horizontal => (grid.y_line(band), grid.y_line(band + 1)),
                Axis::Vertical => (grid.x_line(band), grid.x_line(band + 1)),
            };
            let to_meters = |(a, b): (u32, u32)| match axis {
                Axis::Horizontal => (grid.x_line(a), grid.x_line(b + 1)),
                Axis::Vertical => (grid.y_line(a), grid.y_line(b + 1)),
            };
            ProbeLine {
                coordinate: (lo + hi) / 2.0,
                span: (lo, hi),
                intervals: CellRegion::runs(&indices).into_iter().map(to_meters).collect(),
            }
        })
        .collect();
    AxisProbe { axis, lines }
}

/// True when every probe line crosses the region in exactly one interval
/// (two boundary intersections).
pub fn is_monotone(probe: &AxisProbe) -> bool {
    probe.lines.iter().all(|l| l.intervals.len() == 1)
}

/// Axes along which a region is monotone. Nonempty means the region is
/// directly sweepable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleAxes {
    pub horizontal: bool,
    pub vertical: bool,
}

impl FeasibleAxes {
    pub fn is_empty(&self) -> bool {
        !self.horizontal && !self.vertical
    }

    pub fn contains(&self, axis: Axis) -> bool {
        match axis {
            Axis::Horizontal => self.horizontal,
            Axis::Vertical => self.vertical,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Axis> {
        let mut v = Vec::with_capacity(2);
        if self.horizontal {
            v.push(Axis::Horizontal);
        }
        if self.vertical {
            v.push(Axis::Vertical);
        }
        v.into_iter()
    }
}

pub fn feasibility(region: &CellRegion) -> FeasibleAxes {
    FeasibleAxes {
        horizontal: is_monotone(&axis_probe(region, Axis::Horizontal)),
        vertical: is_monotone(&axis_probe(region, Axis::Vertical)),
    }
}

/// Cross-section of a probe line with more than one interval: the grid band
/// it occupies on the probed axis plus the bounding box of the region slab.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBand {
    pub axis_interval: (f64, f64),
    pub bounding_box: Rect,
}

/// Total gap severity along one axis: the summed lengths of the out-of-region
/// spans between consecutive intervals over all probe lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub axis: Axis,
    pub severity: f64,
    pub bands: Vec<GapBand>,
}

pub fn gap_severity(probe: &AxisProbe) -> GapReport {
    let mut severity = 0.0;
    let mut bands = Vec::new();
    for line in &probe.lines {
        if line.intervals.len() < 2 {
            continue;
        }
        for pair in line.intervals.windows(2) {
            severity += pair[1].0 - pair[0].1;
        }
        let lo = line.intervals.first().expect("nonempty").0;
        let hi = line.intervals.last().expect("nonempty").1;
        let bounding_box = match probe.axis {
            Axis::Horizontal => Rect::new(Point::new(lo, line.span.0), Point::new(hi, line.span.1)),
            Axis::Vertical => Rect::new(Point::new(line.span.0, lo), Point::new(line.span.1, hi)),
        };
        bands.push(GapBand {
            axis_interval: line.span,
            bounding_box,
        });
    }
    GapReport {
        axis: probe.axis,
        severity,
        bands,
    }
}

/// Grid-aligned cut line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutLine {
    pub axis: Axis,
    pub coordinate: f64,
}

/// Picks the cut axis (greater severity, horizontal on ties) and position:
/// the midpoint of the union of that axis' gap bands, snapped to the nearest
/// grid line strictly inside the region bounding box, ties toward the lower
/// coordinate.
pub fn select_cut(region: &CellRegion, horizontal: &GapReport, vertical: &GapReport) -> Result<CutLine> {
    debug_assert_eq!(horizontal.axis, Axis::Horizontal);
    debug_assert_eq!(vertical.axis, Axis::Vertical);
    let (axis, report) = if horizontal.severity >= vertical.severity {
        (Axis::Horizontal, horizontal)
    } else {
        (Axis::Vertical, vertical)
    };
    debug_assert!(!report.bands.is_empty(), "cut requested without gap bands");
    let lo = report
        .bands
        .iter()
        .map(|b| b.axis_interval.0)
        .fold(f64::INFINITY, f64::min);
    let hi = report
        .bands
        .iter()
        .map(|b| b.axis_interval.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let raw = (lo + hi) / 2.0;
    snap_to_interior_line(region, axis, raw)
}

/// Snaps `raw` to the nearest interior grid line of `region` along `axis`,
/// ties toward lower, clamping into the strict interior of the bounding box.
fn snap_to_interior_line(region: &CellRegion, axis: Axis, raw: f64) -> Result<CutLine> {
    let grid = region.grid();
    let (min, max) = region.bounds().ok_or(Error::EmptyInput)?;
    let (first, last, origin) = match axis {
        // Interior horizontal lines separate rows: indices min.row+1 ..= max.row.
        Axis::Horizontal => (min.row + 1, max.row, grid.origin.y),
        Axis::Vertical => (min.col + 1, max.col, grid.origin.x),
    };
    if first > last {
        return Err(Error::NoInteriorCut(axis));
    }
    let t = (raw - origin) / grid.cell_size;
    let floor = t.floor();
    let k = if t - floor > 0.5 { floor + 1.0 } else { floor };
    let k = (k as i64).clamp(i64::from(first), i64::from(last)) as u32;
    let coordinate = match axis {
        Axis::Horizontal => grid.y_line(k),
        Axis::Vertical => grid.x_line(k),
    };
    Ok(CutLine { axis, coordinate })
}

/// Fallback when the midpoint rule has no usable line: the grid line bounding
/// the first gap band, clamped into the interior.
fn fallback_cut(region: &CellRegion, report: &GapReport) -> Result<CutLine> {
    let band = report.bands.first().ok_or(Error::NoInteriorCut(report.axis))?;
    snap_to_interior_line(region, report.axis, band.axis_interval.0)
}

/// A connected, sweepable piece of the source region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub id: usize,
    pub region: CellRegion,
    pub feasible_axes: FeasibleAxes,
    pub neighbors: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSet {
    pub partitions: Vec<Partition>,
    pub source: CellRegion,
}

impl PartitionSet {
    /// Builds a normalized set from leaf regions: leaves are ordered by
    /// `(min row, min col)`, re-labeled, and linked to edge-adjacent
    /// neighbors.
    fn assemble(mut leaves: Vec<CellRegion>, source: &CellRegion) -> Self {
        leaves.sort_by_key(CellRegion::sort_key);
        let mut owner: BTreeMap<Cell, usize> = BTreeMap::new();
        for (idx, leaf) in leaves.iter().enumerate() {
            for cell in leaf.cells() {
                owner.insert(cell, idx);
            }
        }
        let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); leaves.len()];
        for (&cell, &idx) in &owner {
            let mut adj = Vec::with_capacity(2);
            adj.push(Cell::new(cell.col + 1, cell.row));
            adj.push(Cell::new(cell.col, cell.row + 1));
            for n in adj {
                if let Some(&other) = owner.get(&n) {
                    if other != idx {
                        neighbors[idx].insert(other);
                        neighbors[other].insert(idx);
                    }
                }
            }
        }
        let partitions = leaves
            .into_iter()
            .enumerate()
            .map(|(id, region)| {
                let region = region.with_id(format!("{}/p{}", source.component_id(), id));
                let feasible_axes = feasibility(&region);
                debug_assert!(!feasible_axes.is_empty(), "partition must be sweepable");
                Partition {
                    id,
                    region,
                    feasible_axes,
                    neighbors: std::mem::take(&mut neighbors[id]),
                }
            })
            .collect();
        PartitionSet {
            partitions,
            source: source.clone(),
        }
    }

    pub fn total_cells(&self) -> usize {
        self.partitions.iter().map(|p| p.region.len()).sum()
    }
}

/// Cuts and gap bands recorded while decomposing, for debug rendering.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub cuts: Vec<CutLine>,
    pub gap_bands: Vec<GapBand>,
}

/// Recursively decomposes a connected region into sweepable partitions.
pub fn decompose(region: &CellRegion) -> Result<PartitionSet> {
    decompose_traced(region).map(|(set, _)| set)
}

pub fn decompose_traced(region: &CellRegion) -> Result<(PartitionSet, DecompositionTrace)> {
    if region.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !region.is_connected() {
        return Err(Error::DisconnectedRegion(region.component_id().to_string()));
    }
    let mut trace = DecompositionTrace::default();
    let mut leaves = Vec::new();
    split_recursive(region.clone(), 0, region.len(), &mut leaves, &mut trace)?;
    Ok((PartitionSet::assemble(leaves, region), trace))
}

fn split_recursive(
    region: CellRegion,
    depth: usize,
    budget: usize,
    leaves: &mut Vec<CellRegion>,
    trace: &mut DecompositionTrace,
) -> Result<()> {
    assert!(depth <= budget, "recursion exceeded cell count; cuts must shrink regions");
    if !feasibility(&region).is_empty() {
        leaves.push(region);
        return Ok(());
    }
    let horizontal = gap_severity(&axis_probe(&region, Axis::Horizontal));
    let vertical = gap_severity(&axis_probe(&region, Axis::Vertical));
    debug_assert!(horizontal.severity > 0.0 && vertical.severity > 0.0);
    let cut = match select_cut(&region, &horizontal, &vertical) {
        Ok(cut) => cut,
        Err(Error::NoInteriorCut(_)) => {
            let report = if horizontal.severity >= vertical.severity {
                &horizontal
            } else {
                &vertical
            };
            fallback_cut(&region, report)?
        }
        Err(e) => return Err(e),
    };
    for band in if cut.axis == Axis::Horizontal { &horizontal } else { &vertical }.bands.iter() {
        trace.gap_bands.push(band.clone());
    }
    trace.cuts.push(cut);

    let (below, above) = split_cells(&region, cut);
    debug_assert!(!below.is_empty() && !above.is_empty(), "interior cut leaves both sides populated");
    for side in [below, above] {
        let side_region = CellRegion::from_validated(
            region.grid().clone(),
            side,
            region.component_id().to_string(),
        );
        for comp in side_region.connected_components() {
            debug_assert!(comp.len() < region.len());
            split_recursive(comp.with_id(region.component_id().to_string()), depth + 1, budget, leaves, trace)?;
        }
    }
    Ok(())
}

/// Splits cells strictly below/left of the cut from those at or above/right.
fn split_cells(region: &CellRegion, cut: CutLine) -> (BTreeSet<Cell>, BTreeSet<Cell>) {
    let grid = region.grid();
    let k = match cut.axis {
        Axis::Horizontal => ((cut.coordinate - grid.origin.y) / grid.cell_size).round() as u32,
        Axis::Vertical => ((cut.coordinate - grid.origin.x) / grid.cell_size).round() as u32,
    };
    let mut below = BTreeSet::new();
    let mut above = BTreeSet::new();
    for cell in region.cells() {
        let index = match cut.axis {
            Axis::Horizontal => cell.row,
            Axis::Vertical => cell.col,
        };
        if index < k {
            below.insert(cell);
        } else {
            above.insert(cell);
        }
    }
    (below, above)
}

/// Repeatedly merges adjacent partition pairs whose union is still
/// sweepable. Pairs are examined in deterministic order: descending combined
/// cell count, ties by the lower id pair. Runs to a fixpoint.
pub fn merge_pass(set: &PartitionSet) -> PartitionSet {
    let mut regions: Vec<CellRegion> = set.partitions.iter().map(|p| p.region.clone()).collect();
    loop {
        let adjacency = adjacency_pairs(&regions);
        let mut candidates: Vec<(usize, usize)> = adjacency.into_iter().collect();
        candidates.sort_by(|&(a1, b1), &(a2, b2)| {
            let s1 = regions[a1].len() + regions[b1].len();
            let s2 = regions[a2].len() + regions[b2].len();
            s2.cmp(&s1).then((a1, b1).cmp(&(a2, b2)))
        });
        let merged = candidates.into_iter().find(|&(a, b)| {
            let union = regions[a].union(&regions[b]);
            !feasibility(&union).is_empty()
        });
        match merged {
            Some((a, b)) => {
                let union = regions[a].union(&regions[b]);
                regions[a] = union;
                regions.remove(b);
            }
            None => break,
        }
    }
    PartitionSet::assemble(regions, &set.source)
}

fn adjacency_pairs(regions: &[CellRegion]) -> BTreeSet<(usize, usize)> {
    let mut owner: BTreeMap<Cell, usize> = BTreeMap::new();
    for (idx, region) in regions.iter().enumerate() {
        for cell in region.cells() {
            owner.insert(cell, idx);
        }
    }
    let mut pairs = BTreeSet::new();
    for (&cell, &idx) in &owner {
        for n in [Cell::new(cell.col + 1, cell.row), Cell::new(cell.col, cell.row + 1)] {
            if let Some(&other) = owner.get(&n) {
                if other != idx {
                    pairs.insert((idx.min(other), idx.max(other)));
                }
            }
        }
    }
    pairs
}

/// Grid-native boustrophedon baseline: a vertical sweep line visits columns
/// left to right, tracking the occupied row-interval of each open partition.
/// An interval that continues unchanged extends its partition; a changed
/// extent closes and reopens; a split closes the parent; when several open
/// partitions merge into one interval the lowest-id one continues and the
/// rest close. Every partition is a column run with one interval per column,
/// hence trivially sweepable along the vertical axis.
pub fn bcd_decompose(region: &CellRegion) -> Result<PartitionSet> {
    if region.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !region.is_connected() {
        return Err(Error::DisconnectedRegion(region.component_id().to_string()));
    }

    struct OpenPart {
        id: usize,
        cells: BTreeSet<Cell>,
        interval: (u32, u32),
    }

    let cols_map = region.cols_map();
    let mut open: Vec<OpenPart> = Vec::new();
    let mut next_id = 0usize;
    let mut closed: Vec<BTreeSet<Cell>> = Vec::new();
    let mut prev_col: Option<u32> = None;

    for (&col, rows) in &cols_map {
        let runs = CellRegion::runs(rows);
        let contiguous = prev_col.is_some_and(|p| p + 1 == col);
        if !contiguous {
            closed.extend(open.drain(..).map(|p| p.cells));
        }

        let overlaps = |a: (u32, u32), b: (u32, u32)| a.0 <= b.1 && b.0 <= a.1;
        // preds[r] = open partitions overlapping run r; succs[p] = runs
        // overlapping open partition p.
        let preds: Vec<Vec<usize>> = runs
            .iter()
            .map(|&r| {
                open.iter()
                    .enumerate()
                    .filter(|(_, p)| overlaps(p.interval, r))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let succs: Vec<Vec<usize>> = open
            .iter()
            .map(|p| {
                runs.iter()
                    .enumerate()
                    .filter(|(_, &r)| overlaps(p.interval, r))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();

        let mut survivors: Vec<OpenPart> = Vec::new();
        let mut claimed: Vec<Option<usize>> = vec![None; runs.len()]; // run -> open index
        for (run_idx, run_preds) in preds.iter().enumerate() {
            match run_preds.len() {
                0 => {}
                1 => {
                    let p = run_preds[0];
                    // Continue only through an unambiguous 1:1 link with an
                    // unchanged extent.
                    if succs[p].len() == 1 && open[p].interval == runs[run_idx] {
                        claimed[run_idx] = Some(p);
                    }
                }
                _ => {
                    // Merge event: the lowest-id partition among predecessors
                    // that map only to this run carries on.
                    let carrier = run_preds
                        .iter()
                        .copied()
                        .filter(|&p| succs[p].len() == 1)
                        .min_by_key(|&p| open[p].id);
                    if let Some(p) = carrier {
                        claimed[run_idx] = Some(p);
                    }
                }
            }
        }

        let mut old_parts: Vec<Option<OpenPart>> = open.drain(..).map(Some).collect();
        for (run_idx, &run) in runs.iter().enumerate() {
            let cells: BTreeSet<Cell> = (run.0..=run.1).map(|r| Cell::new(col, r)).collect();
            match claimed[run_idx] {
                Some(p) => {
                    let mut part = old_parts[p].take().expect("claimed once");
                    part.cells.extend(cells);
                    part.interval = run;
                    survivors.push(part);
                }
                None => {
                    survivors.push(OpenPart {
                        id: next_id,
                        cells,
                        interval: run,
                    });
                    next_id += 1;
                }
            }
        }
        closed.extend(old_parts.into_iter().flatten().map(|p| p.cells));
        open = survivors;
        prev_col = Some(col);
    }
    closed.extend(open.into_iter().map(|p| p.cells));

    let leaves = closed
        .into_iter()
        .map(|cells| {
            CellRegion::from_validated(region.grid().clone(), cells, region.component_id().to_string())
        })
        .collect();
    Ok(PartitionSet::assemble(leaves, region))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{rect_region, region_from, ring_3x3, u_shape};

    #[test]
    fn probe_single_row() {
        let row = rect_region(3, 1);
        let probe = axis_probe(&row, Axis::Horizontal);
        assert_eq!(probe.lines.len(), 1);
        assert_eq!(probe.lines[0].coordinate, 0.5);
        assert_eq!(probe.lines[0].intervals, vec![(0.0, 3.0)]);
    }

    #[test]
    fn probe_u_shape() {
        let u = u_shape();
        let h = axis_probe(&u, Axis::Horizontal);
        let coords: Vec<f64> = h.lines.iter().map(|l| l.coordinate).collect();
        assert_eq!(coords, vec![0.5, 1.5, 2.5]);
        let counts: Vec<usize> = h.lines.iter().map(|l| l.intervals.len()).collect();
        assert_eq!(counts, vec![1, 2, 2]);

        let v = axis_probe(&u, Axis::Vertical);
        assert_eq!(v.lines.len(), 3);
        assert!(v.lines.iter().all(|l| l.intervals.len() == 1));
    }

    #[test]
    fn probe_line_count_bound() {
        let u = u_shape();
        let (min, max) = u.bounds().unwrap();
        let n = (max.col - min.col + 1) as usize;
        let m = (max.row - min.row + 1) as usize;
        let total = axis_probe(&u, Axis::Horizontal).lines.len()
            + axis_probe(&u, Axis::Vertical).lines.len();
        assert!(total <= n + m);
    }

    #[test]
    fn monotonicity_cases() {
        let rect = rect_region(4, 3);
        assert!(is_monotone(&axis_probe(&rect, Axis::Horizontal)));
        assert!(is_monotone(&axis_probe(&rect, Axis::Vertical)));

        let u = u_shape();
        assert!(!is_monotone(&axis_probe(&u, Axis::Horizontal)));
        assert!(is_monotone(&axis_probe(&u, Axis::Vertical)));

        let ring = ring_3x3();
        assert!(!is_monotone(&axis_probe(&ring, Axis::Horizontal)));
        assert!(!is_monotone(&axis_probe(&ring, Axis::Vertical)));
    }

    #[test]
    fn feasibility_cases() {
        assert_eq!(
            feasibility(&rect_region(2, 2)),
            FeasibleAxes { horizontal: true, vertical: true }
        );
        assert_eq!(
            feasibility(&u_shape()),
            FeasibleAxes { horizontal: false, vertical: true }
        );
        assert!(feasibility(&ring_3x3()).is_empty());
    }

    #[test]
    fn gap_severity_cases() {
        let rect = rect_region(4, 3);
        let g = gap_severity(&axis_probe(&rect, Axis::Horizontal));
        assert_eq!(g.severity, 0.0);
        assert!(g.bands.is_empty());

        let u = u_shape();
        let gh = gap_severity(&axis_probe(&u, Axis::Horizontal));
        assert_eq!(gh.severity, 2.0);
        assert_eq!(gh.bands.len(), 2);
        let gv = gap_severity(&axis_probe(&u, Axis::Vertical));
        assert_eq!(gv.severity, 0.0);

        let ring = ring_3x3();
        let rh = gap_severity(&axis_probe(&ring, Axis::Horizontal));
        assert_eq!(rh.severity, 1.0);
        assert_eq!(rh.bands.len(), 1);
        assert_eq!(rh.bands[0].axis_interval, (1.0, 2.0));
    }

    #[test]
    fn select_cut_ring_tie_snaps_low() {
        let ring = ring_3x3();
        let gh = gap_severity(&axis_probe(&ring, Axis::Horizontal));
        let gv = gap_severity(&axis_probe(&ring, Axis::Vertical));
        let cut = select_cut(&ring, &gh, &gv).unwrap();
        assert_eq!(cut.axis, Axis::Horizontal);
        assert_eq!(cut.coordinate, 1.0);
    }

    #[test]
    fn select_cut_weighted_bands() {
        // Synthetic reports exercising the arithmetic: severities 5 vs 2,
        // horizontal band union spanning y in [2, 6] -> cut at y = 4.
        let region = rect_region(8, 8);
        let band = |lo: f64, hi: f64| GapBand {
            axis_interval: (lo, hi),
            bounding_box: Rect::new(Point::new(0.0, lo), Point::new(8.0, hi)),
        };
        let gh = GapReport {
            axis: Axis::Horizontal,
            severity: 5.0,
            bands: vec![band(2.0, 3.0), band(5.0, 6.0)],
        };
        let gv = GapReport {
            axis: Axis::Vertical,
            severity: 2.0,
            bands: vec![GapBand {
                axis_interval: (1.0, 2.0),
                bounding_box: Rect::new(Point::new(1.0, 0.0), Point::new(2.0, 8.0)),
            }],
        };
        let cut = select_cut(&region, &gh, &gv).unwrap();
        assert_eq!(cut.axis, Axis::Horizontal);
        assert_eq!(cut.coordinate, 4.0);

        // Already aligned midpoint: no snap adjustment.
        let gh2 = GapReport {
            axis: Axis::Horizontal,
            severity: 5.0,
            bands: vec![band(1.0, 2.0), band(4.0, 5.0)],
        };
        let cut2 = select_cut(&region, &gh2, &gv).unwrap();
        assert_eq!(cut2.coordinate, 3.0);
    }

    #[test]
    fn decompose_rectangle_single_partition() {
        let set = decompose(&rect_region(5, 4)).unwrap();
        assert_eq!(set.partitions.len(), 1);
        assert_eq!(set.partitions[0].region.len(), 20);
    }

    #[test]
    fn decompose_ring_two_partitions() {
        let set = decompose(&ring_3x3()).unwrap();
        assert_eq!(set.partitions.len(), 2);
        // Bottom row first by (min row, min col).
        let bottom: Vec<(u32, u32)> = set.partitions[0]
            .region
            .cells()
            .map(|c| (c.col, c.row))
            .collect();
        assert_eq!(bottom, vec![(0, 0), (1, 0), (2, 0)]);
        let top: Vec<(u32, u32)> = set.partitions[1]
            .region
            .cells()
            .map(|c| (c.col, c.row))
            .collect();
        assert_eq!(top, vec![(0, 1), (0, 2), (1, 2), (2, 1), (2, 2)]);
        for p in &set.partitions {
            assert!(!p.feasible_axes.is_empty());
        }
        assert_eq!(set.partitions[0].neighbors, BTreeSet::from([1]));
    }

    #[test]
    fn decompose_u_shape_stays_whole() {
        let set = decompose(&u_shape()).unwrap();
        assert_eq!(set.partitions.len(), 1);
    }

    #[test]
    fn merge_restores_spuriously_split_rectangle() {
        let rect = rect_region(4, 4);
        // Build a two-piece set by hand: bottom half and top half.
        let bottom: Vec<(u32, u32)> = (0..4).flat_map(|c| (0..2).map(move |r| (c, r))).collect();
        let top: Vec<(u32, u32)> = (0..4).flat_map(|c| (2..4).map(move |r| (c, r))).collect();
        let set = PartitionSet::assemble(
            vec![region_from(&bottom), region_from(&top)],
            &rect,
        );
        let merged = merge_pass(&set);
        assert_eq!(merged.partitions.len(), 1);
        assert_eq!(merged.total_cells(), 16);
    }

    #[test]
    fn merge_leaves_ring_partitions_apart() {
        let set = decompose(&ring_3x3()).unwrap();
        let merged = merge_pass(&set);
        assert_eq!(merged.partitions.len(), 2);
    }

    #[test]
    fn merge_collapses_stacked_rows() {
        let rect = rect_region(3, 3);
        let rows: Vec<CellRegion> = (0..3)
            .map(|r| region_from(&[(0, r), (1, r), (2, r)]))
            .collect();
        let set = PartitionSet::assemble(rows, &rect);
        let merged = merge_pass(&set);
        assert_eq!(merged.partitions.len(), 1);
    }

    #[test]
    fn bcd_rectangle_single() {
        let set = bcd_decompose(&rect_region(4, 3)).unwrap();
        assert_eq!(set.partitions.len(), 1);
    }

    #[test]
    fn bcd_u_shape_three() {
        let set = bcd_decompose(&u_shape()).unwrap();
        assert_eq!(set.partitions.len(), 3);
        let sizes: Vec<usize> = set.partitions.iter().map(|p| p.region.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 7);
        // Left arm, base cell, right arm under the column sweep.
        assert_eq!(sizes, vec![3, 1, 3]);
    }

    #[test]
    fn bcd_ring_three() {
        let set = bcd_decompose(&ring_3x3()).unwrap();
        assert_eq!(set.partitions.len(), 3);
        assert_eq!(set.total_cells(), 8);
        for p in &set.partitions {
            assert!(p.feasible_axes.vertical, "column runs sweep vertically");
        }
    }

    #[test]
    fn infeasible_regions_have_positive_gaps_both_axes() {
        let ring = ring_3x3();
        assert!(feasibility(&ring).is_empty());
        let gh = gap_severity(&axis_probe(&ring, Axis::Horizontal));
        let gv = gap_severity(&axis_probe(&ring, Axis::Vertical));
        assert!(gh.severity > 0.0 && gv.severity > 0.0);
        assert!(gh.severity >= 1.0 && gv.severity >= 1.0);
    }

    #[test]
    fn decompose_is_deterministic() {
        let region = region_from(&[
            (0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (3, 1), (0, 2), (1, 2), (2, 2), (3, 2),
            (3, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4),
        ]);
        let a = decompose(&region).unwrap();
        let b = decompose(&region).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
