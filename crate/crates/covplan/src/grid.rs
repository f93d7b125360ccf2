//! Footprint-aligned grid and rectilinear cell regions.
//!
//! A [`CellRegion`] is the universe every later stage runs on: a set of unit
//! grid cells addressed by `(col, row)`. Holes are simply absent cells.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};

/// Uniform grid of square cells with side `cell_size` (the sensor footprint).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub cell_size: f64,
    pub columns: u32,
    pub rows: u32,
}

impl GridSpec {
    pub fn new(origin: Point, cell_size: f64, columns: u32, rows: u32) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "cell size must be positive and finite, got {cell_size}"
            )));
        }
        Ok(GridSpec {
            origin,
            cell_size,
            columns,
            rows,
        })
    }

    /// Vertical grid line `x = origin.x + k * cell_size`.
    pub fn x_line(&self, k: u32) -> f64 {
        self.origin.x + f64::from(k) * self.cell_size
    }

    /// Horizontal grid line `y = origin.y + k * cell_size`.
    pub fn y_line(&self, k: u32) -> f64 {
        self.origin.y + f64::from(k) * self.cell_size
    }

    pub fn cell_rect(&self, cell: Cell) -> Rect {
        Rect::new(
            Point::new(self.x_line(cell.col), self.y_line(cell.row)),
            Point::new(self.x_line(cell.col + 1), self.y_line(cell.row + 1)),
        )
    }

    pub fn cell_center(&self, cell: Cell) -> Point {
        let r = self.cell_rect(cell);
        Point::new((r.min.x + r.max.x) / 2.0, (r.min.y + r.max.y) / 2.0)
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.col < self.columns && cell.row < self.rows
    }

    pub fn bounding_rect(&self) -> Rect {
        Rect::new(
            self.origin,
            Point::new(self.x_line(self.columns), self.y_line(self.rows)),
        )
    }
}

/// Grid cell index. Ordering is column-major, which fixes iteration order
/// everywhere a `BTreeSet<Cell>` is walked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub col: u32,
    pub row: u32,
}

impl Cell {
    pub const fn new(col: u32, row: u32) -> Self {
        Cell { col, row }
    }
}

/// A set of grid cells plus the grid it lives on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRegion {
    grid: GridSpec,
    cells: BTreeSet<Cell>,
    component_id: String,
}

impl CellRegion {
    pub fn new(grid: GridSpec, cells: BTreeSet<Cell>, component_id: impl Into<String>) -> Result<Self> {
        for &c in &cells {
            if !grid.in_bounds(c) {
                return Err(Error::InvalidConfig(format!(
                    "cell ({}, {}) outside grid {}x{}",
                    c.col, c.row, grid.columns, grid.rows
                )));
            }
        }
        Ok(CellRegion {
            grid,
            cells,
            component_id: component_id.into(),
        })
    }

    // Internal constructor for subsets of an already validated region.
    pub(crate) fn from_validated(grid: GridSpec, cells: BTreeSet<Cell>, component_id: String) -> Self {
        CellRegion {
            grid,
            cells,
            component_id,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component_id(&self) -> &str {
        &self.component_id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.component_id = id.into();
        self
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn cell_set(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    /// Inclusive `(min, max)` corner cells, or `None` when empty.
    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        if self.cells.is_empty() {
            return None;
        }
        let mut min = Cell::new(u32::MAX, u32::MAX);
        let mut max = Cell::new(0, 0);
        for &c in &self.cells {
            min.col = min.col.min(c.col);
            min.row = min.row.min(c.row);
            max.col = max.col.max(c.col);
            max.row = max.row.max(c.row);
        }
        Some((min, max))
    }

    /// Bounding rectangle in meters.
    pub fn bounding_rect(&self) -> Option<Rect> {
        self.bounds().map(|(min, max)| {
            Rect::new(
                self.grid.cell_rect(min).min,
                self.grid.cell_rect(max).max,
            )
        })
    }

    /// `(min row, min col)` sort key used to order components and partitions.
    pub fn sort_key(&self) -> (u32, u32) {
        let mut key = (u32::MAX, u32::MAX);
        for &c in &self.cells {
            key = key.min((c.row, c.col));
        }
        key
    }

    /// Occupied columns per row, sorted.
    pub fn rows_map(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut map: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &c in &self.cells {
            map.entry(c.row).or_default().push(c.col);
        }
        for cols in map.values_mut() {
            cols.sort_unstable();
        }
        map
    }

    /// Occupied rows per column, sorted.
    pub fn cols_map(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut map: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &c in &self.cells {
            map.entry(c.col).or_default().push(c.row);
        }
        // BTreeSet iteration is column-major, so rows arrive sorted already.
        map
    }

    /// Maximal runs of consecutive indices, as inclusive `(start, end)` pairs.
    pub(crate) fn runs(sorted: &[u32]) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut iter = sorted.iter().copied();
        let Some(first) = iter.next() else {
            return out;
        };
        let mut start = first;
        let mut prev = first;
        for v in iter {
            if v == prev + 1 {
                prev = v;
            } else {
                out.push((start, prev));
                start = v;
                prev = v;
            }
        }
        out.push((start, prev));
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.cells.is_empty() {
            return true;
        }
        self.connected_components().len() == 1
    }

    /// Maximal 4-connected components, ordered by `(min row, min col)`.
    pub fn connected_components(&self) -> Vec<CellRegion> {
        let mut remaining = self.cells.clone();
        let mut components: Vec<BTreeSet<Cell>> = Vec::new();
        while let Some(&seed) = remaining.iter().next() {
            remaining.remove(&seed);
            let mut comp = BTreeSet::new();
            comp.insert(seed);
            let mut queue = VecDeque::new();
            queue.push_back(seed);
            while let Some(c) = queue.pop_front() {
                for n in neighbors4(c) {
                    if remaining.remove(&n) {
                        comp.insert(n);
                        queue.push_back(n);
                    }
                }
            }
            components.push(comp);
        }
        let mut regions: Vec<CellRegion> = components
            .into_iter()
            .map(|cells| CellRegion::from_validated(self.grid.clone(), cells, String::new()))
            .collect();
        regions.sort_by_key(CellRegion::sort_key);
        let single = regions.len() == 1;
        for (i, r) in regions.iter_mut().enumerate() {
            r.component_id = if single {
                self.component_id.clone()
            } else {
                format!("{}/c{}", self.component_id, i)
            };
        }
        regions
    }

    pub fn union(&self, other: &CellRegion) -> CellRegion {
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().copied());
        CellRegion::from_validated(self.grid.clone(), cells, self.component_id.clone())
    }

    /// Traces the region boundary into rings in meters: the counterclockwise
    /// outer ring plus one clockwise ring per enclosed hole. Collinear runs
    /// are merged. Requires a connected region.
    pub fn boundary_rings(&self) -> (Vec<Point>, Vec<Vec<Point>>) {
        // Boundary edges oriented with the interior on the left: outer loops
        // come out counterclockwise, hole loops clockwise.
        type V = (i64, i64);
        let mut edges: BTreeMap<V, Vec<V>> = BTreeMap::new();
        let mut add = |a: V, b: V| edges.entry(a).or_default().push(b);
        for &c in &self.cells {
            let (x, y) = (i64::from(c.col), i64::from(c.row));
            if !self.contains_signed(x, y - 1) {
                add((x, y), (x + 1, y)); // bottom edge, +x
            }
            if !self.contains_signed(x + 1, y) {
                add((x + 1, y), (x + 1, y + 1)); // right edge, +y
            }
            if !self.contains_signed(x, y + 1) {
                add((x + 1, y + 1), (x, y + 1)); // top edge, -x
            }
            if !self.contains_signed(x - 1, y) {
                add((x, y + 1), (x, y)); // left edge, -y
            }
        }
        for outs in edges.values_mut() {
            outs.sort_unstable();
        }

        let mut rings: Vec<Vec<V>> = Vec::new();
        while let Some((&start, _)) = edges.iter().find(|(_, outs)| !outs.is_empty()) {
            let mut ring = vec![start];
            let mut prev_dir: Option<(i64, i64)> = None;
            let mut cur = start;
            loop {
                let outs = edges.get_mut(&cur).expect("open boundary vertex");
                let next = match (outs.len(), prev_dir) {
                    (1, _) | (_, None) => outs.remove(0),
                    (_, Some(dir)) => {
                        // At a pinch vertex prefer the sharpest left turn so
                        // each loop hugs its own component of the boundary.
                        let pick = outs
                            .iter()
                            .enumerate()
                            .max_by_key(|(_, &cand)| {
                                let nd = (cand.0 - cur.0, cand.1 - cur.1);
                                turn_rank(dir, nd)
                            })
                            .map(|(i, _)| i)
                            .expect("nonempty outgoing set");
                        outs.remove(pick)
                    }
                };
                prev_dir = Some((next.0 - cur.0, next.1 - cur.1));
                cur = next;
                if cur == start {
                    break;
                }
                ring.push(cur);
            }
            rings.push(simplify_ring(ring));
        }

        let to_points = |ring: Vec<V>| -> Vec<Point> {
            ring.into_iter()
                .map(|(x, y)| {
                    Point::new(
                        self.grid.origin.x + x as f64 * self.grid.cell_size,
                        self.grid.origin.y + y as f64 * self.grid.cell_size,
                    )
                })
                .collect()
        };

        let mut outer = None;
        let mut holes = Vec::new();
        for ring in rings {
            let pts = to_points(ring);
            if crate::geom::ring_signed_area(&pts) > 0.0 {
                debug_assert!(outer.is_none(), "connected region has one outer ring");
                outer = Some(pts);
            } else {
                holes.push(pts);
            }
        }
        (outer.unwrap_or_default(), holes)
    }

    fn contains_signed(&self, col: i64, row: i64) -> bool {
        if col < 0 || row < 0 {
            return false;
        }
        self.cells.contains(&Cell::new(col as u32, row as u32))
    }
}

fn neighbors4(c: Cell) -> impl Iterator<Item = Cell> {
    let mut out = Vec::with_capacity(4);
    if c.col > 0 {
        out.push(Cell::new(c.col - 1, c.row));
    }
    if c.row > 0 {
        out.push(Cell::new(c.col, c.row - 1));
    }
    out.push(Cell::new(c.col + 1, c.row));
    out.push(Cell::new(c.col, c.row + 1));
    out.into_iter()
}

// Rank an outgoing direction by how far left it turns relative to `prev`
// (higher = sharper left). Directions are axis-aligned unit steps.
fn turn_rank(prev: (i64, i64), next: (i64, i64)) -> i8 {
    let cross = prev.0 * next.1 - prev.1 * next.0;
    let dot = prev.0 * next.0 + prev.1 * next.1;
    match (cross, dot) {
        (1, _) => 2,  // left turn
        (0, 1) => 1,  // straight
        (0, _) => -2, // u-turn (cannot appear on a traced boundary)
        _ => 0,       // right turn
    }
}

fn simplify_ring(ring: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    let n = ring.len();
    if n < 3 {
        return ring;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let cur = ring[i];
        let next = ring[(i + 1) % n];
        let d1 = (cur.0 - prev.0, cur.1 - prev.1);
        let d2 = (next.0 - cur.0, next.1 - cur.1);
        if d1.0 * d2.1 - d1.1 * d2.0 != 0 {
            out.push(cur);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn region_from(cells: &[(u32, u32)]) -> CellRegion {
        let grid = GridSpec::new(Point::new(0.0, 0.0), 1.0, 64, 64).unwrap();
        let set: BTreeSet<Cell> = cells.iter().map(|&(c, r)| Cell::new(c, r)).collect();
        CellRegion::new(grid, set, "test").unwrap()
    }

    #[test]
    fn diagonal_cells_are_two_components() {
        let r = region_from(&[(0, 0), (1, 1)]);
        assert_eq!(r.connected_components().len(), 2);
    }

    #[test]
    fn solid_rectangle_is_one_component() {
        let mut cells = Vec::new();
        for c in 0..4 {
            for r in 0..3 {
                cells.push((c, r));
            }
        }
        let region = region_from(&cells);
        let comps = region.connected_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 12);
        assert_eq!(comps[0].component_id(), "test");
    }

    #[test]
    fn components_match_flood_fill_oracle() {
        // Independent flood fill over a fixed scattered set.
        let cells = [
            (0, 0),
            (1, 0),
            (5, 5),
            (5, 6),
            (6, 6),
            (9, 0),
            (20, 20),
            (21, 20),
            (21, 21),
            (3, 9),
        ];
        let region = region_from(&cells);
        let comps = region.connected_components();

        // Oracle: repeatedly expand from an arbitrary seed using a Vec scan.
        let mut remaining: Vec<(u32, u32)> = cells.to_vec();
        let mut oracle_sets: Vec<BTreeSet<(u32, u32)>> = Vec::new();
        while let Some(seed) = remaining.pop() {
            let mut comp = BTreeSet::new();
            comp.insert(seed);
            let mut frontier = vec![seed];
            while let Some((c, r)) = frontier.pop() {
                let mut keep = Vec::new();
                for &(oc, or) in &remaining {
                    let adj = (oc == c && (or + 1 == r || r + 1 == or))
                        || (or == r && (oc + 1 == c || c + 1 == oc));
                    if adj && comp.insert((oc, or)) {
                        frontier.push((oc, or));
                    } else {
                        keep.push((oc, or));
                    }
                }
                remaining = keep
                    .into_iter()
                    .filter(|cell| !comp.contains(cell))
                    .collect();
            }
            oracle_sets.push(comp);
        }
        let mut got: Vec<BTreeSet<(u32, u32)>> = comps
            .iter()
            .map(|c| c.cells().map(|cell| (cell.col, cell.row)).collect())
            .collect();
        got.sort();
        oracle_sets.sort();
        assert_eq!(got, oracle_sets);

        // Components partition the input.
        let total: usize = comps.iter().map(CellRegion::len).sum();
        assert_eq!(total, cells.len());
    }

    #[test]
    fn component_order_is_min_row_then_col() {
        let r = region_from(&[(9, 0), (0, 5)]);
        let comps = r.connected_components();
        assert_eq!(comps[0].cells().next().unwrap(), Cell::new(9, 0));
        assert_eq!(comps[1].cells().next().unwrap(), Cell::new(0, 5));
    }

    #[test]
    fn runs_splits_gaps() {
        assert_eq!(CellRegion::runs(&[0, 1, 2, 4, 5, 9]), vec![(0, 2), (4, 5), (9, 9)]);
        assert_eq!(CellRegion::runs(&[]), vec![]);
    }

    #[test]
    fn boundary_of_rectangle() {
        let mut cells = Vec::new();
        for c in 0..3 {
            for r in 0..2 {
                cells.push((c, r));
            }
        }
        let region = region_from(&cells);
        let (outer, holes) = region.boundary_rings();
        assert!(holes.is_empty());
        assert_eq!(outer.len(), 4);
        assert_eq!(crate::geom::ring_signed_area(&outer), 6.0);
    }

    #[test]
    fn boundary_of_ring_has_hole() {
        let cells = [
            (0, 0),
            (1, 0),
            (2, 0),
            (0, 1),
            (2, 1),
            (0, 2),
            (1, 2),
            (2, 2),
        ];
        let region = region_from(&cells);
        let (outer, holes) = region.boundary_rings();
        assert_eq!(crate::geom::ring_signed_area(&outer), 9.0);
        assert_eq!(holes.len(), 1);
        assert_eq!(crate::geom::ring_signed_area(&holes[0]), -1.0);
    }
}
