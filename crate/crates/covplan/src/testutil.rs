//! Fixture regions shared by unit tests across modules.

use std::collections::BTreeSet;

use crate::geom::Point;
use crate::grid::{Cell, CellRegion, GridSpec};

pub(crate) fn region_from(cells: &[(u32, u32)]) -> CellRegion {
    let grid = GridSpec::new(Point::new(0.0, 0.0), 1.0, 256, 256).unwrap();
    let set: BTreeSet<Cell> = cells.iter().map(|&(c, r)| Cell::new(c, r)).collect();
    CellRegion::new(grid, set, "test").unwrap()
}

pub(crate) fn rect_region(cols: u32, rows: u32) -> CellRegion {
    let mut cells = Vec::new();
    for c in 0..cols {
        for r in 0..rows {
            cells.push((c, r));
        }
    }
    region_from(&cells)
}

/// 3x3 block minus the top two cells of the middle column.
pub(crate) fn u_shape() -> CellRegion {
    region_from(&[(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (2, 2)])
}

/// 3x3 block minus the center cell.
pub(crate) fn ring_3x3() -> CellRegion {
    region_from(&[(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2)])
}

/// Deterministic pseudo-random connected region grown cell by cell.
pub(crate) fn random_region(rng: &mut impl rand::Rng, max_cells: usize) -> CellRegion {
    let mut cells: BTreeSet<(u32, u32)> = BTreeSet::new();
    let start = (rng.gen_range(8..24u32), rng.gen_range(8..24u32));
    cells.insert(start);
    let target = rng.gen_range(2..=max_cells.max(2));
    let mut frontier: Vec<(u32, u32)> = vec![start];
    while cells.len() < target && !frontier.is_empty() {
        let pick = rng.gen_range(0..frontier.len());
        let (c, r) = frontier[pick];
        let mut neighbors = vec![(c + 1, r), (c, r + 1)];
        if c > 0 {
            neighbors.push((c - 1, r));
        }
        if r > 0 {
            neighbors.push((c, r - 1));
        }
        neighbors.retain(|n| !cells.contains(n) && n.0 < 60 && n.1 < 60);
        if neighbors.is_empty() {
            frontier.swap_remove(pick);
            continue;
        }
        let n = neighbors[rng.gen_range(0..neighbors.len())];
        cells.insert(n);
        frontier.push(n);
    }
    let list: Vec<(u32, u32)> = cells.into_iter().collect();
    region_from(&list)
}
