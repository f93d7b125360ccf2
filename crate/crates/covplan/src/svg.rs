//! Hand-rolled SVG rendering of regions, partitions, and plans.

use std::fmt::Write as _;

use crate::decompose::{Axis, CutLine, DecompositionTrace, PartitionSet};
use crate::grid::CellRegion;
use crate::route::GlobalPlan;

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

/// Accumulates drawing layers in world coordinates (meters, y up) and emits
/// a standalone SVG document.
pub struct SvgScene {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
    scale: f64,
    body: String,
}

impl SvgScene {
    pub fn for_region(region: &CellRegion) -> Self {
        let rect = region
            .bounding_rect()
            .unwrap_or(region.grid().bounding_rect());
        SvgScene {
            min_x: rect.min.x,
            min_y: rect.min.y,
            max_x: rect.max.x,
            max_y: rect.max.y,
            scale: 32.0 / region.grid().cell_size,
            body: String::new(),
        }
    }

    fn x(&self, x: f64) -> f64 {
        (x - self.min_x) * self.scale
    }

    // SVG y grows downward; world y grows upward.
    fn y(&self, y: f64) -> f64 {
        (self.max_y - y) * self.scale
    }

    pub fn add_region(&mut self, region: &CellRegion, fill: &str) {
        let grid = region.grid();
        let side = grid.cell_size * self.scale;
        let _ = writeln!(self.body, "  <g class=\"cells\" fill=\"{fill}\" stroke=\"#999\" stroke-width=\"0.5\">");
        for cell in region.cells() {
            let r = grid.cell_rect(cell);
            let _ = writeln!(
                self.body,
                "    <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{side:.2}\" height=\"{side:.2}\"/>",
                self.x(r.min.x),
                self.y(r.max.y),
            );
        }
        let _ = writeln!(self.body, "  </g>");
    }

    pub fn add_partitions(&mut self, set: &PartitionSet) {
        for p in &set.partitions {
            self.add_region(&p.region, PALETTE[p.id % PALETTE.len()]);
        }
    }

    pub fn add_gap_bands(&mut self, trace: &DecompositionTrace) {
        let _ = writeln!(self.body, "  <g class=\"gap-bands\" fill=\"#ff7f0e\" fill-opacity=\"0.25\">");
        for band in &trace.gap_bands {
            let b = band.bounding_box;
            let _ = writeln!(
                self.body,
                "    <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
                self.x(b.min.x),
                self.y(b.max.y),
                (b.max.x - b.min.x) * self.scale,
                (b.max.y - b.min.y) * self.scale,
            );
        }
        let _ = writeln!(self.body, "  </g>");
    }

    pub fn add_cut_lines(&mut self, cuts: &[CutLine]) {
        let _ = writeln!(self.body, "  <g class=\"cuts\" stroke=\"#7734eb\" stroke-width=\"2\" stroke-dasharray=\"6 3\">");
        for cut in cuts {
            let (x1, y1, x2, y2) = match cut.axis {
                Axis::Horizontal => (self.min_x, cut.coordinate, self.max_x, cut.coordinate),
                Axis::Vertical => (cut.coordinate, self.min_y, cut.coordinate, self.max_y),
            };
            let _ = writeln!(
                self.body,
                "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                self.x(x1),
                self.y(y1),
                self.x(x2),
                self.y(y2),
            );
        }
        let _ = writeln!(self.body, "  </g>");
    }

    /// Sweep polyline in blue, inter-partition connectors in red.
    pub fn add_plan(&mut self, plan: &GlobalPlan) {
        if !plan.stitched.is_empty() {
            let mut points = String::new();
            for p in &plan.stitched {
                let _ = write!(points, "{:.3},{:.3} ", self.x(p.x), self.y(p.y));
            }
            let _ = writeln!(
                self.body,
                "  <polyline class=\"route\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>",
                points.trim_end()
            );
        }
        let _ = writeln!(self.body, "  <g class=\"connector\" stroke=\"#d62728\" stroke-width=\"2\">");
        for (a, b) in &plan.connectors {
            let _ = writeln!(
                self.body,
                "    <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>",
                self.x(a.x),
                self.y(a.y),
                self.x(b.x),
                self.y(b.y),
            );
        }
        let _ = writeln!(self.body, "  </g>");
        if let Some(start) = plan.stitched.first() {
            let _ = writeln!(
                self.body,
                "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#2ca02c\"/>",
                self.x(start.x),
                self.y(start.y),
            );
        }
    }

    pub fn finish(self) -> String {
        let width = (self.max_x - self.min_x) * self.scale;
        let height = (self.max_y - self.min_y) * self.scale;
        let margin = 8.0;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.2} {:.2} {:.2} {:.2}\">\n{}</svg>\n",
            -margin,
            -margin,
            width + 2.0 * margin,
            height + 2.0 * margin,
            self.body
        )
    }
}
