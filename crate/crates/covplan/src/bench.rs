//! Benchmark harness: parametric polygon corpus, pipeline execution, and
//! relative-overhead aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::PlannerConfig;
use crate::decompose::{bcd_decompose, decompose, merge_pass, PartitionSet};
use crate::error::{Error, Result};
use crate::geom::{count_turns, dedup_consecutive, polyline_length, Point, TURN_TOLERANCE_RAD};
use crate::grid::{Cell, CellRegion, GridSpec};
use crate::io::BenchmarkRecord;
use crate::kinodyn::{time_parameterize, MotionLimits};
use crate::roi::{coverage_ratio_sampled, grid_for_roi, rasterize, CoverageParams, PolygonROI};
use crate::route::{
    connector_cost, ga_route, held_karp, nn_baseline, CostParams, GaConfig, GlobalPlan,
};
use crate::sweep::{candidates, SweepCandidate};

/// Parametric polygon families spanning the geometry the planner must
/// handle: plain rectangles through multi-hole and branched shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rect,
    LShape,
    UShape,
    Comb,
    Staircase,
    Ring,
    MultiHole,
    Branched,
    Blob,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Rect,
        Family::LShape,
        Family::UShape,
        Family::Comb,
        Family::Staircase,
        Family::Ring,
        Family::MultiHole,
        Family::Branched,
        Family::Blob,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Rect => "rect",
            Family::LShape => "lshape",
            Family::UShape => "ushape",
            Family::Comb => "comb",
            Family::Staircase => "staircase",
            Family::Ring => "ring",
            Family::MultiHole => "multihole",
            Family::Branched => "branched",
            Family::Blob => "blob",
        }
    }

    pub fn parse(name: &str) -> Result<Family> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown polygon family `{name}`")))
    }
}

/// Cell-pattern scale used when emitting corpus polygons, in meters. Chosen
/// to match the default footprint so aligned families rasterize exactly.
pub const DEFAULT_CORPUS_CELL: f64 = 2.0;

/// Deterministic parametric corpus: `count` polygons cycling through
/// `families`, all invariant-checked. Identical seeds reproduce identical
/// corpora byte for byte.
pub fn generate_corpus(seed: u64, families: &[Family], count: usize) -> Vec<PolygonROI> {
    generate_corpus_scaled(seed, families, count, DEFAULT_CORPUS_CELL)
}

pub fn generate_corpus_scaled(
    seed: u64,
    families: &[Family],
    count: usize,
    cell_meters: f64,
) -> Vec<PolygonROI> {
    assert!(!families.is_empty(), "at least one family required");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let family = families[i % families.len()];
        let cells = family_cells(family, &mut rng);
        // Fractional offsets exercise partial-cell rasterization on shapes
        // whose identity survives it.
        let jitter = matches!(family, Family::Rect | Family::Blob);
        let (dx, dy) = if jitter {
            (
                rng.gen_range(0.05..0.95) * cell_meters,
                rng.gen_range(0.05..0.95) * cell_meters,
            )
        } else {
            (0.0, 0.0)
        };
        let roi = cells_to_polygon(
            &cells,
            cell_meters,
            Point::new(dx, dy),
            format!("{}-{i:03}", family.name()),
        );
        debug_assert!(roi.validate().is_ok(), "corpus polygon must be valid");
        out.push(roi);
    }
    out
}

fn orient(cells: Vec<(u32, u32)>, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let flip_h = rng.gen_bool(0.5);
    let flip_v = rng.gen_bool(0.5);
    let transpose = rng.gen_bool(0.5);
    let max_c = cells.iter().map(|c| c.0).max().unwrap_or(0);
    let max_r = cells.iter().map(|c| c.1).max().unwrap_or(0);
    cells
        .into_iter()
        .map(|(mut c, mut r)| {
            if flip_h {
                c = max_c - c;
            }
            if flip_v {
                r = max_r - r;
            }
            if transpose {
                (r, c)
            } else {
                (c, r)
            }
        })
        .collect()
}

fn family_cells(family: Family, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let cells = match family {
        Family::Rect => {
            let a = rng.gen_range(2..=10);
            let b = rng.gen_range(2..=9);
            block(0, 0, a, b)
        }
        Family::LShape => {
            let a = rng.gen_range(3..=10);
            let b = rng.gen_range(3..=9);
            let nw = rng.gen_range(1..=a - 2);
            let nh = rng.gen_range(1..=b - 2);
            let mut cells = block(0, 0, a, b);
            cells.retain(|&(c, r)| !(c >= a - nw && r >= b - nh));
            cells
        }
        Family::UShape => {
            let a = rng.gen_range(4..=12);
            let b = rng.gen_range(3..=8);
            let nw = rng.gen_range(1..=a - 3);
            let off = rng.gen_range(1..=a - nw - 1);
            let nd = rng.gen_range(1..=b - 1);
            let mut cells = block(0, 0, a, b);
            cells.retain(|&(c, r)| !(c >= off && c < off + nw && r >= b - nd));
            cells
        }
        Family::Comb => {
            let a = rng.gen_range(7..=14);
            let hb = rng.gen_range(1..=2);
            let ht = rng.gen_range(2..=5);
            let mut cells = block(0, 0, a, hb);
            let teeth = rng.gen_range(2..=4);
            let mut x = rng.gen_range(0..=1u32);
            let mut placed = 0;
            while placed < teeth {
                let tw = rng.gen_range(1..=2);
                if x + tw > a {
                    break;
                }
                cells.extend(block(x, hb, tw, ht));
                x += tw + rng.gen_range(1..=2);
                placed += 1;
            }
            cells
        }
        Family::Staircase => {
            let steps = rng.gen_range(3..=7);
            let sx = rng.gen_range(1..=3);
            let sy = rng.gen_range(1..=2);
            let mut cells = Vec::new();
            for s in 0..steps {
                cells.extend(block(s * sx, 0, sx, (s + 1) * sy));
            }
            cells
        }
        Family::Ring => {
            let a = rng.gen_range(3..=9);
            let b = rng.gen_range(3..=9);
            let left = rng.gen_range(1..=((a - 1) / 2).max(1));
            let right = rng.gen_range(1..=(a - left - 1).max(1).min(2));
            let bottom = rng.gen_range(1..=((b - 1) / 2).max(1));
            let top = rng.gen_range(1..=(b - bottom - 1).max(1).min(2));
            let mut cells = block(0, 0, a, b);
            cells.retain(|&(c, r)| {
                !(c >= left && c < a - right && r >= bottom && r < b - top)
            });
            cells
        }
        Family::MultiHole => {
            let a = rng.gen_range(7..=14);
            let b = rng.gen_range(7..=12);
            let mut holes: Vec<(u32, u32, u32, u32)> = Vec::new();
            let wanted = rng.gen_range(2..=4);
            for _ in 0..40 {
                if holes.len() == wanted {
                    break;
                }
                let hw = rng.gen_range(1..=2);
                let hh = rng.gen_range(1..=2);
                if a < hw + 2 || b < hh + 2 {
                    continue;
                }
                let hx = rng.gen_range(1..=a - hw - 1);
                let hy = rng.gen_range(1..=b - hh - 1);
                // Keep a one-cell gap so hole rings stay disjoint.
                let clear = holes.iter().all(|&(ox, oy, ow, oh)| {
                    hx + hw + 1 <= ox || ox + ow + 1 <= hx || hy + hh + 1 <= oy || oy + oh + 1 <= hy
                });
                if clear {
                    holes.push((hx, hy, hw, hh));
                }
            }
            let mut cells = block(0, 0, a, b);
            cells.retain(|&(c, r)| {
                holes
                    .iter()
                    .all(|&(hx, hy, hw, hh)| !(c >= hx && c < hx + hw && r >= hy && r < hy + hh))
            });
            cells
        }
        Family::Branched => {
            let a = rng.gen_range(8..=16);
            let th = rng.gen_range(1..=2);
            let spine_row = rng.gen_range(3..=6);
            let mut cells = block(0, spine_row, a, th);
            let branches = rng.gen_range(2..=4);
            let mut x = rng.gen_range(0..=2u32);
            for _ in 0..branches {
                let bw = rng.gen_range(1..=2);
                if x + bw > a {
                    break;
                }
                let len = rng.gen_range(2..=3u32).min(spine_row);
                if rng.gen_bool(0.5) {
                    cells.extend(block(x, spine_row + th, bw, rng.gen_range(2..=4)));
                } else {
                    cells.extend(block(x, spine_row - len, bw, len));
                }
                x += bw + rng.gen_range(1..=3);
            }
            cells
        }
        Family::Blob => {
            let target = rng.gen_range(15..=45);
            let mut set: BTreeSet<(u32, u32)> = BTreeSet::new();
            set.insert((20, 20));
            let mut frontier = vec![(20u32, 20u32)];
            while set.len() < target && !frontier.is_empty() {
                let pick = rng.gen_range(0..frontier.len());
                let (c, r) = frontier[pick];
                let mut options = vec![(c + 1, r), (c, r + 1)];
                if c > 1 {
                    options.push((c - 1, r));
                }
                if r > 1 {
                    options.push((c, r - 1));
                }
                options.retain(|&n| !set.contains(&n) && n.0 < 40 && n.1 < 40 && !pinches(&set, n));
                if options.is_empty() {
                    frontier.swap_remove(pick);
                    continue;
                }
                let n = options[rng.gen_range(0..options.len())];
                set.insert(n);
                frontier.push(n);
            }
            set.into_iter().collect()
        }
    };
    let normalized = normalize(cells);
    match family {
        // Orientation diversity for concave aligned families.
        Family::LShape | Family::UShape | Family::Comb | Family::Staircase | Family::Branched => {
            normalize(orient(normalized, rng))
        }
        _ => normalized,
    }
}

// Adding `n` must not create a diagonal-only contact with the existing set.
fn pinches(set: &BTreeSet<(u32, u32)>, n: (u32, u32)) -> bool {
    let (c, r) = (n.0 as i64, n.1 as i64);
    let has = |x: i64, y: i64| x >= 0 && y >= 0 && set.contains(&(x as u32, y as u32));
    for (dc, dr) in [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)] {
        if has(c + dc, r + dr) && !has(c + dc, r) && !has(c, r + dr) {
            return true;
        }
    }
    false
}

fn block(x: u32, y: u32, w: u32, h: u32) -> Vec<(u32, u32)> {
    let mut cells = Vec::with_capacity((w * h) as usize);
    for c in x..x + w {
        for r in y..y + h {
            cells.push((c, r));
        }
    }
    cells
}

fn normalize(cells: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    let set: BTreeSet<(u32, u32)> = cells.into_iter().collect();
    let min_c = set.iter().map(|c| c.0).min().unwrap_or(0);
    let min_r = set.iter().map(|c| c.1).min().unwrap_or(0);
    set.into_iter().map(|(c, r)| (c - min_c, r - min_r)).collect()
}

/// Traces a cell pattern into a polygon at the given scale and offset.
fn cells_to_polygon(cells: &[(u32, u32)], scale: f64, offset: Point, id: String) -> PolygonROI {
    let max_c = cells.iter().map(|c| c.0).max().unwrap_or(0) + 2;
    let max_r = cells.iter().map(|c| c.1).max().unwrap_or(0) + 2;
    let grid = GridSpec::new(Point::new(0.0, 0.0), scale, max_c, max_r).expect("valid grid");
    let set: BTreeSet<Cell> = cells.iter().map(|&(c, r)| Cell::new(c, r)).collect();
    let region = CellRegion::from_validated(grid, set, id.clone());
    let (outer, holes) = region.boundary_rings();
    let shift = |ring: Vec<Point>| -> Vec<Point> {
        ring.into_iter()
            .map(|p| Point::new(p.x + offset.x, p.y + offset.y))
            .collect()
    };
    PolygonROI {
        id,
        outer: shift(outer),
        holes: holes.into_iter().map(shift).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecomposerKind {
    Ours,
    Bcd,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Dp,
    Ga,
    Nn,
}

/// A pipeline: decomposition stage, route optimizer, and every parameter
/// block the run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub decomposer: DecomposerKind,
    pub optimizer: OptimizerKind,
    pub cost: CostParams,
    pub limits: MotionLimits,
    pub coverage: CoverageParams,
    pub ga: GaConfig,
    pub dp_limit: usize,
    pub coverage_samples: usize,
    pub seed: u64,
    /// Where to dump SVG + partition JSON when coverage fails.
    pub diagnostics_dir: Option<PathBuf>,
}

impl PipelineSpec {
    pub fn from_config(
        decomposer: DecomposerKind,
        optimizer: OptimizerKind,
        config: &PlannerConfig,
    ) -> Result<Self> {
        let footprint = config.footprint_width()?;
        let spec = PipelineSpec {
            decomposer,
            optimizer,
            cost: config.cost_params(),
            limits: config.motion_limits(),
            coverage: CoverageParams::new(config.alpha, footprint)?,
            ga: config.ga_config(),
            dp_limit: config.dp_limit,
            coverage_samples: config.coverage_samples,
            seed: config.seed,
            diagnostics_dir: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Short identifier like `ours-dp` or `nn`.
    pub fn id(&self) -> String {
        match (self.decomposer, self.optimizer) {
            (DecomposerKind::None, OptimizerKind::Nn) => "nn".to_string(),
            (d, o) => format!(
                "{}-{}",
                match d {
                    DecomposerKind::Ours => "ours",
                    DecomposerKind::Bcd => "bcd",
                    DecomposerKind::None => "none",
                },
                match o {
                    OptimizerKind::Dp => "dp",
                    OptimizerKind::Ga => "ga",
                    OptimizerKind::Nn => "nn",
                }
            ),
        }
    }

    pub fn parse_pair(text: &str, config: &PlannerConfig) -> Result<Self> {
        let (d, o) = match text {
            "nn" => (DecomposerKind::None, OptimizerKind::Nn),
            other => {
                let (d, o) = other.split_once('-').ok_or_else(|| {
                    Error::InvalidPipeline(format!("expected `<decomposer>-<optimizer>` or `nn`, got `{other}`"))
                })?;
                let d = match d {
                    "ours" => DecomposerKind::Ours,
                    "bcd" => DecomposerKind::Bcd,
                    "none" => DecomposerKind::None,
                    _ => return Err(Error::InvalidPipeline(format!("unknown decomposer `{d}`"))),
                };
                let o = match o {
                    "dp" => OptimizerKind::Dp,
                    "ga" => OptimizerKind::Ga,
                    "nn" => OptimizerKind::Nn,
                    _ => return Err(Error::InvalidPipeline(format!("unknown optimizer `{o}`"))),
                };
                (d, o)
            }
        };
        PipelineSpec::from_config(d, o, config)
    }

    /// The undecomposed nearest-neighbor pairing is the only valid use of
    /// `decomposer = none`, and vice versa.
    pub fn validate(&self) -> Result<()> {
        let none = self.decomposer == DecomposerKind::None;
        let nn = self.optimizer == OptimizerKind::Nn;
        if none != nn {
            return Err(Error::InvalidPipeline(format!(
                "decomposer `none` pairs only with optimizer `nn` (got {})",
                self.id()
            )));
        }
        self.limits.validate()?;
        self.ga.validate()?;
        Ok(())
    }
}

/// Everything produced by one pipeline run; the record summarizes it.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub record: BenchmarkRecord,
    pub plan: GlobalPlan,
    pub partition_sets: Vec<PartitionSet>,
    pub region: CellRegion,
}

/// Runs one pipeline on one polygon: rasterize, decompose, generate
/// candidates, route, stitch, verify coverage, and time-parameterize.
/// Disconnected rasterizations are planned per component and chained in
/// `(min row, min col)` order. A DP request beyond the exact limit falls
/// back to the genetic router. Fails loudly when coverage misses `alpha`,
/// dumping diagnostics if a directory is configured.
pub fn run_pipeline(roi: &PolygonROI, spec: &PipelineSpec) -> Result<PipelineRun> {
    spec.validate()?;
    let started = Instant::now();
    let grid = grid_for_roi(roi, spec.coverage.footprint)?;
    let region = rasterize(roi, &grid)?;

    let mut partition_sets: Vec<PartitionSet> = Vec::new();
    let plan = if spec.optimizer == OptimizerKind::Nn {
        nn_baseline(&region, &spec.cost)?
    } else {
        let mut component_plans: Vec<GlobalPlan> = Vec::new();
        for component in region.connected_components() {
            let set = match spec.decomposer {
                DecomposerKind::Ours => merge_pass(&decompose(&component)?),
                DecomposerKind::Bcd => bcd_decompose(&component)?,
                DecomposerKind::None => unreachable!("validated pairing"),
            };
            let cands: Vec<Vec<SweepCandidate>> = set.partitions.iter().map(candidates).collect();
            let plan = match spec.optimizer {
                OptimizerKind::Dp => match held_karp(&cands, &spec.cost, spec.dp_limit) {
                    Ok(plan) => plan,
                    Err(Error::SolverLimit { .. }) => ga_route(&cands, &spec.ga)?,
                    Err(e) => return Err(e),
                },
                OptimizerKind::Ga => ga_route(&cands, &spec.ga)?,
                OptimizerKind::Nn => unreachable!(),
            };
            partition_sets.push(set);
            component_plans.push(plan);
        }
        chain_component_plans(component_plans)
    };
    let planning_secs = started.elapsed().as_secs_f64();

    let coverage = coverage_ratio_sampled(&region, &plan.stitched, &spec.coverage, spec.coverage_samples);
    if coverage < spec.coverage.alpha {
        let diagnostics = dump_diagnostics(spec, roi, &region, &partition_sets, &plan);
        return Err(Error::CoverageShortfall {
            polygon: roi.id.clone(),
            achieved: coverage,
            required: spec.coverage.alpha,
            diagnostics,
        });
    }

    let profile = time_parameterize(&plan.stitched, &spec.limits);
    let record = BenchmarkRecord {
        polygon_id: roi.id.clone(),
        pipeline_id: spec.id(),
        length: polyline_length(&plan.stitched),
        turns: count_turns(&plan.stitched, TURN_TOLERANCE_RAD),
        exec_time: profile.total,
        partitions: partition_sets.iter().map(|s| s.partitions.len()).sum(),
        planning_secs,
        coverage,
    };
    Ok(PipelineRun {
        record,
        plan,
        partition_sets,
        region,
    })
}

/// Chains per-component plans into one: partition ids get per-component
/// offsets, components connect exit-to-entry in order.
fn chain_component_plans(plans: Vec<GlobalPlan>) -> GlobalPlan {
    if plans.len() == 1 {
        return plans.into_iter().next().expect("checked length");
    }
    let mut order = Vec::new();
    let mut choices = Vec::new();
    let mut stitched: Vec<Point> = Vec::new();
    let mut connectors = Vec::new();
    let mut total_cost = 0.0;
    let mut offset = 0usize;
    for plan in plans {
        if let (Some(&prev_exit), Some(&entry)) = (stitched.last(), plan.stitched.first()) {
            let jump = connector_cost(prev_exit, entry);
            if jump > 0.0 {
                connectors.push((prev_exit, entry));
            }
            total_cost += jump;
        }
        order.extend(plan.order.iter().map(|&pid| pid + offset));
        choices.extend(plan.choices.iter().copied());
        offset += plan.choices.len();
        total_cost += plan.total_cost;
        stitched.extend(plan.stitched.iter().copied());
        connectors.extend(plan.connectors.iter().copied());
    }
    GlobalPlan {
        order,
        choices,
        total_cost,
        stitched: dedup_consecutive(stitched),
        connectors,
    }
}

fn dump_diagnostics(
    spec: &PipelineSpec,
    roi: &PolygonROI,
    region: &CellRegion,
    sets: &[PartitionSet],
    plan: &GlobalPlan,
) -> String {
    let Some(dir) = &spec.diagnostics_dir else {
        return String::new();
    };
    let attempt = || -> Result<String> {
        std::fs::create_dir_all(dir)?;
        let stem = format!("{}-{}", roi.id, spec.id());
        let svg_path = dir.join(format!("{stem}.svg"));
        let mut scene = crate::svg::SvgScene::for_region(region);
        scene.add_region(region, "#dddddd");
        for set in sets {
            scene.add_partitions(set);
        }
        scene.add_plan(plan);
        std::fs::write(&svg_path, scene.finish())?;
        let json_path = dir.join(format!("{stem}.partitions.json"));
        crate::io::save_partitions(&json_path, sets)?;
        Ok(format!(" (diagnostics in {})", dir.display()))
    };
    attempt().unwrap_or_else(|e| format!(" (diagnostics dump failed: {e})"))
}

/// Relative excess of a metric over the per-polygon best: `(m - best) / best`.
pub fn overhead(value: f64, minimum: f64) -> Result<f64> {
    if !(minimum > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "overhead needs a positive minimum, got {minimum}"
        )));
    }
    if value < minimum {
        return Err(Error::NotMinimal { value, minimum });
    }
    Ok((value - minimum) / minimum)
}

/// Per-pipeline overhead means plus win/top-3 tallies on execution time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub pipeline: String,
    pub mean_time_overhead: f64,
    pub mean_length_overhead: f64,
    /// Absent when every polygon's best turn count was zero.
    pub mean_turns_overhead: Option<f64>,
    pub wins: usize,
    pub top3: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonOverheads {
    pub polygon: String,
    /// `(pipeline, time, length, turns)`; turns is absent when the
    /// per-polygon best is zero.
    pub entries: Vec<(String, f64, f64, Option<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadTable {
    /// Sorted by mean time overhead ascending.
    pub rows: Vec<OverheadRow>,
    pub per_polygon: Vec<PolygonOverheads>,
}

/// Aggregates a complete polygon x pipeline record matrix into overhead
/// means, wins, and top-3 finishes (time metric; ties credit every tied
/// pipeline).
pub fn aggregate(records: &[BenchmarkRecord]) -> Result<OverheadTable> {
    let mut polygons: Vec<String> = records.iter().map(|r| r.polygon_id.clone()).collect();
    polygons.sort();
    polygons.dedup();
    let mut pipelines: Vec<String> = records.iter().map(|r| r.pipeline_id.clone()).collect();
    pipelines.sort();
    pipelines.dedup();
    if polygons.is_empty() {
        return Err(Error::InvalidConfig("no records to aggregate".into()));
    }

    let mut matrix: BTreeMap<(&str, &str), &BenchmarkRecord> = BTreeMap::new();
    for r in records {
        matrix.insert((r.polygon_id.as_str(), r.pipeline_id.as_str()), r);
    }
    for poly in &polygons {
        for pipe in &pipelines {
            if !matrix.contains_key(&(poly.as_str(), pipe.as_str())) {
                return Err(Error::IncompleteMatrix {
                    polygon: poly.clone(),
                    pipeline: pipe.clone(),
                });
            }
        }
    }

    let mut per_polygon = Vec::with_capacity(polygons.len());
    let mut sums: BTreeMap<&str, (f64, f64, f64, usize)> = BTreeMap::new(); // t, l, k, k_count
    let mut wins: BTreeMap<&str, usize> = BTreeMap::new();
    let mut top3: BTreeMap<&str, usize> = BTreeMap::new();

    for poly in &polygons {
        let row: Vec<&BenchmarkRecord> = pipelines
            .iter()
            .map(|p| matrix[&(poly.as_str(), p.as_str())])
            .collect();
        let t_min = row.iter().map(|r| r.exec_time).fold(f64::INFINITY, f64::min);
        let l_min = row.iter().map(|r| r.length).fold(f64::INFINITY, f64::min);
        let k_min = row.iter().map(|r| r.turns).min().expect("nonempty") as f64;

        let mut entries = Vec::with_capacity(row.len());
        for r in &row {
            let t_ov = overhead(r.exec_time, t_min)?;
            let l_ov = overhead(r.length, l_min)?;
            let k_ov = if k_min > 0.0 {
                Some(overhead(r.turns as f64, k_min)?)
            } else {
                None
            };
            let entry = sums.entry(r.pipeline_id.as_str()).or_insert((0.0, 0.0, 0.0, 0));
            entry.0 += t_ov;
            entry.1 += l_ov;
            if let Some(k) = k_ov {
                entry.2 += k;
                entry.3 += 1;
            }
            if r.exec_time == t_min {
                *wins.entry(r.pipeline_id.as_str()).or_insert(0) += 1;
            }
            let rank = 1 + row.iter().filter(|o| o.exec_time < r.exec_time).count();
            if rank <= 3 {
                *top3.entry(r.pipeline_id.as_str()).or_insert(0) += 1;
            }
            entries.push((r.pipeline_id.clone(), t_ov, l_ov, k_ov));
        }
        per_polygon.push(PolygonOverheads {
            polygon: poly.clone(),
            entries,
        });
    }

    let n = polygons.len() as f64;
    let mut rows: Vec<OverheadRow> = pipelines
        .iter()
        .map(|p| {
            let (t, l, k, k_count) = sums.get(p.as_str()).copied().unwrap_or_default();
            OverheadRow {
                pipeline: p.clone(),
                mean_time_overhead: t / n,
                mean_length_overhead: l / n,
                mean_turns_overhead: (k_count > 0).then(|| k / k_count as f64),
                wins: wins.get(p.as_str()).copied().unwrap_or(0),
                top3: top3.get(p.as_str()).copied().unwrap_or(0),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.mean_time_overhead
            .total_cmp(&b.mean_time_overhead)
            .then_with(|| a.pipeline.cmp(&b.pipeline))
    });
    Ok(OverheadTable { rows, per_polygon })
}

impl OverheadTable {
    /// Plain-text summary, one pipeline per row, sorted by time overhead.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>8} {:>8} {:>8} {:>5} {:>5}",
            "pipeline", "uT(%)", "uL(%)", "uK(%)", "win", "top3"
        );
        for row in &self.rows {
            let turns = row
                .mean_turns_overhead
                .map(|k| format!("{:.2}", k * 100.0))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<10} {:>8.2} {:>8.2} {:>8} {:>5} {:>5}",
                row.pipeline,
                row.mean_time_overhead * 100.0,
                row.mean_length_overhead * 100.0,
                turns,
                row.wins,
                row.top3
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pipeline,mean_time_overhead,mean_length_overhead,mean_turns_overhead,wins,top3\n");
        for row in &self.rows {
            let turns = row
                .mean_turns_overhead
                .map(|k| k.to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                row.pipeline, row.mean_time_overhead, row.mean_length_overhead, turns, row.wins, row.top3
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::feasibility;

    fn default_spec(d: DecomposerKind, o: OptimizerKind) -> PipelineSpec {
        PipelineSpec::from_config(d, o, &PlannerConfig::default()).unwrap()
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = generate_corpus(1, &Family::ALL, 13);
        let b = generate_corpus(1, &Family::ALL, 13);
        assert_eq!(a.len(), 13);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        for roi in &a {
            roi.validate().unwrap();
        }
    }

    #[test]
    fn ring_family_is_infeasible_after_rasterization() {
        let rois = generate_corpus(5, &[Family::Ring], 6);
        for roi in &rois {
            let grid = grid_for_roi(roi, DEFAULT_CORPUS_CELL).unwrap();
            let region = rasterize(roi, &grid).unwrap();
            assert!(
                feasibility(&region).is_empty(),
                "{} should need decomposition",
                roi.id
            );
        }
    }

    #[test]
    fn rect_family_decomposes_to_one_partition() {
        let rois = generate_corpus(5, &[Family::Rect], 4);
        for roi in &rois {
            let grid = grid_for_roi(roi, DEFAULT_CORPUS_CELL).unwrap();
            let region = rasterize(roi, &grid).unwrap();
            let set = decompose(&region).unwrap();
            assert_eq!(set.partitions.len(), 1, "{}", roi.id);
        }
    }

    #[test]
    fn pipeline_pairing_is_validated() {
        assert!(PipelineSpec::from_config(DecomposerKind::None, OptimizerKind::Dp, &PlannerConfig::default()).is_err());
        assert!(PipelineSpec::from_config(DecomposerKind::Ours, OptimizerKind::Nn, &PlannerConfig::default()).is_err());
        let nn = default_spec(DecomposerKind::None, OptimizerKind::Nn);
        assert_eq!(nn.id(), "nn");
        let ours = default_spec(DecomposerKind::Ours, OptimizerKind::Dp);
        assert_eq!(ours.id(), "ours-dp");
    }

    #[test]
    fn pipeline_on_rectangle() {
        let rois = generate_corpus(2, &[Family::Rect], 1);
        let spec = default_spec(DecomposerKind::Ours, OptimizerKind::Dp);
        let run = run_pipeline(&rois[0], &spec).unwrap();
        assert_eq!(run.record.partitions, 1);
        assert_eq!(run.record.coverage, 1.0);
        assert!(run.record.length > 0.0);
        assert!(run.record.exec_time > 0.0);
    }

    #[test]
    fn pipeline_partition_counts_on_ring() {
        // 3x3 ring with a single-cell hole: two partitions ours, three bcd.
        let ring = cells_to_polygon(
            &[
                (0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2),
            ],
            DEFAULT_CORPUS_CELL,
            Point::new(0.0, 0.0),
            "ring-golden".into(),
        );
        let ours = run_pipeline(&ring, &default_spec(DecomposerKind::Ours, OptimizerKind::Dp)).unwrap();
        assert_eq!(ours.record.partitions, 2);
        let bcd = run_pipeline(&ring, &default_spec(DecomposerKind::Bcd, OptimizerKind::Dp)).unwrap();
        assert_eq!(bcd.record.partitions, 3);
        let nn = run_pipeline(&ring, &default_spec(DecomposerKind::None, OptimizerKind::Nn)).unwrap();
        assert_eq!(nn.record.partitions, 0);
        assert!(nn.record.coverage >= 0.99);
    }

    #[test]
    fn overhead_examples() {
        assert_eq!(overhead(110.0, 100.0).unwrap(), 0.10);
        assert_eq!(overhead(100.0, 100.0).unwrap(), 0.0);
        assert!((overhead(125.5, 100.0).unwrap() - 0.255).abs() < 1e-12);
        assert!(matches!(overhead(90.0, 100.0), Err(Error::NotMinimal { .. })));
        assert!(overhead(1.0, 0.0).is_err());
    }

    fn record(poly: &str, pipe: &str, t: f64, l: f64, k: usize) -> BenchmarkRecord {
        BenchmarkRecord {
            polygon_id: poly.into(),
            pipeline_id: pipe.into(),
            length: l,
            turns: k,
            exec_time: t,
            partitions: 1,
            planning_secs: 0.0,
            coverage: 1.0,
        }
    }

    #[test]
    fn aggregate_single_pipeline_all_zero() {
        let records = vec![
            record("a", "ours-dp", 10.0, 5.0, 2),
            record("b", "ours-dp", 20.0, 8.0, 4),
        ];
        let table = aggregate(&records).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert_eq!(row.mean_time_overhead, 0.0);
        assert_eq!(row.mean_length_overhead, 0.0);
        assert_eq!(row.mean_turns_overhead, Some(0.0));
        assert_eq!(row.wins, 2);
        assert_eq!(row.top3, 2);
    }

    #[test]
    fn aggregate_matches_hand_computation() {
        // Spreadsheet-style oracle over two pipelines and two polygons.
        let records = vec![
            record("a", "x", 10.0, 100.0, 4),
            record("a", "y", 12.0, 110.0, 4),
            record("b", "x", 8.0, 50.0, 10),
            record("b", "y", 6.0, 40.0, 5),
        ];
        let table = aggregate(&records).unwrap();
        // x: time overheads (0, 1/3) mean 1/6; y: (0.2, 0) mean 0.1.
        let y = table.rows.iter().find(|r| r.pipeline == "y").unwrap();
        assert!((y.mean_time_overhead - 0.1).abs() < 1e-12);
        let x = table.rows.iter().find(|r| r.pipeline == "x").unwrap();
        assert!((x.mean_time_overhead - 1.0 / 6.0).abs() < 1e-12);
        // Lengths: x: (0, 0.25) -> 0.125; y: (0.1, 0) -> 0.05.
        assert!((x.mean_length_overhead - 0.125).abs() < 1e-12);
        assert!((y.mean_length_overhead - 0.05).abs() < 1e-12);
        // Turns: poly a best 4: x 0, y 0; poly b best 5: x 1.0, y 0.
        assert_eq!(x.mean_turns_overhead, Some(0.5));
        assert_eq!(y.mean_turns_overhead, Some(0.0));
        // Wins on time: a -> x, b -> y.
        assert_eq!(x.wins, 1);
        assert_eq!(y.wins, 1);
        // Rows sorted by mean time overhead: y first.
        assert_eq!(table.rows[0].pipeline, "y");
    }

    #[test]
    fn aggregate_ties_credit_everyone() {
        let records = vec![
            record("a", "x", 10.0, 5.0, 2),
            record("a", "y", 10.0, 6.0, 2),
        ];
        let table = aggregate(&records).unwrap();
        for row in &table.rows {
            assert_eq!(row.wins, 1);
        }
    }

    #[test]
    fn aggregate_rejects_incomplete_matrix() {
        let records = vec![
            record("a", "x", 10.0, 5.0, 2),
            record("a", "y", 10.0, 6.0, 2),
            record("b", "x", 10.0, 5.0, 2),
        ];
        assert!(matches!(
            aggregate(&records),
            Err(Error::IncompleteMatrix { .. })
        ));
    }

    #[test]
    fn multi_component_polygon_is_chained() {
        // Two squares joined only at a corner rasterize into two components.
        let roi = PolygonROI {
            id: "pinch".into(),
            outer: vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 2.0),
                Point::new(4.0, 2.0),
                Point::new(4.0, 4.0),
                Point::new(2.0, 4.0),
                Point::new(2.0, 2.0),
                Point::new(0.0, 2.0),
            ],
            holes: vec![],
        };
        let mut config = PlannerConfig::default();
        config.footprint.width = Some(1.0);
        let spec = PipelineSpec::from_config(DecomposerKind::Ours, OptimizerKind::Dp, &config).unwrap();
        let run = run_pipeline(&roi, &spec).unwrap();
        assert_eq!(run.partition_sets.len(), 2);
        assert_eq!(run.record.partitions, 2);
        assert!(run.record.coverage >= 0.99);
    }
}
