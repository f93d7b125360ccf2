//! Coverage path planning for survey UAVs over gridded polygonal regions.
//!
//! The pipeline: polygons with holes are rasterized onto a grid whose cell
//! size equals the camera footprint ([`roi`]); regions that are not monotone
//! along either cardinal axis are recursively cut along gap-severity-guided
//! lines and re-merged where unions stay sweepable ([`decompose`]); each
//! partition yields corner-based serpentine candidates ([`sweep`]); a joint
//! optimizer picks one candidate per partition and a visitation order
//! ([`route`]); and the stitched route is timed under motion limits
//! ([`kinodyn`]). The [`bench`] module wraps all of it in a corpus harness
//! with relative-overhead reporting.
//!
//! Runnable walkthroughs live in `examples/`; the `covplan` binary exposes
//! the same pipeline as `gen`, `plan`, `bench`, and `verify` subcommands.

pub mod bench;
pub mod config;
pub mod decompose;
pub mod error;
pub mod geom;
pub mod grid;
pub mod io;
pub mod kinodyn;
pub mod roi;
pub mod route;
pub mod svg;
pub mod sweep;

#[cfg(test)]
pub(crate) mod testutil;

pub use bench::{
    aggregate, generate_corpus, overhead, run_pipeline, DecomposerKind, Family, OptimizerKind,
    OverheadTable, PipelineSpec,
};
pub use config::PlannerConfig;
pub use decompose::{
    axis_probe, bcd_decompose, decompose, feasibility, gap_severity, is_monotone, merge_pass,
    select_cut, Axis, AxisProbe, CutLine, FeasibleAxes, GapBand, GapReport, Partition,
    PartitionSet,
};
pub use error::{Error, Result};
pub use geom::{Point, Rect};
pub use grid::{Cell, CellRegion, GridSpec};
pub use io::BenchmarkRecord;
pub use kinodyn::{rest_to_rest_time, time_parameterize, MotionLimits, TimingProfile};
pub use roi::{
    coverage_ratio, coverage_ratio_sampled, footprint_width, grid_for_roi, rasterize,
    CoverageParams, FootprintSpec, PolygonROI,
};
pub use route::{
    connector_cost, ga_route, greedy_route, held_karp, local_cost, nn_baseline, stitch,
    CostParams, GaConfig, GlobalPlan,
};
pub use sweep::{candidates, track_layout, StartCorner, SweepCandidate};
