//! Thin command-line front end over the `covplan` library.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use covplan::bench::{self, Family, PipelineSpec};
use covplan::config::PlannerConfig;
use covplan::decompose::decompose_traced;
use covplan::error::Error;
use covplan::io::{self, PlanDocument};
use covplan::roi::{coverage_ratio_sampled, grid_for_roi, rasterize, CoverageParams, PolygonROI};
use covplan::svg::SvgScene;

#[derive(Parser)]
#[command(name = "covplan", version, about = "Coverage path planning over gridded polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a parametric polygon corpus.
    Gen(GenArgs),
    /// Plan coverage of one polygon with one pipeline.
    Plan(PlanArgs),
    /// Run a corpus x pipeline benchmark matrix.
    Bench(BenchArgs),
    /// Check an existing plan's coverage of a polygon.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Planner configuration file (TOML). Flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coverage threshold override.
    #[arg(long)]
    alpha: Option<f64>,
    /// Turn penalty override (meters per turn).
    #[arg(long)]
    rho: Option<f64>,
    /// Footprint width override (meters).
    #[arg(long)]
    width: Option<f64>,
    /// Seed override (corpus generation and the genetic router).
    #[arg(long)]
    seed: Option<u64>,
    /// Exact-solver partition limit override.
    #[arg(long)]
    dp_limit: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> anyhow::Result<PlannerConfig> {
        let mut config = match &self.config {
            Some(path) => PlannerConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => PlannerConfig::default(),
        };
        if let Some(alpha) = self.alpha {
            config.alpha = alpha;
        }
        if let Some(rho) = self.rho {
            config.rho = rho;
        }
        if let Some(width) = self.width {
            config.footprint.width = Some(width);
            config.footprint.altitude = None;
            config.footprint.half_angle = None;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(limit) = self.dp_limit {
            config.dp_limit = limit;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Number of polygons.
    #[arg(long, default_value_t = 13)]
    count: usize,
    /// Comma-separated family list (default: all).
    #[arg(long)]
    families: Option<String>,
    /// Output polygon file.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Polygon file.
    #[arg(long)]
    roi: PathBuf,
    /// Polygon id within the file (default: first).
    #[arg(long)]
    id: Option<String>,
    /// Pipeline, e.g. `ours-dp`, `bcd-ga`, or `nn`.
    #[arg(long, default_value = "ours-dp")]
    pipeline: String,
    /// Plan JSON output path.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Partition JSON output path.
    #[arg(long)]
    partitions: Option<PathBuf>,
    /// SVG debug rendering output path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Polygon file; omit to generate a corpus on the fly.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Corpus size when generating.
    #[arg(long, default_value_t = 13)]
    count: usize,
    /// Comma-separated family list when generating (default: all).
    #[arg(long)]
    families: Option<String>,
    /// Comma-separated pipelines to run.
    #[arg(long, default_value = "ours-dp,bcd-dp,nn")]
    pipelines: String,
    /// Output directory for CSVs and SVGs.
    #[arg(long, short, default_value = "bench-out")]
    out: PathBuf,
    /// Also write one SVG per (polygon, pipeline).
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Polygon file.
    #[arg(long)]
    roi: PathBuf,
    /// Polygon id within the file (default: first).
    #[arg(long)]
    id: Option<String>,
    /// Plan JSON to verify.
    #[arg(long)]
    plan: PathBuf,
}

fn parse_families(text: &Option<String>) -> anyhow::Result<Vec<Family>> {
    match text {
        None => Ok(Family::ALL.to_vec()),
        Some(list) => list
            .split(',')
            .map(|name| Family::parse(name.trim()).map_err(Into::into))
            .collect(),
    }
}

fn pick_polygon(polygons: Vec<PolygonROI>, id: &Option<String>) -> anyhow::Result<PolygonROI> {
    match id {
        None => polygons.into_iter().next().context("polygon file is empty"),
        Some(id) => polygons
            .into_iter()
            .find(|p| &p.id == id)
            .with_context(|| format!("no polygon with id `{id}`")),
    }
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let config = args.config.resolve()?;
    let families = parse_families(&args.families)?;
    let footprint = config.footprint_width()?;
    let corpus = bench::generate_corpus_scaled(config.seed, &families, args.count, footprint);
    io::save_polygons(&args.out, &corpus)?;
    println!("wrote {} polygons to {}", corpus.len(), args.out.display());
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> anyhow::Result<()> {
    let config = args.config.resolve()?;
    let spec = PipelineSpec::parse_pair(&args.pipeline, &config)?;
    let roi = pick_polygon(io::load_polygons(&args.roi)?, &args.id)?;
    let run = bench::run_pipeline(&roi, &spec)?;
    println!(
        "{}: pipeline {} length {:.2} m, {} turns, {:.2} s estimated, {} partitions, coverage {:.4}",
        roi.id,
        run.record.pipeline_id,
        run.record.length,
        run.record.turns,
        run.record.exec_time,
        run.record.partitions,
        run.record.coverage
    );
    if let Some(path) = &args.out {
        io::save_plan(path, &PlanDocument::new(&roi.id, spec.id(), &run.plan))?;
        println!("plan written to {}", path.display());
    }
    if let Some(path) = &args.partitions {
        io::save_partitions(path, &run.partition_sets)?;
        println!("partitions written to {}", path.display());
    }
    if let Some(path) = &args.svg {
        let mut scene = SvgScene::for_region(&run.region);
        scene.add_region(&run.region, "#e8e8e8");
        for set in &run.partition_sets {
            scene.add_partitions(set);
        }
        if spec.decomposer == bench::DecomposerKind::Ours {
            // Re-run traced to overlay cut lines and gap bands.
            for component in run.region.connected_components() {
                if let Ok((_, trace)) = decompose_traced(&component) {
                    scene.add_gap_bands(&trace);
                    scene.add_cut_lines(&trace.cuts);
                }
            }
        }
        scene.add_plan(&run.plan);
        std::fs::write(path, scene.finish())?;
        println!("svg written to {}", path.display());
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = args.config.resolve()?;
    let corpus = match &args.corpus {
        Some(path) => io::load_polygons(path)?,
        None => {
            let families = parse_families(&args.families)?;
            bench::generate_corpus_scaled(
                config.seed,
                &families,
                args.count,
                config.footprint_width()?,
            )
        }
    };
    let mut specs = Vec::new();
    for name in args.pipelines.split(',') {
        let mut spec = PipelineSpec::parse_pair(name.trim(), &config)?;
        spec.diagnostics_dir = Some(args.out.join("diagnostics"));
        specs.push(spec);
    }
    std::fs::create_dir_all(&args.out)?;

    let jobs: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|p| (0..specs.len()).map(move |s| (p, s)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(p, s)| bench::run_pipeline(&corpus[p], &specs[s]).map(|run| (p, s, run)))
        .collect();

    let mut records = Vec::new();
    let mut failures = 0usize;
    for result in results {
        match result {
            Ok((p, s, run)) => {
                if args.svg {
                    let mut scene = SvgScene::for_region(&run.region);
                    scene.add_region(&run.region, "#e8e8e8");
                    for set in &run.partition_sets {
                        scene.add_partitions(set);
                    }
                    scene.add_plan(&run.plan);
                    let name = format!("{}-{}.svg", corpus[p].id, specs[s].id());
                    std::fs::write(args.out.join(name), scene.finish())?;
                }
                records.push(run.record);
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {e}");
            }
        }
    }
    records.sort_by(|a, b| {
        a.polygon_id
            .cmp(&b.polygon_id)
            .then_with(|| a.pipeline_id.cmp(&b.pipeline_id))
    });
    let records_path = args.out.join("records.csv");
    std::fs::write(&records_path, io::records_to_csv(&records))?;
    println!("records written to {}", records_path.display());

    if failures == 0 {
        let table = bench::aggregate(&records)?;
        let summary_path = args.out.join("summary.csv");
        std::fs::write(&summary_path, table.to_csv())?;
        print!("{}", table.to_text());
        println!("summary written to {}", summary_path.display());
        Ok(())
    } else {
        bail!("{failures} run(s) failed coverage; see diagnostics");
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<()> {
    let config = args.config.resolve()?;
    let roi = pick_polygon(io::load_polygons(&args.roi)?, &args.id)?;
    let plan = io::load_plan(&args.plan)?;
    let footprint = config.footprint_width()?;
    let grid = grid_for_roi(&roi, footprint)?;
    let region = rasterize(&roi, &grid)?;
    let params = CoverageParams::new(config.alpha, footprint)?;
    let ratio = coverage_ratio_sampled(&region, &plan.waypoints, &params, config.coverage_samples);
    println!(
        "{}: coverage {:.6} (required {:.6})",
        roi.id, ratio, config.alpha
    );
    if ratio < config.alpha {
        bail!(Error::CoverageShortfall {
            polygon: roi.id,
            achieved: ratio,
            required: config.alpha,
            diagnostics: String::new(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
