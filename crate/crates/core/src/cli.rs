//! Command-line front end of the `navsim` binary.
//!
//! Exit codes: 0 success (stalled runs included), 1 validation failure,
//! 2 I/O or parse failure, 3 internal diagnostic.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::batch::compare;
use crate::error::{NavError, Result};
use crate::geometry::Point;
use crate::io::{to_json_string, write_json};
use crate::oracle2d::{build_tangent_graph, shortest_path};
use crate::shadow::classify;
use crate::simulator::{simulate, Outcome, RunSummary, SimParams};
use crate::svg::{render, Scene};
use crate::world::{
    load_scenario, load_world, random_world, validate, world_to_json, RandomWorldParams, World,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DIAGNOSTIC: i32 = 3;

/// Environment variable overriding `--jobs`.
pub const JOBS_ENV: &str = "NAVSIM_JOBS";

#[derive(Parser, Debug)]
#[command(name = "navsim", version, about = "Cone-projection navigation in sphere worlds")]
struct Cli {
    /// Seed for random worlds and start sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch runs (overridden by NAVSIM_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = "navsim-out")]
    out_dir: PathBuf,
    /// Output format for the main result.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the world assumptions (and the destination, when given).
    Validate {
        world: PathBuf,
        #[arg(long, value_parser = parse_point)]
        destination: Option<Point>,
    },
    /// Print obstacle generations for a destination.
    Classify {
        world: PathBuf,
        #[arg(long, value_parser = parse_point)]
        destination: Point,
        /// Also write a shaded SVG of the shadow regions (planar only).
        #[arg(long)]
        svg: bool,
    },
    /// Simulate every start of a scenario.
    Simulate {
        world: PathBuf,
        scenario: PathBuf,
        /// Also write an SVG with all trajectories (planar only).
        #[arg(long)]
        svg: bool,
        /// Record wall-clock time in the summaries.
        #[arg(long)]
        timing: bool,
    },
    /// Compare trajectories with shortest paths from sampled starts.
    Compare(CompareArgs),
    /// Render a world with trajectories and reference paths.
    Plot {
        world: PathBuf,
        /// Trajectory CSV files.
        #[arg(long = "trajectory")]
        trajectories: Vec<PathBuf>,
        /// Reference path JSON files.
        #[arg(long = "oracle")]
        oracles: Vec<PathBuf>,
        #[arg(long, value_parser = parse_point)]
        destination: Option<Point>,
        /// Shade shadow regions (needs the destination).
        #[arg(long)]
        shadows: bool,
        /// Output file, by default `plot.svg` in the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a random world satisfying the assumptions.
    GenWorld(GenWorldArgs),
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// World file; omit with `--random`.
    world: Option<PathBuf>,
    /// Use a random planar world generated from `--seed`.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 13)]
    obstacles: usize,
    #[arg(long, default_value_t = 10.0)]
    workspace_radius: f64,
    #[arg(long, default_value_t = 100)]
    starts: usize,
    #[arg(long, default_value_t = 0.01)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, value_parser = parse_point)]
    destination: Option<Point>,
    /// Write the trajectory and shortest path of this start index as SVG.
    #[arg(long)]
    overlay: Option<usize>,
}

#[derive(Args, Debug)]
struct GenWorldArgs {
    #[arg(long, default_value_t = 2)]
    dimension: usize,
    #[arg(long, default_value_t = 13)]
    obstacles: usize,
    #[arg(long, default_value_t = 10.0)]
    workspace_radius: f64,
    #[arg(long)]
    min_radius: Option<f64>,
    #[arg(long)]
    max_radius: Option<f64>,
    #[arg(long)]
    min_gap: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_point(text: &str) -> std::result::Result<Point, String> {
    let coords: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match coords {
        Ok(c) if !c.is_empty() => Ok(Point::from_vec(c)),
        _ => Err(format!("expected comma-separated coordinates, got `{text}`")),
    }
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<NavError> for Failure {
    fn from(err: NavError) -> Self {
        let code = match err {
            NavError::Parse(_) | NavError::Io(_) => EXIT_IO,
            NavError::Domain(_) | NavError::Invalid(_) | NavError::Generation { .. } => EXIT_INVALID,
            NavError::Chain { .. } | NavError::NoPath | NavError::LowerBound { .. } => EXIT_DIAGNOSTIC,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let jobs = std::env::var(JOBS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).or(cli.jobs);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j);
    }
    let outcome = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("navsim: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { world, destination } => cmd_validate(world, destination.as_ref()),
        Command::Classify { world, destination, svg } => {
            cmd_classify(cli, world, destination, *svg || cli.format == Format::Svg)
        }
        Command::Simulate {
            world,
            scenario,
            svg,
            timing,
        } => cmd_simulate(cli, world, scenario, *svg || cli.format == Format::Svg, *timing),
        Command::Compare(args) => cmd_compare(cli, args),
        Command::Plot {
            world,
            trajectories,
            oracles,
            destination,
            shadows,
            output,
        } => cmd_plot(cli, world, trajectories, oracles, destination.as_ref(), *shadows, output.as_deref()),
        Command::GenWorld(args) => cmd_gen_world(cli, args),
    }
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> std::result::Result<(), Failure> {
    print!("{}", to_json_string(value)?);
    Ok(())
}

fn ensure_out_dir(cli: &Cli) -> std::result::Result<&Path, Failure> {
    std::fs::create_dir_all(&cli.out_dir).map_err(NavError::from)?;
    Ok(&cli.out_dir)
}

/// Loads a world and checks the assumptions, reporting violations on
/// standard output.
fn load_valid(path: &Path, destination: Option<&Point>) -> std::result::Result<World, Failure> {
    let world = load_world(path)?;
    if let Some(d) = destination {
        world.check_point(d, "destination")?;
    }
    let report = validate(&world, destination);
    if !report.is_valid() {
        print_json(&report)?;
        return Err(Failure {
            code: EXIT_INVALID,
            message: "world violates the navigation assumptions".into(),
        });
    }
    Ok(world)
}

fn cmd_validate(path: &Path, destination: Option<&Point>) -> CmdResult {
    let world = load_world(path)?;
    if let Some(d) = destination {
        world.check_point(d, "destination")?;
    }
    let report = validate(&world, destination);
    print_json(&report)?;
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_classify(cli: &Cli, path: &Path, destination: &Point, svg: bool) -> CmdResult {
    let world = load_valid(path, Some(destination))?;
    if svg && world.dimension() != 2 {
        return Err(NavError::Invalid("SVG output is available for planar worlds only".into()).into());
    }
    let gmap = classify(&world, destination);
    print!("{}", gmap.to_json()?);
    if svg {
        let scene = Scene {
            world: Some(&world),
            destination: Some(destination),
            generations: Some(&gmap),
            ..Scene::default()
        };
        let out = ensure_out_dir(cli)?;
        std::fs::write(out.join("classify.svg"), render(&scene)?).map_err(NavError::from)?;
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(cli: &Cli, world_path: &Path, scenario_path: &Path, svg: bool, timing: bool) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let world = load_valid(world_path, Some(&scenario.destination))?;
    scenario.check(&world)?;
    if svg && world.dimension() != 2 {
        return Err(NavError::Invalid("SVG output is available for planar worlds only".into()).into());
    }
    let params = SimParams::from_scenario(&world, &scenario);
    params.check()?;
    let gmap = classify(&world, &scenario.destination);
    use rayon::prelude::*;
    let runs: Vec<_> = scenario
        .starts
        .par_iter()
        .map(|x0| {
            let clock = Instant::now();
            simulate(&world, &scenario.destination, x0, &gmap, &params).map(|rec| (rec, clock.elapsed()))
        })
        .collect::<Result<_>>()?;
    let out = ensure_out_dir(cli)?;
    let mut summaries: Vec<RunSummary> = Vec::with_capacity(runs.len());
    for (k, (rec, elapsed)) in runs.iter().enumerate() {
        std::fs::write(out.join(format!("trajectory_{k:03}.csv")), rec.to_csv()).map_err(NavError::from)?;
        let mut summary = rec.summary();
        if timing {
            summary.wall_time = Some(elapsed.as_secs_f64());
        }
        write_json(&out.join(format!("summary_{k:03}.json")), &summary)?;
        summaries.push(summary);
    }
    write_json(&out.join("summaries.json"), &summaries)?;
    if svg {
        let scene = Scene {
            world: Some(&world),
            destination: Some(&scenario.destination),
            generations: Some(&gmap),
            trajectories: runs.iter().map(|(rec, _)| planar(rec.samples.iter().map(|s| &s.x))).collect(),
            ..Scene::default()
        };
        std::fs::write(out.join("simulate.svg"), render(&scene)?).map_err(NavError::from)?;
    }
    print_json(&summaries)?;
    let failed = summaries
        .iter()
        .any(|s| matches!(s.outcome, Outcome::Unsafe | Outcome::Diagnostic));
    Ok(if failed { EXIT_DIAGNOSTIC } else { EXIT_OK })
}

fn planar<'a>(points: impl Iterator<Item = &'a Point>) -> Vec<[f64; 2]> {
    points.map(|p| [p[0], p[1]]).collect()
}

fn cmd_compare(cli: &Cli, args: &CompareArgs) -> CmdResult {
    let world = match (&args.world, args.random) {
        (Some(path), false) => load_world(path)?,
        (None, true) => {
            let params = RandomWorldParams::new(2, args.obstacles, args.workspace_radius);
            random_world(cli.seed, &params)?
        }
        _ => return Err(NavError::Invalid("give either a world file or --random".into()).into()),
    };
    if world.dimension() != 2 {
        return Err(NavError::Invalid("comparisons need a planar world".into()).into());
    }
    let destination = args.destination.clone().unwrap_or_else(|| Point::zeros(2));
    world.check_point(&destination, "destination")?;
    let report = validate(&world, Some(&destination));
    if !report.is_valid() {
        print_json(&report)?;
        return Ok(EXIT_INVALID);
    }
    let params = SimParams::defaults(world.workspace_radius(), args.gamma);
    let batch = compare(&world, &destination, args.starts, cli.seed, args.rel_tol, &params)?;
    let out = ensure_out_dir(cli)?;
    write_json(&out.join("report.json"), &batch)?;
    if args.random {
        std::fs::write(out.join("world.json"), world_to_json(&world)?).map_err(NavError::from)?;
    }
    if let Some(index) = args.overlay {
        let record = batch
            .records
            .get(index)
            .ok_or_else(|| NavError::Invalid(format!("no start with index {index}")))?;
        let x0 = Point::from_vec(record.start.clone());
        let gmap = classify(&world, &destination);
        let rec = simulate(&world, &destination, &x0, &gmap, &params)?;
        let path = shortest_path(&build_tangent_graph(&world, &x0, &destination)?)?;
        let scene = Scene {
            world: Some(&world),
            destination: Some(&destination),
            trajectories: vec![planar(rec.samples.iter().map(|s| &s.x))],
            oracle_paths: vec![path.polyline(std::f64::consts::PI / 90.0)],
            ..Scene::default()
        };
        std::fs::write(out.join(format!("overlay_{index:03}.svg")), render(&scene)?).map_err(NavError::from)?;
    }
    match cli.format {
        Format::Csv => print!("{}", batch.to_csv()),
        _ => print_json(&batch)?,
    }
    Ok(EXIT_OK)
}

fn read_trajectory_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| NavError::Parse(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| NavError::Parse(format!("{}: missing column {name}", path.display())))
    };
    let (ix, iy) = (find("x1")?, find("x2")?);
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let get = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .and_then(|f| f.parse::<f64>().ok())
                    .ok_or_else(|| NavError::Parse(format!("{}: bad row `{line}`", path.display())))
            };
            Ok([get(ix)?, get(iy)?])
        })
        .collect()
}

fn read_polyline_json(path: &Path) -> Result<Vec<[f64; 2]>> {
    #[derive(serde::Deserialize)]
    struct Polyline {
        points: Vec<[f64; 2]>,
    }
    let p: Polyline = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(p.points)
}

fn cmd_plot(
    cli: &Cli,
    world_path: &Path,
    trajectories: &[PathBuf],
    oracles: &[PathBuf],
    destination: Option<&Point>,
    shadows: bool,
    output: Option<&Path>,
) -> CmdResult {
    let world = load_world(world_path)?;
    if world.dimension() != 2 {
        return Err(NavError::Invalid("plots need a planar world".into()).into());
    }
    if let Some(d) = destination {
        world.check_point(d, "destination")?;
    }
    let gmap = match (shadows, destination) {
        (true, Some(d)) => Some(classify(&world, d)),
        (true, None) => return Err(NavError::Invalid("--shadows needs --destination".into()).into()),
        _ => None,
    };
    let scene = Scene {
        world: Some(&world),
        destination,
        generations: gmap.as_ref(),
        trajectories: trajectories.iter().map(|p| read_trajectory_csv(p)).collect::<Result<_>>()?,
        oracle_paths: oracles.iter().map(|p| read_polyline_json(p)).collect::<Result<_>>()?,
    };
    let svg = render(&scene)?;
    let target = match output {
        Some(p) => p.to_path_buf(),
        None => ensure_out_dir(cli)?.join("plot.svg"),
    };
    std::fs::write(&target, svg).map_err(NavError::from)?;
    Ok(EXIT_OK)
}

fn cmd_gen_world(cli: &Cli, args: &GenWorldArgs) -> CmdResult {
    let mut params = RandomWorldParams::new(args.dimension, args.obstacles, args.workspace_radius);
    if let Some(r) = args.min_radius {
        params.radius_range.0 = r;
    }
    if let Some(r) = args.max_radius {
        params.radius_range.1 = r;
    }
    if let Some(g) = args.min_gap {
        params.min_gap = g;
    }
    let world = random_world(cli.seed, &params)?;
    let text = world_to_json(&world)?;
    match &args.output {
        Some(p) => std::fs::write(p, text).map_err(NavError::from)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}
