//! Argument parsing and subcommand execution.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use geoswarm::geo::{self, GeoPoint, GeoRect};
use geoswarm::hierarchy::evaluate_levels;
use geoswarm::index::{GridConfig, GridDensity, GridIndex};
use geoswarm::objectives::{
    facility_objective, product_mix_objective, FacilityInstance, ProductMixInstance,
};
use geoswarm::pso::{self, RunOutcome, SwarmConfig, Topology};

use crate::config::FileConfig;
use crate::geocode::HashGeocoder;
use crate::ingest::{self, CustomerFormat, CustomerLoad};
use crate::render::{self, LayerKind, RenderLayer, Style};
use crate::store;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "geoswarm",
    version,
    about = "Swarm optimisation and spatial queries over customer and hierarchy data",
    arg_required_else_help = true
)]
struct Cli {
    /// Random seed; echoed to stderr on every run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Settings file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Look up points in a saved index.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Run the particle swarm on a business problem.
    #[command(subcommand)]
    Optimize(OptimizeCommand),
    /// Reporting-chain analysis.
    #[command(subcommand)]
    Hierarchy(HierarchyCommand),
    /// Draw map overlays to GeoJSON or SVG.
    Render(RenderArgs),
    /// Build and save a grid index.
    #[command(subcommand)]
    Index(IndexCommand),
}

#[derive(Debug, Subcommand)]
enum QueryCommand {
    /// The k closest indexed points to a location.
    Nearest {
        #[arg(long)]
        index: PathBuf,
        /// Query location, e.g. `POINT(30 10)`.
        #[arg(long)]
        point: String,
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Indexed points inside the polygons of a ring file.
    Within {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        polygon: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum OptimizeCommand {
    /// Place k facilities minimising total customer distance.
    Facility {
        #[arg(long)]
        customers: PathBuf,
        #[arg(short)]
        k: usize,
        #[command(flatten)]
        swarm: SwarmArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximise profit under linear resource limits.
    ProductMix {
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        swarm: SwarmArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Global,
    Ring,
}

#[derive(Debug, Args)]
struct SwarmArgs {
    #[arg(long)]
    swarm_size: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,
    #[arg(long)]
    ring_radius: Option<usize>,
    /// Velocity cap as a fraction of each dimension's range.
    #[arg(long)]
    velocity_fraction: Option<f64>,
    #[arg(long)]
    stagnation_epsilon: Option<f64>,
    #[arg(long)]
    stagnation_window: Option<usize>,
    /// Write per-iteration gbest fitness as CSV.
    #[arg(long, value_name = "CSV")]
    history: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum HierarchyCommand {
    /// Depth of every employee below the top of the organisation.
    Levels {
        #[arg(long = "in", value_name = "CSV")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write ids whose chain ends at an unknown manager.
        #[arg(long, value_name = "FILE")]
        unreachable: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Layer list: one `points|outline <path> [color=..] [size=..] [name=..]` per line.
    #[arg(long)]
    layers: PathBuf,
    /// Output file; the extension picks `.geojson` or `.svg`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum IndexCommand {
    Build {
        #[arg(long)]
        customers: PathBuf,
        /// `lon_min,lat_min,lon_max,lat_max`; defaults to the customers' extent.
        #[arg(long, allow_hyphen_values = true)]
        bounds: Option<String>,
        /// Four comma-separated densities, e.g. `HIGH,MEDIUM,LOW,LOW`.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = Result<(), Failure>;

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match run(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nRun `geoswarm --help` for usage.");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(usage)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    writeln!(err, "seed: {seed}").map_err(data)?;
    let ctx = Context {
        seed,
        file,
        out,
        err,
    };
    match cli.command {
        Command::Query(QueryCommand::Nearest {
            index,
            point,
            k,
            out,
        }) => ctx.nearest(&index, &point, k, out),
        Command::Query(QueryCommand::Within {
            index,
            polygon,
            out,
        }) => ctx.within(&index, &polygon, out),
        Command::Optimize(OptimizeCommand::Facility {
            customers,
            k,
            swarm,
            out,
        }) => ctx.facility(&customers, k, &swarm, out),
        Command::Optimize(OptimizeCommand::ProductMix {
            problem,
            swarm,
            out,
        }) => ctx.product_mix(&problem, &swarm, out),
        Command::Hierarchy(HierarchyCommand::Levels {
            input,
            out,
            unreachable,
        }) => ctx.levels(&input, out, unreachable),
        Command::Render(args) => ctx.render(&args),
        Command::Index(IndexCommand::Build {
            customers,
            bounds,
            levels,
            out,
        }) => ctx.build_index(&customers, bounds.as_deref(), levels.as_deref(), &out),
    }
}

struct Context<'a> {
    seed: u64,
    file: FileConfig,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

impl Context<'_> {
    /// Sends a report to `path` when given, otherwise to stdout.
    fn emit(&mut self, path: Option<PathBuf>, text: &str) -> Outcome {
        match path {
            Some(p) => write_file(&p, text),
            None => self.out.write_all(text.as_bytes()).map_err(data),
        }
    }

    fn note(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn customers(&mut self, path: &Path) -> Result<Vec<(String, GeoPoint)>, Failure> {
        let CustomerLoad { rows, rejects } =
            ingest::load_customers(path, CustomerFormat::Auto).map_err(data)?;
        for r in &rejects {
            self.note(format!(
                "rejected {} line {}: {}",
                path.display(),
                r.line,
                r.reason
            ));
        }
        let mut located = Vec::with_capacity(rows.len());
        for row in rows {
            match row.locate(&HashGeocoder) {
                Ok(p) => located.push((row.id, p)),
                Err(e) => self.note(format!("rejected {} id {}: {e}", path.display(), row.id)),
            }
        }
        if located.is_empty() {
            return Err(Failure::Data(format!(
                "{}: no usable customer rows",
                path.display()
            )));
        }
        Ok(located)
    }

    fn nearest(mut self, index: &Path, point: &str, k: usize, out: Option<PathBuf>) -> Outcome {
        let q = geo::parse_wkt_point(point).map_err(|e| usage(format!("--point: {e}")))?;
        let idx = store::load(index).map_err(data)?;
        let hits = idx.nearest(&q, k).map_err(data)?;
        let mut text = String::from("rank,id,distance_m\n");
        for (rank, (id, d)) in hits.iter().enumerate() {
            let _ = writeln!(text, "{},{},{}", rank + 1, csv_field(id), d);
        }
        self.emit(out, &text)
    }

    fn within(mut self, index: &Path, polygon: &Path, out: Option<PathBuf>) -> Outcome {
        let idx = store::load(index).map_err(data)?;
        let rings = ingest::load_rings(polygon).map_err(data)?;
        let mut ids = std::collections::BTreeSet::new();
        for ring in &rings {
            ids.extend(idx.range_query(ring).map_err(data)?);
        }
        let mut text = String::from("id\n");
        for id in &ids {
            let _ = writeln!(text, "{}", csv_field(id));
        }
        self.emit(out, &text)
    }

    fn swarm_config(&self, base: SwarmConfig, args: &SwarmArgs) -> Result<SwarmConfig, Failure> {
        let f = &self.file;
        let mut cfg = base.with_seed(self.seed);
        if let Some(n) = args.swarm_size.or(f.swarm_size) {
            cfg = cfg.with_swarm_size(n);
        }
        if let Some(n) = args.max_iterations.or(f.max_iterations) {
            cfg = cfg.with_max_iterations(n);
        }
        cfg.c0 = args.c0.or(f.c0).unwrap_or(cfg.c0);
        cfg.c1 = args.c1.or(f.c1).unwrap_or(cfg.c1);
        cfg.c2 = args.c2.or(f.c2).unwrap_or(cfg.c2);
        let topology = match (args.topology, f.topology.as_deref()) {
            (Some(t), _) => t,
            (None, Some(name)) => {
                TopologyArg::from_str(name, true).map_err(|e| usage(format!("topology: {e}")))?
            }
            (None, None) => TopologyArg::Global,
        };
        if topology == TopologyArg::Ring {
            let radius = args.ring_radius.or(f.ring_radius).unwrap_or(1);
            cfg = cfg.with_topology(Topology::Ring { radius });
        }
        if let Some(frac) = args.velocity_fraction.or(f.velocity_fraction) {
            cfg = cfg.with_velocity_fraction(frac);
        }
        let eps = args.stagnation_epsilon.or(f.stagnation_epsilon);
        let window = args.stagnation_window.or(f.stagnation_window);
        if eps.is_some() || window.is_some() {
            cfg = cfg.with_stagnation(eps.unwrap_or(0.0), window.unwrap_or(0));
        }
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }

    fn history(&self, args: &SwarmArgs, outcome: &RunOutcome) -> Outcome {
        let Some(path) = &args.history else {
            return Ok(());
        };
        let mut text = String::from("iteration,gbest_fitness\n");
        for (i, f) in outcome.history.iter().enumerate() {
            let _ = writeln!(text, "{i},{f}");
        }
        write_file(path, &text)
    }

    fn facility(
        mut self,
        customers: &Path,
        k: usize,
        args: &SwarmArgs,
        out: Option<PathBuf>,
    ) -> Outcome {
        let located = self.customers(customers)?;
        let points: Vec<GeoPoint> = located.iter().map(|(_, p)| *p).collect();
        let region = padded_extent(&points)?;
        let inst = FacilityInstance::new(points, k, region).map_err(data)?;
        let objective = facility_objective(&inst);
        let cfg = self.swarm_config(SwarmConfig::for_objective(&objective), args)?;
        let outcome = pso::run(&cfg, &objective).map_err(data)?;
        self.history(args, &outcome)?;

        let mut text = String::new();
        let _ = writeln!(text, "seed: {}", self.seed);
        let _ = writeln!(text, "customers: {}", inst.customers().len());
        let _ = writeln!(text, "k: {k}");
        let _ = writeln!(text, "iterations: {}", outcome.iterations);
        let _ = writeln!(text, "best_fitness: {}", outcome.best_fitness);
        for (i, f) in inst.decode(&outcome.best_position).iter().enumerate() {
            let _ = writeln!(text, "facility {}: {}", i + 1, geo::emit_wkt(f));
        }
        self.emit(out, &text)
    }

    fn product_mix(mut self, problem: &Path, args: &SwarmArgs, out: Option<PathBuf>) -> Outcome {
        let source = fs::read_to_string(problem)
            .map_err(|e| Failure::Data(format!("{}: {e}", problem.display())))?;
        let inst = ProductMixInstance::parse(&source)
            .map_err(|e| Failure::Data(format!("{}: {e}", problem.display())))?;
        let objective = product_mix_objective(&inst).map_err(data)?;
        let cfg = self.swarm_config(SwarmConfig::for_objective(&objective), args)?;
        let outcome = pso::run(&cfg, &objective).map_err(data)?;
        self.history(args, &outcome)?;

        let x = &outcome.best_position;
        let mut text = String::new();
        let _ = writeln!(text, "seed: {}", self.seed);
        let _ = writeln!(text, "iterations: {}", outcome.iterations);
        let _ = writeln!(text, "best_fitness: {}", outcome.best_fitness);
        let _ = writeln!(text, "profit: {}", inst.objective_value(x));
        let _ = writeln!(text, "max_violation: {}", inst.max_violation(x));
        for (i, v) in x.iter().enumerate() {
            let _ = writeln!(text, "x{}: {v}", i + 1);
        }
        self.emit(out, &text)
    }

    fn levels(
        mut self,
        input: &Path,
        out: Option<PathBuf>,
        unreachable: Option<PathBuf>,
    ) -> Outcome {
        let records = ingest::load_hierarchy(input).map_err(data)?;
        let levels = evaluate_levels(&records).map_err(data)?;
        let mut text = String::from("emp_id,first_name,last_name,manager_id,level\n");
        for (r, level) in &levels.rows {
            let manager = r
                .manager_id
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default();
            let _ = writeln!(
                text,
                "{},{},{},{},{level}",
                csv_field(&r.emp_id.to_string()),
                csv_field(&r.first_name),
                csv_field(&r.last_name),
                csv_field(&manager)
            );
        }
        if !levels.unreachable.is_empty() {
            self.note(format!("unreachable: {} records", levels.unreachable.len()));
        }
        if let Some(path) = unreachable {
            let mut list = String::from("emp_id\n");
            for id in &levels.unreachable {
                let _ = writeln!(list, "{}", csv_field(&id.to_string()));
            }
            write_file(&path, &list)?;
        }
        self.emit(out, &text)
    }

    fn render(mut self, args: &RenderArgs) -> Outcome {
        let listing = fs::read_to_string(&args.layers)
            .map_err(|e| Failure::Data(format!("{}: {e}", args.layers.display())))?;
        let base = args.layers.parent().unwrap_or(Path::new(""));
        let layers = parse_layers(&listing, base)
            .map_err(|e| Failure::Data(format!("{}: {e}", args.layers.display())))?;
        let ext = args
            .out
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("geojson" | "json") => render::render_geojson(&layers, &args.out).map_err(data)?,
            Some("svg") => {
                let width = args.width.or(self.file.width).unwrap_or(1024);
                let height = args.height.or(self.file.height).unwrap_or(512);
                render::render_svg(&layers, &args.out, width, height).map_err(|e| match e {
                    render::RenderError::CanvasTooSmall(..) => usage(e),
                    e => data(e),
                })?
            }
            _ => return Err(usage("--out must end in .geojson or .svg")),
        }
        let features: usize = layers.iter().map(|l| l.features().len()).sum();
        self.note(format!(
            "rendered {} layers, {features} features",
            layers.len()
        ));
        Ok(())
    }

    fn build_index(
        mut self,
        customers: &Path,
        bounds: Option<&str>,
        levels: Option<&str>,
        out: &Path,
    ) -> Outcome {
        let located = self.customers(customers)?;
        let bounds = match bounds {
            Some(text) => parse_bounds(text).map_err(|e| usage(format!("--bounds: {e}")))?,
            None => padded_extent(&located.iter().map(|(_, p)| *p).collect::<Vec<_>>())?,
        };
        let levels = match levels.or(self.file.levels.as_deref()) {
            Some(text) => parse_levels(text).map_err(|e| usage(format!("--levels: {e}")))?,
            None => [GridDensity::High; 4],
        };
        let index = GridIndex::build(located, GridConfig::new(levels, bounds)).map_err(data)?;
        store::save(&index, out).map_err(data)?;
        let _ = writeln!(self.out, "entries: {}", index.len());
        let _ = writeln!(self.out, "cells: {}", index.cells().len());
        Ok(())
    }
}

/// Quotes a CSV field when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Bounding box of `points`, widened by half a degree on any axis where it
/// has no extent.
fn padded_extent(points: &[GeoPoint]) -> Result<GeoRect, Failure> {
    let fold = |f: fn(&GeoPoint) -> f64| {
        points
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let pad = |(lo, hi): (f64, f64), limit: f64| {
        if lo < hi {
            (lo, hi)
        } else {
            ((lo - 0.5).max(-limit), (hi + 0.5).min(limit))
        }
    };
    let (lon_min, lon_max) = pad(fold(GeoPoint::lon), 180.0);
    let (lat_min, lat_max) = pad(fold(GeoPoint::lat), 90.0);
    GeoRect::new(lon_min, lat_min, lon_max, lat_max).map_err(data)
}

fn parse_bounds(text: &str) -> Result<GeoRect, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {s:?}"))
        })
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = v[..] else {
        return Err("expected lon_min,lat_min,lon_max,lat_max".into());
    };
    GeoRect::new(a, b, c, d).map_err(|e| e.to_string())
}

fn parse_levels(text: &str) -> Result<[GridDensity; 4], String> {
    let v: Vec<GridDensity> = text
        .split(',')
        .map(|s| s.trim().parse::<GridDensity>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected four densities".to_string())
}

/// Drops a `#` comment that starts the line or follows whitespace, so colour
/// values like `color=#ff0000` survive.
fn strip_comment(line: &str) -> &str {
    let cut = line
        .char_indices()
        .find(|&(i, c)| c == '#' && (i == 0 || line[..i].ends_with(char::is_whitespace)))
        .map_or(line.len(), |(i, _)| i);
    line[..cut].trim()
}

/// Reads a layer list. Relative data paths resolve against `base`.
pub fn parse_layers(listing: &str, base: &Path) -> Result<Vec<RenderLayer>, String> {
    let mut layers = Vec::new();
    for (n, raw) in listing.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let fail = |m: String| format!("line {}: {m}", n + 1);
        let mut words = line.split_whitespace();
        let kind = match words.next() {
            Some("points") => LayerKind::Points,
            Some("outline") => LayerKind::Outline,
            Some(other) => return Err(fail(format!("unknown layer kind {other:?}"))),
            None => unreachable!("blank lines skipped"),
        };
        let path = base.join(
            words
                .next()
                .ok_or_else(|| fail("missing data path".into()))?,
        );
        let mut name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut color = None;
        let mut size = None;
        for opt in words {
            match opt.split_once('=') {
                Some(("color", v)) => color = Some(v.to_string()),
                Some(("size", v)) => {
                    size = Some(
                        v.parse::<f64>()
                            .ok()
                            .filter(|s| *s > 0.0)
                            .ok_or_else(|| fail(format!("bad size {v:?}")))?,
                    )
                }
                Some(("name", v)) => name = v.to_string(),
                _ => return Err(fail(format!("unknown option {opt:?}"))),
            }
        }
        let layer = match kind {
            LayerKind::Points => {
                let load = ingest::load_customers(&path, CustomerFormat::Auto)
                    .map_err(|e| fail(e.to_string()))?;
                let points = load
                    .rows
                    .into_iter()
                    .filter_map(|r| {
                        let label = (!r.name.is_empty()).then(|| r.name.clone());
                        r.locate(&HashGeocoder).ok().map(|p| (p, label))
                    })
                    .collect();
                RenderLayer::points(name, points)
            }
            LayerKind::Outline => {
                let rings = ingest::load_rings(&path).map_err(|e| fail(e.to_string()))?;
                RenderLayer::outlines(name, rings)
            }
        }
        .map_err(|e| fail(e.to_string()))?;
        let style = Style {
            color: color.unwrap_or_else(|| layer.style().color.clone()),
            marker_size: size.unwrap_or(layer.style().marker_size),
        };
        layers.push(layer.with_style(style));
    }
    Ok(layers)
}
