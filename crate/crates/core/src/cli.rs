//! Batch front end: `hull`, `exhaust` and `certify` subcommands over scenario files.
//!
//! Exit codes: 0 success, 1 error, 2 evidence (escape, construction failure or
//! inconsistency). Diagnostics go to stderr as lines prefixed `error:` or `evidence:`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::certify::{auto_path, build_exhaustion, cartan_thullen_report, render_text, Classification};
use crate::error::{Error, Result};
use crate::exhaustion::{polygon_exhaustion, Construction, ExhaustionPath};
use crate::families::{circle_samples, torus_samples, FunctionFamily, Point, Structure};
use crate::gelfand::embed;
use crate::grid::Grid;
use crate::hull::{compute_hull, HullMode, HullProblem, HullVerdict};
use crate::output::{atomic_write, band_color, coord_fields, coord_header, fmt_f64, grid_svg};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EVIDENCE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "genconvex", version, about = "Generalized convex hulls, exhaustions and certification on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hull of a sample set over query points.
    Hull {
        /// Scenario file, or builtin:NAME (disc, annulus, polydisc, two_disc, hartogs).
        scenario: String,
        /// Sample set: chain:I | circle:R:N | torus:R1:R2:N1:N2 | points:X,Y;X,Y | grid
        #[arg(long = "set", default_value = "chain:1")]
        set: String,
        /// Query points: grid | margin | points:X,Y;X,Y
        #[arg(long = "query", default_value = "grid")]
        query: String,
        /// cone | linear | C | modulus (default: chosen from the family and C)
        #[arg(long)]
        mode: Option<String>,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write the feature matrix of the sample set as features.csv.
        #[arg(long)]
        features: bool,
    },
    /// Exhaustion function and sublevel polygons.
    Exhaust {
        scenario: String,
        /// symmetric | cone | components (default: chosen from the scenario)
        #[arg(long)]
        path: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Full certification report.
    Certify {
        scenario: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            if code == EXIT_ERROR {
                for line in e.to_string().lines().filter(|l| !l.trim().is_empty()) {
                    let line = line.strip_prefix("error: ").unwrap_or(line);
                    eprintln!("error: {line}");
                }
            } else {
                print!("{e}");
            }
            return code;
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| run(cli.command)));
    match outcome {
        Ok(out) => {
            for line in &out.evidence {
                eprintln!("evidence: {line}");
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GENCONVEX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::invalid(format!("GENCONVEX_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Exit code and `evidence:` lines of a finished command.
pub struct Outcome {
    pub code: i32,
    pub evidence: Vec<String>,
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Hull { scenario, set, query, mode, c, out, features } => {
            let mode = mode.map(|m| m.parse()).transpose()?;
            cmd_hull(&Scenario::load(&scenario)?, &set, &query, mode, c, &out, features)
        }
        Command::Exhaust { scenario, path, out } => {
            let path = path.map(|p| p.parse()).transpose()?;
            cmd_exhaust(&Scenario::load(&scenario)?, path, &out)
        }
        Command::Certify { scenario, out } => cmd_certify(&Scenario::load(&scenario)?, &out),
    }
}

/// Parses a point list `X,Y;X,Y;...` in grid coordinates.
fn parse_points(spec: &str, grid: &Grid) -> Result<Vec<Point>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let coords: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad coordinate `{x}` in `{spec}`"))))
                .collect::<Result<_>>()?;
            Point::new(coords, grid.dim())
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::invalid(format!("bad {what} `{s}`")))
}

/// Sample set of a `--set` specification.
pub fn parse_set(spec: &str, scenario: &Scenario) -> Result<Vec<Point>> {
    let grid = &scenario.grid;
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["grid"] => Ok(grid.points().to_vec()),
        ["chain", i] => {
            let i: usize = parse_num(i, "chain index")?;
            if i == 0 || i > scenario.chain_len() {
                return Err(Error::invalid(format!("chain index {i} outside 1..={}", scenario.chain_len())));
            }
            Ok(scenario.union_set(i).into_iter().map(|j| grid.point(j).clone()).collect())
        }
        ["circle", r, n] => {
            if grid.dim().n_complex != 1 || grid.dim().n_real != 0 {
                return Err(Error::invalid("circle sets need a grid in one complex variable"));
            }
            let center = grid.center(0).z(0);
            Ok(circle_samples(center, parse_num(r, "radius")?, parse_num(n, "sample count")?))
        }
        ["torus", r1, r2, n1, n2] => {
            if grid.dim().n_complex != 2 || grid.dim().n_real != 0 {
                return Err(Error::invalid("torus sets need a grid in two complex variables"));
            }
            Ok(torus_samples(
                parse_num(r1, "radius")?,
                parse_num(r2, "radius")?,
                parse_num(n1, "sample count")?,
                parse_num(n2, "sample count")?,
            ))
        }
        ["points", list] => parse_points(list, grid),
        _ => Err(Error::invalid(format!(
            "unknown set `{spec}`; use chain:I, circle:R:N, torus:R1:R2:N1:N2, points:X,Y;... or grid"
        ))),
    }
}

/// Query points of a `--query` specification: grid indices, or explicit points.
enum Query {
    Grid(Vec<usize>),
    Points(Vec<Point>),
}

fn parse_query(spec: &str, grid: &Grid) -> Result<Query> {
    match spec.split_once(':') {
        None if spec == "grid" => Ok(Query::Grid((0..grid.len()).collect())),
        None if spec == "margin" => Ok(Query::Grid(grid.margin_indices())),
        Some(("points", list)) => Ok(Query::Points(parse_points(list, grid)?)),
        _ => Err(Error::invalid(format!("unknown query `{spec}`; use grid, margin or points:X,Y;..."))),
    }
}

/// Mode used when none is given: linear at C = 1, modulus for algebra families, C-mode
/// for spans and cone mode for cone samples.
pub fn default_mode(family: &FunctionFamily, c: f64) -> HullMode {
    match family.structure() {
        Structure::ConeSample => HullMode::Cone,
        _ if c == 1.0 => HullMode::Linear,
        Structure::AlgebraRealParts => HullMode::Modulus,
        Structure::LinearSpan => HullMode::C,
    }
}

#[derive(Serialize)]
struct CertificateEntry<'a> {
    index: usize,
    coords: &'a [f64],
    #[serde(flatten)]
    verdict: &'a HullVerdict,
}

#[derive(Serialize)]
struct CertificatesFile<'a> {
    scenario: &'a str,
    set: &'a str,
    query: &'a str,
    mode: HullMode,
    #[serde(rename = "C")]
    c: f64,
    sample_count: usize,
    members: usize,
    escape: bool,
    escaping: &'a [usize],
    points: Vec<CertificateEntry<'a>>,
}

pub fn cmd_hull(
    scenario: &Scenario,
    set: &str,
    query: &str,
    mode: Option<HullMode>,
    c: f64,
    out: &Path,
    features: bool,
) -> Result<Outcome> {
    let grid = &scenario.grid;
    let family = scenario.family();
    let mode = mode.unwrap_or_else(|| default_mode(family, c));
    let s = parse_set(set, scenario)?;
    let tol = scenario.options().tol;
    let q = parse_query(query, grid)?;
    let (indices, points, verdicts, escaping): (Vec<usize>, Vec<Point>, Vec<HullVerdict>, Vec<usize>) = match &q {
        Query::Grid(idx) if idx.len() == grid.len() => {
            let h = compute_hull(family, &s, grid, c, mode, tol)?;
            (idx.clone(), grid.points().to_vec(), h.verdicts, h.escaping)
        }
        Query::Grid(idx) => {
            let problem = HullProblem::new(family, &s, mode, c, tol)?;
            let v: Vec<HullVerdict> =
                idx.iter().map(|&i| problem.query(grid.point(i)).map_err(|e| Error::at_point(i, e))).collect::<Result<_>>()?;
            let esc = idx.iter().zip(&v).filter(|(&i, v)| v.member && grid.is_margin(i)).map(|(&i, _)| i).collect();
            (idx.clone(), idx.iter().map(|&i| grid.point(i).clone()).collect(), v, esc)
        }
        Query::Points(pts) => {
            let problem = HullProblem::new(family, &s, mode, c, tol)?;
            let v: Vec<HullVerdict> = pts.iter().map(|p| problem.query(p)).collect::<Result<_>>()?;
            ((0..pts.len()).collect(), pts.clone(), v, Vec::new())
        }
    };
    let on_grid = matches!(q, Query::Grid(_));

    let mut csv = String::new();
    let mut header = vec!["index".to_string()];
    header.extend(coord_header(grid));
    header.extend(["member", "margin", "gap"].map(String::from));
    let _ = writeln!(csv, "{}", header.join(","));
    for ((&i, p), v) in indices.iter().zip(&points).zip(&verdicts) {
        let mut row = vec![i.to_string()];
        row.extend(p.coords().iter().map(|&x| fmt_f64(x)));
        row.push(u8::from(v.member).to_string());
        row.push(u8::from(on_grid && grid.is_margin(i)).to_string());
        row.push(fmt_f64(v.gap));
        let _ = writeln!(csv, "{}", row.join(","));
    }
    atomic_write(&out.join("hull.csv"), &csv)?;

    let members = verdicts.iter().filter(|v| v.member).count();
    let certs = CertificatesFile {
        scenario: scenario.name(),
        set,
        query,
        mode,
        c,
        sample_count: s.len(),
        members,
        escape: !escaping.is_empty(),
        escaping: &escaping,
        points: indices
            .iter()
            .zip(&points)
            .zip(&verdicts)
            .map(|((&index, p), verdict)| CertificateEntry { index, coords: p.coords(), verdict })
            .collect(),
    };
    atomic_write(&out.join("certificates.json"), &(serde_json::to_string_pretty(&certs)? + "\n"))?;

    if on_grid && indices.len() == grid.len() {
        let title = format!("{}: hull of {set}, {mode} mode, C = {c}", scenario.name());
        let svg = grid_svg(grid, &title, |i| {
            if escaping.contains(&i) {
                Some("#d62728".into())
            } else if verdicts[i].member {
                Some("#1f77b4".into())
            } else {
                None
            }
        });
        if let Some(svg) = svg {
            atomic_write(&out.join("hull.svg"), &svg)?;
        }
    }
    if features {
        atomic_write(&out.join("features.csv"), &embed(family, &s)?.to_csv())?;
    }

    let mut evidence = Vec::new();
    for &i in &escaping {
        evidence.push(format!(
            "escape: margin point #{i} {:?} lies in the {mode} hull (C = {c}) of {set}",
            grid.point(i).coords()
        ));
    }
    let code = if escaping.is_empty() { EXIT_OK } else { EXIT_EVIDENCE };
    Ok(Outcome { code, evidence })
}

pub fn cmd_exhaust(scenario: &Scenario, path: Option<ExhaustionPath>, out: &Path) -> Result<Outcome> {
    let grid = &scenario.grid;
    let path = path.unwrap_or_else(|| auto_path(scenario));
    let n = scenario.chain_len();
    if n < 4 {
        return Err(Error::invalid(format!(
            "the {path:?} path needs a chain of at least 4 compacts, the scenario has {n}; add sets to the chain"
        )));
    }
    let construction = build_exhaustion(scenario, path)?;
    atomic_write(&out.join("exhaustion.json"), &(serde_json::to_string_pretty(&construction)? + "\n"))?;
    let p = match &construction {
        Construction::Built(p) => p,
        Construction::Failed(f) => {
            let mut evidence = vec![format!(
                "construction failed at level {}{}: {}",
                f.level,
                f.component.map_or(String::new(), |c| format!(" (component {c})")),
                f.reason
            )];
            for &j in f.points.iter().take(32) {
                evidence.push(format!("uncoverable point #{j} {:?}", grid.point(j).coords()));
            }
            if f.points.len() > 32 {
                evidence.push(format!("{} more uncoverable points in exhaustion.json", f.points.len() - 32));
            }
            return Ok(Outcome { code: EXIT_EVIDENCE, evidence });
        }
    };
    let values = p.eval_grid(grid)?;
    let mut csv = String::new();
    let mut header = vec!["index".to_string()];
    header.extend(coord_header(grid));
    header.extend(["component", "margin", "value"].map(String::from));
    let _ = writeln!(csv, "{}", header.join(","));
    for (j, &v) in values.iter().enumerate() {
        let mut row = vec![j.to_string()];
        row.extend(coord_fields(grid, j));
        row.push(grid.component(j).to_string());
        row.push(u8::from(grid.is_margin(j)).to_string());
        row.push(fmt_f64(v));
        let _ = writeln!(csv, "{}", row.join(","));
    }
    atomic_write(&out.join("values.csv"), &csv)?;
    let title = format!("{}: exhaustion ({path:?} path), bands at integer levels", scenario.name());
    if let Some(svg) = grid_svg(grid, &title, |j| Some(band_color(values[j]))) {
        atomic_write(&out.join("contours.svg"), &svg)?;
    }
    let polys = polygon_exhaustion(p, grid, scenario.options().polygon_count)?;
    atomic_write(&out.join("polygons.json"), &(serde_json::to_string_pretty(&polys)? + "\n"))?;
    let mut evidence = Vec::new();
    let failed: Vec<_> = p.level_reports.iter().filter(|r| !r.ok).collect();
    for r in &failed {
        evidence.push(format!("level {} misses its bounds", r.level));
    }
    Ok(Outcome { code: if failed.is_empty() { EXIT_OK } else { EXIT_EVIDENCE }, evidence })
}

pub fn cmd_certify(scenario: &Scenario, out: &Path) -> Result<Outcome> {
    let report = cartan_thullen_report(scenario)?;
    atomic_write(&out.join("report.json"), &report.to_json()?)?;
    atomic_write(&out.join("report.txt"), &render_text(&report))?;
    let mut evidence = Vec::new();
    if report.classification == Classification::Inconsistent {
        let v = report.verdicts();
        let names = ["hull_compactness", "exhaustion", "polygons", "witness"];
        let failed: Vec<&str> = names.iter().zip(v).filter(|(_, v)| v.failed()).map(|(n, _)| *n).collect();
        evidence.push(format!("inconsistent: stages {} did not pass", failed.join(", ")));
        if report.coherence.dual_failure {
            evidence.push("hull compactness and exhaustion fail together".into());
        }
        if let Some(e) = &report.stages.hull_compactness.detail.escape {
            evidence.push(format!("escape from K_{} at margin point #{} {:?}", e.set, e.point, e.coords));
        }
    }
    let code = match report.classification {
        Classification::Consistent => EXIT_OK,
        Classification::Inconsistent => EXIT_EVIDENCE,
    };
    Ok(Outcome { code, evidence })
}
