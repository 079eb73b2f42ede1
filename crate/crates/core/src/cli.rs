//! Command-line interface. [`run`] takes the argument list and output
//! streams and returns the process exit code: 0 on success, 1 when a
//! computation or verification fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::fields::{hopf_ranada, BatemanField};
use crate::frames::FrameSide;
use crate::io;
use crate::sampling::SampleBox;
use crate::topology::{self, GridSpec, LineKind, TraceConfig};
use crate::verify::{self, BatteryConfig, Check};

pub const INVARIANTS_SCHEMA: &str = "knotlight.invariants/1";

#[derive(Debug, Parser)]
#[command(
    name = "knotlight",
    version,
    about = "Null electromagnetic fields from Bateman pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the Bateman identities on quasi-random events and print a JSON report.
    Verify(VerifyArgs),
    /// Trace field lines at a fixed time and write them as CSV or VTK.
    Trace(TraceArgs),
    /// Hopf invariants, linking numbers and helicity as JSON.
    Invariants(InvariantsArgs),
    /// Sample E, B and the Poynting vector on a grid into a VTK file.
    Grid(GridArgs),
    /// Write stereographically projected Hopf circles.
    Fibration(FibrationArgs),
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Built-in field.
    #[arg(long, value_enum, conflicts_with_all = ["alpha", "beta"])]
    field: Option<Builtin>,
    /// Expression for alpha(t, x, y, z).
    #[arg(long, requires = "beta", allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Expression for beta(t, x, y, z).
    #[arg(long, requires = "alpha", allow_hyphen_values = true)]
    beta: Option<String>,
    /// Declare |alpha|^2 + |beta|^2 = 1 for an expression pair.
    #[arg(long, requires = "alpha")]
    normalized: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    HopfRanada,
}

impl FieldArgs {
    fn build(&self) -> Result<BatemanField, Error> {
        match (&self.field, &self.alpha, &self.beta) {
            (_, Some(a), Some(b)) => BatemanField::from_expressions(a, b, self.normalized),
            (Some(Builtin::HopfRanada), _, _) | (None, None, None) => Ok(hopf_ranada()),
            _ => Err(Error::Config("--alpha and --beta must be given together".into())),
        }
    }
}

#[derive(Debug, Args)]
struct BoxArgs {
    /// Interval `a,b` used on every axis.
    #[arg(long = "box", value_parser = parse_pair, allow_hyphen_values = true)]
    interval: Option<(f64, f64)>,
    /// Interval for t, overriding --box.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    box_t: Option<(f64, f64)>,
    /// Interval for x, overriding --box.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    box_x: Option<(f64, f64)>,
    /// Interval for y, overriding --box.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    box_y: Option<(f64, f64)>,
    /// Interval for z, overriding --box.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    box_z: Option<(f64, f64)>,
}

impl BoxArgs {
    /// Per-axis intervals `(t, x, y, z)`.
    fn intervals(&self, default: (f64, f64)) -> [(f64, f64); 4] {
        let base = self.interval.unwrap_or(default);
        [self.box_t, self.box_x, self.box_y, self.box_z].map(|o| o.unwrap_or(base))
    }

    fn sample_box(&self, default: (f64, f64)) -> Result<SampleBox, Error> {
        let iv = self.intervals(default);
        SampleBox::new(iv.map(|p| p.0), iv.map(|p| p.1))
    }

    fn grid(&self, default: (f64, f64), n: usize) -> Result<GridSpec, Error> {
        let iv = self.intervals(default);
        GridSpec::new([iv[1].0, iv[2].0, iv[3].0], [iv[1].1, iv[2].1, iv[3].1], [n; 3])
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    sample_box: BoxArgs,
    /// Number of accepted sample events.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replace a tolerance, as `check=value`. Repeatable.
    #[arg(long = "tol-override")]
    tol_override: Vec<String>,
    /// Run only these checks. Repeatable.
    #[arg(long = "check")]
    checks: Vec<String>,
}

#[derive(Debug, Args)]
struct TracerArgs {
    #[arg(long, default_value_t = TraceConfig::default().initial_step)]
    initial_step: f64,
    /// Local error tolerance of the integrator.
    #[arg(long, default_value_t = TraceConfig::default().tolerance)]
    tolerance: f64,
    #[arg(long, default_value_t = TraceConfig::default().max_step)]
    max_step: f64,
    #[arg(long, default_value_t = TraceConfig::default().max_arclength)]
    max_arclength: f64,
    #[arg(long, default_value_t = TraceConfig::default().closure_tolerance)]
    closure_tolerance: f64,
    #[arg(long, default_value_t = TraceConfig::default().min_arclength)]
    min_arclength: f64,
}

impl TracerArgs {
    fn config(&self) -> Result<TraceConfig, Error> {
        let cfg = TraceConfig {
            initial_step: self.initial_step,
            tolerance: self.tolerance,
            max_step: self.max_step,
            max_arclength: self.max_arclength,
            closure_tolerance: self.closure_tolerance,
            min_arclength: self.min_arclength,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Line {
    Magnetic,
    Electric,
    Poynting,
}

impl From<Line> for LineKind {
    fn from(l: Line) -> Self {
        match l {
            Line::Magnetic => LineKind::Magnetic,
            Line::Electric => LineKind::Electric,
            Line::Poynting => LineKind::Poynting,
        }
    }
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value = "magnetic")]
    line: Line,
    /// Starting point `x,y,z`. Repeatable.
    #[arg(long = "seed", value_parser = parse_point, allow_hyphen_values = true, required = true)]
    seeds: Vec<[f64; 3]>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Output file ending in .csv or .vtk.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    tracer: TracerArgs,
}

#[derive(Debug, Args)]
struct InvariantsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Hopf invariant of the map l_i, i in 1..=3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    hopf: Option<u8>,
    /// Monte Carlo samples for --hopf.
    #[arg(long, default_value_t = 10_000)]
    hopf_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Linking number of the field lines through two points `x,y,z`.
    #[arg(long, num_args = 2, value_names = ["SEED_A", "SEED_B"], value_parser = parse_point, allow_hyphen_values = true)]
    link: Option<Vec<[f64; 3]>>,
    #[arg(long, value_enum, default_value = "magnetic")]
    line: Line,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Magnetic and electric helicity on the grid given by --grid and --box.
    #[arg(long)]
    helicity: bool,
    /// Grid resolution per axis for --helicity.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[command(flatten)]
    sample_box: BoxArgs,
    #[command(flatten)]
    tracer: TracerArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Points per axis.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    #[command(flatten)]
    sample_box: BoxArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    /// Output file ending in .vtk.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Args)]
struct FibrationArgs {
    /// Invariant field index: 1, 2, 3 or all.
    #[arg(long, value_parser = parse_axis, default_value = "3")]
    axis: Axes,
    /// Circles per axis.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, value_enum, default_value = "left")]
    side: Side,
    /// Integration steps per circle.
    #[arg(long, default_value_t = 400)]
    steps: usize,
    /// Output file ending in .csv or .vtk.
    #[arg(long)]
    out: PathBuf,
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| match p.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{p}` is not a finite number")),
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_numbers(s, 2)?;
    if v[0] >= v[1] {
        return Err(format!("interval `{s}` must have a < b"));
    }
    Ok((v[0], v[1]))
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v = parse_numbers(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

#[derive(Clone, Debug, PartialEq)]
struct Axes(Vec<usize>);

fn parse_axis(s: &str) -> Result<Axes, String> {
    match s {
        "1" => Ok(Axes(vec![1])),
        "2" => Ok(Axes(vec![2])),
        "3" => Ok(Axes(vec![3])),
        "all" => Ok(Axes(vec![1, 2, 3])),
        _ => Err(format!("axis must be 1, 2, 3 or all, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Config(_) | Error::UnknownCheck(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                return 0;
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return 2;
    }
    let result = match cli.command {
        Command::Verify(a) => verify_cmd(a, out),
        Command::Trace(a) => trace_cmd(a, out, err),
        Command::Invariants(a) => invariants_cmd(a, out),
        Command::Grid(a) => grid_cmd(a, out),
        Command::Fibration(a) => fibration_cmd(a, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// Caps the worker pool at `KNOT_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("KNOT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("KNOT_THREADS must be a positive integer, got `{v}`"))?;
    // A pool built earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Domain(e.to_string())
}

fn verify_cmd(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let field = a.field.build()?;
    let mut cfg = BatteryConfig {
        sample_box: a.sample_box.sample_box((-2.0, 2.0))?,
        samples: a.samples,
        seed: a.seed,
        ..Default::default()
    };
    for o in &a.tol_override {
        cfg.tolerances.apply_override(o)?;
    }
    if !a.checks.is_empty() {
        let list: Result<Vec<Check>, Error> = a.checks.iter().map(|c| c.parse()).collect();
        cfg.checks = Some(list?);
    }
    let report = verify::run_battery(&field, &cfg)?;
    writeln!(out, "{}", report.to_json()?).map_err(io_err)?;
    Ok(report.pass)
}

fn fmt_point(p: &[f64; 3]) -> String {
    format!("{},{},{}", p[0], p[1], p[2])
}

fn trace_cmd(a: TraceArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let field = a.field.build()?;
    let cfg = a.tracer.config()?;
    let kind: LineKind = a.line.into();
    let format = io::extension(&a.out);
    if !matches!(format.as_deref(), Some("csv" | "vtk")) {
        return Err(Failure::Usage(format!(
            "output `{}` must end in .csv or .vtk",
            a.out.display()
        )));
    }
    let t = a.t;
    let dir = |x: &[f64; 3]| topology::field_vector(&field, kind, t, x);
    let results = topology::trace_lines(&dir, &a.seeds, &cfg);
    let which = kind.psi_index();
    let mut ok = true;
    let mut written = Vec::new();
    for (k, (seed, r)) in a.seeds.iter().zip(results).enumerate() {
        match r {
            Ok(c) => {
                let dev = topology::psi_constancy(&field, t, &c, which)?;
                writeln!(
                    out,
                    "curve {k} seed={} closed={} points={} length={:.6} closure_gap={:.3e} psi{which}_deviation={:.3e}",
                    fmt_point(seed),
                    c.closed,
                    c.points.len(),
                    c.length(),
                    c.closure_gap,
                    dev
                )
                .map_err(io_err)?;
                written.push((k, c));
            }
            Err(e) => {
                ok = false;
                writeln!(err, "seed {}: {e}", fmt_point(seed)).map_err(io_err)?;
            }
        }
    }
    let title = format!("{} {} lines at t = {t}", field.name, kind.name());
    if format.as_deref() == Some("vtk") {
        let curves: Vec<_> = written.into_iter().map(|(_, c)| c).collect();
        if !curves.is_empty() {
            io::write_curves(&a.out, &curves, &title)?;
            writeln!(out, "wrote {}", a.out.display()).map_err(io_err)?;
        }
    } else {
        let paths = io::numbered_paths(&a.out, a.seeds.len());
        for (k, c) in written {
            io::write_atomic(&paths[k], &io::curve_csv(&c)?)?;
            writeln!(out, "wrote {}", paths[k].display()).map_err(io_err)?;
        }
    }
    Ok(ok)
}

fn invariants_cmd(a: InvariantsArgs, out: &mut dyn Write) -> Outcome {
    if a.hopf.is_none() && a.link.is_none() && !a.helicity {
        return Err(Failure::Usage(
            "choose at least one of --hopf, --link, --helicity".into(),
        ));
    }
    let mut report = serde_json::Map::new();
    report.insert("schema".into(), json!(INVARIANTS_SCHEMA));
    if let Some(i) = a.hopf {
        let h = topology::hopf_invariant(i as usize, a.hopf_samples, a.seed)?;
        report.insert(
            "hopf_invariant".into(),
            json!({
                "index": i,
                "value": h.value,
                "uncertainty": h.standard_error,
                "samples": h.samples,
                "seed": a.seed,
            }),
        );
    }
    let needs_field = a.link.is_some() || a.helicity;
    let field = if needs_field { Some(a.field.build()?) } else { None };
    if let (Some(seeds), Some(field)) = (&a.link, &field) {
        let cfg = a.tracer.config()?;
        let kind: LineKind = a.line.into();
        report.insert("field".into(), json!(field.name));
        let mut curves = Vec::new();
        for s in seeds {
            let c = topology::trace_field_line(field, kind, a.t, *s, &cfg)?;
            if !c.closed {
                return Err(Failure::Domain(format!(
                    "{} line through {} did not close within arclength {}",
                    kind.name(),
                    fmt_point(s),
                    cfg.max_arclength
                )));
            }
            curves.push(c);
        }
        let l = topology::gauss_linking(&curves[0], &curves[1])?;
        report.insert(
            "linking".into(),
            json!({
                "line": kind.name(),
                "t": a.t,
                "seeds": seeds,
                "value": l.value,
                "uncertainty": (l.value - l.value.round()).abs(),
                "min_distance": l.min_distance,
                "max_segment": l.max_segment,
                "closure_gaps": [curves[0].closure_gap, curves[1].closure_gap],
                "warning": l.warning,
            }),
        );
    }
    if let (true, Some(field)) = (a.helicity, &field) {
        let fine = a.sample_box.grid((-6.0, 6.0), a.grid)?;
        let coarse_n = (a.grid * 3 / 4).max(2);
        let coarse = GridSpec::new(fine.lo, fine.hi, [coarse_n; 3])?;
        let hf = topology::helicity(field, a.t, &fine)?;
        let hc = topology::helicity(field, a.t, &coarse)?;
        report.insert("field".into(), json!(field.name));
        report.insert(
            "helicity".into(),
            json!({
                "t": a.t,
                "box_lo": fine.lo,
                "box_hi": fine.hi,
                "grid": a.grid,
                "coarse_grid": coarse_n,
                "magnetic": hf.magnetic,
                "electric": hf.electric,
                "magnetic_refinement_delta": (hf.magnetic - hc.magnetic).abs(),
                "electric_refinement_delta": (hf.electric - hc.electric).abs(),
            }),
        );
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(report)).map_err(Error::from)?;
    writeln!(out, "{text}").map_err(io_err)?;
    Ok(true)
}

fn grid_cmd(a: GridArgs, out: &mut dyn Write) -> Outcome {
    let field = a.field.build()?;
    let grid = a.sample_box.grid((-3.0, 3.0), a.grid)?;
    if io::extension(&a.out).as_deref() != Some("vtk") {
        return Err(Failure::Usage(format!(
            "grid output `{}` must end in .vtk",
            a.out.display()
        )));
    }
    io::write_grid(&a.out, &field, a.t, &grid)?;
    writeln!(out, "wrote {} ({} points)", a.out.display(), grid.len()).map_err(io_err)?;
    Ok(true)
}

fn fibration_cmd(a: FibrationArgs, out: &mut dyn Write) -> Outcome {
    let axes = a.axis.0;
    let side = match a.side {
        Side::Left => FrameSide::Left,
        Side::Right => FrameSide::Right,
    };
    if !matches!(io::extension(&a.out).as_deref(), Some("csv" | "vtk")) {
        return Err(Failure::Usage(format!(
            "output `{}` must end in .csv or .vtk",
            a.out.display()
        )));
    }
    let hc = topology::fibration(side, &axes, a.count, a.steps)?;
    let p = hc.pole;
    writeln!(out, "projection pole {},{},{},{}", p[0], p[1], p[2], p[3]).map_err(io_err)?;
    for (k, c) in hc.curves.iter().enumerate() {
        writeln!(
            out,
            "curve {k} axis={} closed={} length={:.6} closure_gap={:.3e}",
            axes[k / a.count],
            c.closed,
            c.length(),
            c.closure_gap
        )
        .map_err(io_err)?;
    }
    let title = format!("Hopf circles of {:?}-invariant fields {axes:?}", side);
    for path in io::write_curves(&a.out, &hc.curves, &title)? {
        writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
    }
    Ok(true)
}
