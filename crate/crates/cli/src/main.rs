//! `slitmap`: command-line front end.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 I/O error, 4 numerical
//! failure (non-convergence, blow-up, infeasible schedule, ...).

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use slitmap::conformal::{map_boundary, slit_geometry, BoundaryCircle, DEFAULT_SAMPLES};
use slitmap::loewner::{
    default_step, evolve_inner_slit, evolve_outer_slit, evolve_three_slit, format_number, key_monotonicity_experiment,
    write_trajectory_csv, DrivingFunction, MultiSlitSchedule, ThreeSlitInit, TrajectoryRow,
};
use slitmap::prime::{eval_prime, identity_residual, prime_identity_period, prime_identity_reflect};
use slitmap::squeezing::{conjectured_dgz, product_lower_bound, squeeze_annulus, ProductQuery, SqueezeQuery};
use slitmap::{AnnulusGeometry, TruncationControl};

#[derive(Debug, Parser)]
#[command(name = "slitmap", version, about = "Prime function, slit maps, Loewner flows and squeezing on annuli")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Truncation tolerance for all series.
    #[arg(long, global = true, env = "SLITMAP_TRUNC_TOL", default_value_t = 1e-12)]
    tol: f64,
    /// Hard cap on the number of series terms.
    #[arg(long, global = true, default_value_t = 256)]
    max_terms: usize,
    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate ω(z, y) or check one of its identities.
    Prime(PrimeArgs),
    /// Boundary images of the slit map, or its slit geometry.
    Map(MapArgs),
    /// Squeezing function of an annulus, sweeps, and product bounds.
    Squeeze(SqueezeArgs),
    /// Single- or three-slit Loewner evolution.
    Loewner(LoewnerArgs),
}

#[derive(Debug, Args)]
struct PrimeArgs {
    /// Inner radius r in (0, 1).
    #[arg(long)]
    r: f64,
    /// First argument, e.g. 0.8 or 0.3+0.4i.
    #[arg(long, value_parser = parse_complex)]
    z: Complex64,
    /// Second argument.
    #[arg(long, value_parser = parse_complex)]
    y: Complex64,
    /// Print the relative residual of an identity instead of the value.
    #[arg(long, value_enum)]
    check: Option<Identity>,
    /// Residual above which `--check` exits with code 4.
    #[arg(long, default_value_t = 1e-10)]
    check_tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Identity {
    /// conj ω(1/z̄, 1/ȳ) = −ω(z, y)/(zy)
    Reflect,
    /// ω(z/r², y) = −z ω(z, y)/(r² y)
    Period,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long)]
    r: f64,
    /// Point sent to 0, inside r < |y| < 1.
    #[arg(long, value_parser = parse_complex)]
    y: Complex64,
    /// Samples per boundary circle.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Print the slit geometry as JSON instead of boundary images.
    #[arg(long)]
    geometry: bool,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SqueezeArgs {
    #[arg(long)]
    r: Option<f64>,
    /// |z| in (r, 1).
    #[arg(long, conflicts_with = "sweep")]
    zmod: Option<f64>,
    /// Evaluate on N interior points of (r, 1).
    #[arg(long, value_name = "N")]
    sweep: Option<usize>,
    /// Add the conjectured formula and its difference to the sweep.
    #[arg(long, requires = "sweep")]
    compare_conjecture: bool,
    /// Lower bound for a product of domains with these squeezing values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r", "zmod", "sweep"])]
    product: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Outer,
    Inner,
    ThreeSlit,
}

#[derive(Debug, Args)]
struct LoewnerArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Driving angle: const:V, linear:START,RATE or file:PATH (CSV with columns t,beta).
    #[arg(long, default_value = "const:3.141592653589793")]
    beta: String,
    /// Initial marked point (inner and three-slit modes).
    #[arg(long)]
    y0: Option<f64>,
    /// Initial inner radius.
    #[arg(long)]
    r: f64,
    /// Run length; must stay below −ln r.
    #[arg(long = "T", alias = "horizon")]
    horizon: f64,
    /// Step size (default T/1000).
    #[arg(long)]
    dt: Option<f64>,
    /// Tracked point LABEL=VALUE, repeatable (outer and inner modes).
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<(String, Complex64)>,
    /// Choose the shrink split to keep the two shrinking tips symmetric.
    #[arg(long, conflicts_with = "lambda")]
    balanced: bool,
    /// Constant shrink split λ in [0, 1] for an unbalanced three-slit run.
    #[arg(long)]
    lambda: Option<f64>,
    /// Initial tips at π ± HALF_GAP.
    #[arg(long, default_value_t = PI / 2.0)]
    half_gap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Core(slitmap::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<slitmap::Error> for CliError {
    fn from(e: slitmap::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v: Complex64 = s.trim().parse().map_err(|_| format!("not a complex number: {s:?}"))?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_point(s: &str) -> Result<(String, Complex64), String> {
    let (label, value) = s.split_once('=').ok_or_else(|| format!("expected LABEL=VALUE, got {s:?}"))?;
    Ok((label.to_string(), parse_complex(value)?))
}

fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_number(z.re), sign, format_number(z.im.abs()))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_table(out: &mut dyn Write, format: Format, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row.iter().map(|&x| format_number(x)))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let objs: Vec<_> = rows
                .iter()
                .map(|row| header.iter().zip(row).map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>())
                .collect();
            write_json(out, &objs)?;
        }
    }
    Ok(())
}

fn truncation_json(trunc: &TruncationControl) -> serde_json::Value {
    json!({ "max_terms": trunc.max_terms, "tol": trunc.tol })
}

fn cmd_prime(a: &PrimeArgs, trunc: &TruncationControl) -> CliResult<()> {
    let geom = AnnulusGeometry::from_radius(a.r)?;
    let mut out = io::stdout().lock();
    match a.check {
        None => writeln!(out, "{}", format_complex(eval_prime(a.z, a.y, &geom, trunc)?))?,
        Some(id) => {
            let sides = match id {
                Identity::Reflect => prime_identity_reflect(a.z, a.y, &geom, trunc)?,
                Identity::Period => prime_identity_period(a.z, a.y, &geom, trunc)?,
            };
            let res = identity_residual(sides);
            writeln!(out, "{}", format_number(res))?;
            if !(res < a.check_tol) {
                return Err(CliError::Core(slitmap::Error::TruncationTooCoarse {
                    what: "identity residual".into(),
                    deviation: res,
                    limit: a.check_tol,
                }));
            }
        }
    }
    Ok(())
}

fn cmd_map(a: &MapArgs, format: Format, trunc: &TruncationControl) -> CliResult<()> {
    let geom = AnnulusGeometry::from_radius(a.r)?;
    if a.geometry {
        let s = slit_geometry(a.y, &geom, trunc, a.samples)?;
        let summary = json!({
            "r": a.r,
            "y": [a.y.re, a.y.im],
            "slit_radius": s.slit_radius,
            "arc_start": s.arc_start,
            "arc_end": s.arc_end,
            "arc_span": s.arc_span(),
            "preimage_start": s.preimage_start,
            "preimage_end": s.preimage_end,
            "preimage_sum": s.preimage_start + s.preimage_end,
            "samples": a.samples,
            "truncation": truncation_json(trunc),
        });
        let mut out = output(a.out.as_deref())?;
        write_json(&mut *out, &summary)?;
        out.flush()?;
        return Ok(());
    }
    let mut rows = Vec::with_capacity(2 * a.samples);
    for circle in [BoundaryCircle::Inner, BoundaryCircle::Outer] {
        let b = map_boundary(circle, a.y, &geom, trunc, a.samples)?;
        let code = match circle {
            BoundaryCircle::Inner => 0.0,
            BoundaryCircle::Outer => 1.0,
        };
        rows.extend(b.samples.iter().map(|&(theta, w)| vec![code, theta, w.re, w.im, w.norm()]));
    }
    let mut out = output(a.out.as_deref())?;
    write_boundary(&mut *out, format, &rows)?;
    out.flush()?;
    Ok(())
}

/// Like [`write_table`], with the circle column written as `inner`/`outer`.
fn write_boundary(out: &mut dyn Write, format: Format, rows: &[Vec<f64>]) -> CliResult<()> {
    let name = |code: f64| if code == 0.0 { "inner" } else { "outer" };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["circle", "theta", "re", "im", "modulus"])?;
            for row in rows {
                let mut rec = vec![name(row[0]).to_string()];
                rec.extend(row[1..].iter().map(|&x| format_number(x)));
                w.write_record(rec)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let objs: Vec<_> = rows
                .iter()
                .map(|row| json!({ "circle": name(row[0]), "theta": row[1], "re": row[2], "im": row[3], "modulus": row[4] }))
                .collect();
            write_json(out, &objs)?;
        }
    }
    Ok(())
}

fn cmd_squeeze(a: &SqueezeArgs, format: Format) -> CliResult<()> {
    if let Some(values) = &a.product {
        let b = product_lower_bound(&ProductQuery::new(values.clone())?);
        let mut out = output(a.out.as_deref())?;
        writeln!(out, "{b}")?;
        out.flush()?;
        return Ok(());
    }
    let r = a.r.ok_or_else(|| CliError::Usage("--r is required unless --product is given".into()))?;
    if let Some(m) = a.zmod {
        let q = SqueezeQuery::new(r, m)?;
        let mut out = output(a.out.as_deref())?;
        writeln!(out, "{}", squeeze_annulus(&q))?;
        out.flush()?;
        return Ok(());
    }
    let n = a.sweep.ok_or_else(|| CliError::Usage("give one of --zmod, --sweep or --product".into()))?;
    if n == 0 {
        return Err(CliError::Usage("--sweep needs at least one point".into()));
    }
    let mut rows = Vec::with_capacity(n);
    let mut outside = 0;
    for k in 1..=n {
        let m = r + (1.0 - r) * k as f64 / (n + 1) as f64;
        let q = SqueezeQuery::new(r, m)?;
        let s = squeeze_annulus(&q);
        if a.compare_conjecture {
            let c = conjectured_dgz(&q);
            outside += usize::from(!c.in_stated_range);
            rows.push(vec![m, s, c.value, s - c.value]);
        } else {
            rows.push(vec![m, s]);
        }
    }
    if outside > 0 {
        eprintln!("warning: {outside} of {n} sweep points have |z| < √r, outside the conjecture's stated range");
    }
    let header: &[&str] = if a.compare_conjecture { &["zmod", "theorem", "conjecture", "diff"] } else { &["zmod", "theorem"] };
    let mut out = output(a.out.as_deref())?;
    write_table(&mut *out, format, header, &rows)?;
    out.flush()?;
    Ok(())
}

fn parse_driving(spec: &str, horizon: f64) -> CliResult<DrivingFunction> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("driving {spec:?} must look like const:V, linear:A,B or file:PATH")))?;
    let num = |s: &str| -> CliResult<f64> {
        s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("malformed number {s:?} in --beta")))
    };
    Ok(match kind {
        "const" => DrivingFunction::constant(num(rest)?, horizon)?,
        "linear" => {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| CliError::Usage("linear driving needs START,RATE".into()))?;
            DrivingFunction::linear(num(a)?, num(b)?, horizon)?
        }
        "file" => {
            let file = File::open(rest).map_err(|e| CliError::Io(format!("{rest}: {e}")))?;
            let mut rd = csv::Reader::from_reader(file);
            let headers = rd.headers()?.clone();
            if headers.iter().ne(["t", "beta"]) {
                return Err(CliError::Usage(format!("{rest}: expected header t,beta, got {headers:?}")));
            }
            let (mut times, mut values) = (Vec::new(), Vec::new());
            for rec in rd.records() {
                let rec = rec?;
                times.push(num(&rec[0])?);
                values.push(num(&rec[1])?);
            }
            DrivingFunction::sampled(times, values)?.with_horizon(horizon)?
        }
        other => return Err(CliError::Usage(format!("unknown driving kind {other:?}"))),
    })
}

fn cmd_loewner(a: &LoewnerArgs, format: Format, trunc: &TruncationControl) -> CliResult<()> {
    let geom = AnnulusGeometry::from_radius(a.r)?;
    let beta = parse_driving(&a.beta, a.horizon)?;
    let dt = a.dt.unwrap_or_else(|| default_step(a.horizon));
    let need_y0 = || a.y0.ok_or_else(|| CliError::Usage(format!("--y0 is required in {:?} mode", a.mode)));
    let points: Vec<(String, Complex64)> = a.points.clone();
    if a.mode == Mode::ThreeSlit && !points.is_empty() {
        return Err(CliError::Usage("tracked points are not supported in three-slit mode".into()));
    }
    if a.mode != Mode::ThreeSlit && (a.balanced || a.lambda.is_some()) {
        return Err(CliError::Usage("--balanced and --lambda only apply to three-slit mode".into()));
    }

    let (rows, summary): (Vec<TrajectoryRow>, serde_json::Value) = match a.mode {
        Mode::Outer | Mode::Inner => {
            let tr = if a.mode == Mode::Outer {
                evolve_outer_slit(&beta, &points, &geom, dt, trunc)?
            } else {
                evolve_inner_slit(&beta, need_y0()?, &points, &geom, dt, trunc)?
            };
            let last = tr.final_state();
            let summary = json!({
                "mode": if a.mode == Mode::Outer { "outer" } else { "inner" },
                "T": a.horizon,
                "dt": tr.dt,
                "steps": tr.states.len() - 1,
                "r_T": last.r_t,
                "y_T": last.y_t,
                "im_log_y_T": last.im_log_y,
                "tracked_points": last.tracked_points.iter().map(|(l, z)| json!({ "label": l, "re": z.re, "im": z.im })).collect::<Vec<_>>(),
                "absorptions": tr.absorptions.iter().map(|ab| json!({ "label": ab.label, "step": ab.step, "t": ab.t })).collect::<Vec<_>>(),
                "truncation": truncation_json(trunc),
            });
            ((&tr).into(), summary)
        }
        Mode::ThreeSlit => {
            let y0 = need_y0()?;
            let init = ThreeSlitInit::symmetric(beta, a.half_gap);
            let (tr, min_rate) = if a.balanced {
                let k = key_monotonicity_experiment(&init, y0, &geom, a.horizon, dt, trunc)?;
                let min = k.trajectory.states.iter().filter_map(|s| s.dlogy_ds).fold(f64::INFINITY, f64::min);
                (k.trajectory, min)
            } else {
                let schedule = MultiSlitSchedule::constant(a.horizon, dt, a.lambda.unwrap_or(0.5))?;
                let tr = evolve_three_slit(&schedule, &init, y0, &geom, dt, trunc)?;
                let min = tr.states.iter().filter_map(|s| s.dlogy_ds).fold(f64::INFINITY, f64::min);
                (tr, min)
            };
            let last = tr.final_state();
            let summary = json!({
                "mode": "three-slit",
                "balanced": a.balanced,
                "T": a.horizon,
                "ds": tr.ds,
                "steps": tr.states.len() - 1,
                "r_T": last.r_t,
                "y_T": last.y_tau,
                "max_defect": tr.max_defect(),
                "min_dlogy_ds": if min_rate.is_finite() { Some(min_rate) } else { None },
                "truncation": truncation_json(trunc),
            });
            ((&tr).into(), summary)
        }
    };

    match &a.out {
        Some(path) => {
            let mut out = output(Some(path))?;
            match format {
                Format::Csv => write_trajectory_csv(&mut out, &rows)?,
                Format::Json => write_json(&mut *out, &rows)?,
            }
            out.flush()?;
            write_json(&mut io::stdout().lock(), &summary)?;
        }
        None => {
            let mut out = output(None)?;
            match format {
                Format::Csv => write_trajectory_csv(&mut out, &rows)?,
                Format::Json => write_json(&mut *out, &rows)?,
            }
            out.flush()?;
            write_json(&mut io::stderr().lock(), &summary)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let trunc = TruncationControl::new(cli.common.max_terms, cli.common.tol)?;
    match &cli.command {
        Command::Prime(a) => cmd_prime(a, &trunc),
        Command::Map(a) => cmd_map(a, cli.common.format, &trunc),
        Command::Squeeze(a) => cmd_squeeze(a, cli.common.format),
        Command::Loewner(a) => cmd_loewner(a, cli.common.format, &trunc),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slitmap: {e}");
            ExitCode::from(e.code())
        }
    }
}
