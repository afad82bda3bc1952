//! `ellipsoid-spectra`: spectra, eigencurves, perturbation derivatives,
//! coordinate charts and self-checks as CSV or JSON.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellipsoid_spectra::eigencurves::{Backend, CurveFamily, EigencurveId, Eigencurves};
use ellipsoid_spectra::spectrum::{enumerate_with, intersect_with, SpectrumEntry};
use ellipsoid_spectra::sphere_perturbation::{
    closed_form_derivative, perturbation_derivative_fd, perturbation_derivative_quadrature,
};
use ellipsoid_spectra::verify::{self, Level};
use ellipsoid_spectra::{Ellipsoid, Error, Parity, DEFAULT_TRUNCATION};
use rayon::prelude::*;
use serde_json::json;

use output::{Cell, Table};

const THREADS_VAR: &str = "ELLIPSOID_SPECTRA_THREADS";
/// Largest tolerated gap between the Galerkin and Prüfer answers.
const CROSS_CHECK_TOLERANCE: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "ellipsoid-spectra", version, about = "Laplace-Beltrami spectra of triaxial ellipsoids")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues up to a limit, ascending.
    Spectrum(SpectrumArgs),
    /// One eigencurve H_m or h_n sampled on a uniform lambda grid.
    Eigencurve(EigencurveArgs),
    /// Derivative of an eigenvalue along the near-sphere family.
    Perturb(PerturbArgs),
    /// Run the built-in acceptance checks.
    Verify(VerifyArgs),
    /// Surface points (x, y, z) on a grid of the (s, t) chart.
    Chart(ChartArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Galerkin,
    Prufer,
    Both,
}

impl BackendChoice {
    fn name(self) -> &'static str {
        match self {
            BackendChoice::Galerkin => "galerkin",
            BackendChoice::Prufer => "prufer",
            BackendChoice::Both => "both",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LevelChoice {
    Quick,
    Full,
}

#[derive(Args, Debug)]
struct Axes {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
}

impl Axes {
    fn ellipsoid(&self) -> Result<Ellipsoid, CliError> {
        Ok(Ellipsoid::new(self.a, self.b, self.c)?)
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    axes: Axes,
    #[arg(long, default_value_t = 10.0)]
    lambda_max: f64,
    /// `all` or three bits such as `010`.
    #[arg(long, default_value = "all")]
    parity: String,
    /// Galerkin truncation order N.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, value_enum, default_value_t = BackendChoice::Both)]
    backend: BackendChoice,
}

#[derive(Args, Debug)]
struct EigencurveArgs {
    #[command(flatten)]
    axes: Axes,
    #[arg(long, default_value = "000")]
    parity: String,
    /// `H` (s-equation) or `h` (t-equation).
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda_min: f64,
    #[arg(long)]
    lambda_max: f64,
    #[arg(long, default_value_t = 61)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, value_enum, default_value_t = BackendChoice::Both)]
    backend: BackendChoice,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[arg(long)]
    k2: f64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "000")]
    parity: String,
    #[arg(long, default_value_t = 1e-3)]
    eps_step: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelChoice::Quick)]
    level: LevelChoice,
}

#[derive(Args, Debug)]
struct ChartArgs {
    #[command(flatten)]
    axes: Axes,
    /// Points across s in [-K', K'].
    #[arg(long, default_value_t = 17)]
    s_samples: usize,
    /// Points across t in (-2K, 2K].
    #[arg(long, default_value_t = 64)]
    t_samples: usize,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidArgument(msg) => CliError::Usage(msg),
            Error::EigenvalueIndex { .. } => CliError::Usage(err.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

fn parse_parity(text: &str) -> Result<Parity, CliError> {
    Ok(text.parse::<Parity>()?)
}

fn parities(filter: &str) -> Result<Vec<Parity>, CliError> {
    if filter == "all" {
        Ok(Parity::all().to_vec())
    } else {
        Ok(vec![parse_parity(filter)?])
    }
}

fn spectrum_row(e: &SpectrumEntry) -> Vec<Cell> {
    vec![
        e.m.into(),
        e.n.into(),
        e.parity.to_string().into(),
        e.lambda.into(),
        e.h.into(),
        e.sphere_label().into(),
        e.residual_galerkin.into(),
        e.residual_prufer.into(),
        e.zero_counts.0.into(),
        e.zero_counts.1.into(),
    ]
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<Table, CliError> {
    let e = args.axes.ellipsoid()?;
    let selected = parities(&args.parity)?;
    if !(args.lambda_max >= 0.0) {
        return Err(CliError::Usage(format!("--lambda-max must be non-negative, got {}", args.lambda_max)));
    }
    let curves = Eigencurves::new(e, args.truncation)?;
    let locator = if args.backend == BackendChoice::Prufer { Backend::Prufer } else { Backend::Galerkin };
    // A zero limit is an empty range, not a request for the ground state.
    let entries = if args.lambda_max == 0.0 {
        Vec::new()
    } else {
        enumerate_with(&curves, &selected, args.lambda_max, locator)?
    };
    if args.backend == BackendChoice::Both {
        // Locate every root a second time by shooting alone.
        entries.par_iter().try_for_each(|entry| -> Result<(), Error> {
            let shot = intersect_with(&curves, entry.m, entry.n, entry.parity, Backend::Prufer)?;
            if (shot.lambda - entry.lambda).abs() > CROSS_CHECK_TOLERANCE * entry.lambda.max(1.0) {
                return Err(Error::BackendDisagreement {
                    lambda: entry.lambda,
                    galerkin: entry.lambda,
                    prufer: shot.lambda,
                });
            }
            Ok(())
        })?;
    }
    let mut table = Table::new(
        "spectrum",
        vec!["m", "n", "parity", "lambda", "h", "l_label", "residual_galerkin", "residual_prufer", "zeros_s", "zeros_t"],
    )
    .parameter("a", args.axes.a)
    .parameter("b", args.axes.b)
    .parameter("c", args.axes.c)
    .parameter("lambda_max", args.lambda_max)
    .parameter("parity", args.parity.as_str())
    .parameter("truncation", args.truncation)
    .parameter("backend", args.backend.name());
    for entry in &entries {
        table.push(spectrum_row(entry));
    }
    Ok(table)
}

fn lambda_grid(min: f64, max: f64, samples: usize) -> Vec<f64> {
    let step = (max - min) / (samples - 1) as f64;
    (0..samples).map(|i| if i + 1 == samples { max } else { min + i as f64 * step }).collect()
}

fn cmd_eigencurve(args: &EigencurveArgs) -> Result<Table, CliError> {
    if args.samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    if !(args.lambda_min >= 0.0 && args.lambda_max > args.lambda_min) {
        return Err(CliError::Usage(format!(
            "need 0 <= --lambda-min < --lambda-max, got [{}, {}]",
            args.lambda_min, args.lambda_max
        )));
    }
    let e = args.axes.ellipsoid()?;
    let family: CurveFamily = args.family.parse()?;
    let id = EigencurveId::new(family, args.index, parse_parity(&args.parity)?);
    let curves = Eigencurves::new(e, args.truncation)?;
    let grid = lambda_grid(args.lambda_min, args.lambda_max, args.samples);
    let samples: Vec<Vec<(f64, f64, Backend, f64)>> = grid
        .par_iter()
        .map(|&lambda| -> Result<_, Error> {
            let mut out = Vec::new();
            let galerkin = match args.backend {
                BackendChoice::Prufer => None,
                _ => Some(curves.evaluate(&id, lambda, Backend::Galerkin)?),
            };
            if let Some(s) = galerkin {
                out.push((s.lambda, s.value, s.backend, s.residual));
            }
            if args.backend != BackendChoice::Galerkin {
                let s = curves.prufer_sample(&id, lambda, galerkin.map(|g| g.value))?;
                if let Some(g) = galerkin {
                    if (g.value - s.value).abs() > CROSS_CHECK_TOLERANCE {
                        return Err(Error::BackendDisagreement { lambda, galerkin: g.value, prufer: s.value });
                    }
                }
                out.push((s.lambda, s.value, s.backend, s.residual));
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new("eigencurve", vec!["lambda", "value", "backend", "residual"])
        .parameter("a", args.axes.a)
        .parameter("b", args.axes.b)
        .parameter("c", args.axes.c)
        .parameter("parity", args.parity.as_str())
        .parameter("family", args.family.as_str())
        .parameter("index", args.index)
        .parameter("lambda_min", args.lambda_min)
        .parameter("lambda_max", args.lambda_max)
        .parameter("samples", args.samples)
        .parameter("truncation", args.truncation)
        .parameter("backend", args.backend.name());
    for (lambda, value, backend, residual) in samples.into_iter().flatten() {
        table.push(vec![lambda.into(), value.into(), backend.to_string().into(), residual.into()]);
    }
    Ok(table)
}

fn cmd_perturb(args: &PerturbArgs) -> Result<Table, CliError> {
    let parity = parse_parity(&args.parity)?;
    let quadrature = perturbation_derivative_quadrature(args.k2, args.m, args.n, parity)?;
    let fd = perturbation_derivative_fd(args.k2, args.m, args.n, parity, args.eps_step)?;
    let exact = closed_form_derivative(args.k2, args.m, args.n, parity);
    let mut table = Table::new(
        "perturb",
        vec![
            "k2",
            "m",
            "n",
            "parity",
            "derivative_quadrature",
            "derivative_fd",
            "closed_form",
            "diff_quadrature",
            "diff_fd",
        ],
    )
    .parameter("k2", args.k2)
    .parameter("m", args.m)
    .parameter("n", args.n)
    .parameter("parity", args.parity.as_str())
    .parameter("eps_step", args.eps_step);
    table.push(vec![
        args.k2.into(),
        args.m.into(),
        args.n.into(),
        parity.to_string().into(),
        quadrature.into(),
        fd.into(),
        exact.into(),
        exact.map(|v| (quadrature - v).abs()).into(),
        exact.map(|v| (fd - v).abs()).into(),
    ]);
    Ok(table)
}

fn cmd_verify(args: &VerifyArgs) -> (Table, bool) {
    let (level, name) = match args.level {
        LevelChoice::Quick => (Level::Quick, "quick"),
        LevelChoice::Full => (Level::Full, "full"),
    };
    let results = verify::run(level);
    let mut table = Table::new("verify", vec!["id", "name", "passed", "measured", "tolerance", "detail"])
        .parameter("level", name);
    for r in &results {
        table.push(vec![
            (r.id as usize).into(),
            r.name.into(),
            r.passed.into(),
            r.measured.into(),
            r.tolerance.into(),
            r.detail.clone().into(),
        ]);
    }
    (table, results.iter().all(|r| r.passed))
}

fn cmd_chart(args: &ChartArgs) -> Result<Table, CliError> {
    if args.s_samples < 2 || args.t_samples < 1 {
        return Err(CliError::Usage("need --s-samples >= 2 and --t-samples >= 1".into()));
    }
    let e = args.axes.ellipsoid()?;
    let (kp, k) = (e.quarter_period_prime(), e.quarter_period());
    let mut table = Table::new("chart", vec!["s", "t", "x", "y", "z"])
        .parameter("a", args.axes.a)
        .parameter("b", args.axes.b)
        .parameter("c", args.axes.c)
        .parameter("s_samples", args.s_samples)
        .parameter("t_samples", args.t_samples);
    for s in lambda_grid(-kp, kp, args.s_samples) {
        for j in 1..=args.t_samples {
            let t = -2.0 * k + 4.0 * k * j as f64 / args.t_samples as f64;
            let p = e.chart(s, t);
            table.push(vec![p.s.into(), p.t.into(), p.x.into(), p.y.into(), p.z.into()]);
        }
    }
    Ok(table)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn emit(table: &Table, format: Format) -> Result<(), CliError> {
    let stdout = io::stdout().lock();
    let mut out = io::BufWriter::new(stdout);
    match format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => table.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn report(err: &CliError) -> ExitCode {
    let body = json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{body}");
    ExitCode::from(err.exit_code())
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let (table, passed) = match &cli.command {
        Command::Spectrum(args) => (cmd_spectrum(args)?, true),
        Command::Eigencurve(args) => (cmd_eigencurve(args)?, true),
        Command::Perturb(args) => (cmd_perturb(args)?, true),
        Command::Verify(args) => cmd_verify(args),
        Command::Chart(args) => (cmd_chart(args)?, true),
    };
    emit(&table, cli.format)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            // --help and --version
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => return report(&CliError::Usage(err.to_string().trim_end().to_string())),
    };
    run(&cli).unwrap_or_else(|err| report(&err))
}
