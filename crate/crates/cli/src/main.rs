use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abreu::curvature::DEFAULT_DENSITY;
use abreu::identity::DEFAULT_TOLERANCE;
use abreu::quadrature::DEFAULT_MAX_LEVELS;
use abreu::{
    affine_fit_default, calabi_report, check_delzant, check_identity, curvature_grid, facet_lattice_volume,
    grid_to_csv, parse_polytope, CurvatureSample, parse_potential, scalar_curvature, volume, volume_derivative_sum, Polytope64,
    Potential64, QuadratureOptions, SymplecticPotential,
};
use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_NOT_DELZANT: u8 = 2;
const EXIT_NOT_EXTREMAL: u8 = 3;
const EXIT_IDENTITY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "abreu", version)]
#[command(about = "Scalar curvature of toric Kähler metrics from Delzant polytopes")]
struct Cli {
    /// Output format; defaults to JSON for reports and CSV for grids
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,

    /// Suppress diagnostics on stderr (errors are still reported)
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Delzant condition at every vertex
    Validate { polytope: PathBuf },

    /// Scalar curvature at one point or on an interior grid
    Curvature {
        polytope: PathBuf,
        /// Potential file; the canonical potential if omitted
        potential: Option<PathBuf>,
        /// Evaluation point (one coordinate per dimension)
        #[arg(long, num_args = 1.., allow_negative_numbers = true, conflicts_with = "grid", required_unless_present = "grid")]
        point: Option<Vec<f64>>,
        /// Grid density per axis
        #[arg(long)]
        grid: Option<usize>,
    },

    /// Fit R by an affine function and report whether the metric is extremal
    Extremal {
        polytope: PathBuf,
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DENSITY)]
        density: usize,
        /// Sup-norm residual threshold [default: 1e-5·(1 + max|R|)]
        #[arg(long)]
        threshold: Option<f64>,
    },

    /// Compare the facet volume sum with the integral of R
    Identity {
        polytope: PathBuf,
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Maximum uniform subdivision levels for the quadrature
        #[arg(long, env = "ABREU_MAX_SUBDIV", default_value_t = DEFAULT_MAX_LEVELS)]
        max_subdiv: u32,
    },

    /// Calabi's extremal metric on the trapezoid with parameter a
    Calabi {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = DEFAULT_DENSITY)]
        density: usize,
        #[arg(long)]
        threshold: Option<f64>,
    },

    /// Euclidean volume and lattice volumes of the facets
    Volume { polytope: PathBuf },
}

struct Report {
    payload: String,
    code: u8,
    note: Option<String>,
}

impl Report {
    fn ok(payload: String) -> Self {
        Self { payload, code: EXIT_OK, note: None }
    }
}

fn read_polytope(path: &Path) -> anyhow::Result<Polytope64> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_polytope(&text).with_context(|| format!("invalid polytope file {}", path.display()))
}

fn read_potential(polytope: &Path, potential: Option<&Path>) -> anyhow::Result<Potential64> {
    let p = read_polytope(polytope)?;
    match potential {
        None => Ok(SymplecticPotential::canonical(p)),
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            parse_potential(&text, p).with_context(|| format!("invalid potential file {}", path.display()))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn json_only(format: Option<Format>, command: &str) -> anyhow::Result<()> {
    if format == Some(Format::Csv) {
        bail!("{command} reports are JSON only");
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Validate { polytope } => {
            json_only(cli.output, "validate")?;
            let p = read_polytope(polytope)?;
            let report = check_delzant(&p);
            let mut out = Report::ok(to_json(&report)?);
            if !report.is_delzant {
                out.code = EXIT_NOT_DELZANT;
                let lines: Vec<String> = report
                    .failures
                    .iter()
                    .map(|f| {
                        let at: Vec<f64> = p.vertices()[f.vertex].point.iter().map(|v| v + 0.0).collect();
                        format!("vertex {} at {at:?}: {}", f.vertex, f.reason)
                    })
                    .collect();
                out.note = Some(format!("not Delzant\n{}", lines.join("\n")));
            }
            Ok(out)
        }
        Command::Curvature { polytope, potential, point, grid } => {
            let pot = read_potential(polytope, potential.as_deref())?;
            match (point, grid) {
                (Some(y), _) => {
                    let sample = CurvatureSample { point: y.clone(), r: scalar_curvature(&pot, y)? };
                    let payload = match cli.output.unwrap_or(Format::Json) {
                        Format::Json => to_json(&sample)?,
                        Format::Csv => grid_to_csv(&[sample], pot.dim()),
                    };
                    Ok(Report::ok(payload))
                }
                (None, Some(n)) => {
                    let samples = curvature_grid(&pot, *n)?;
                    let payload = match cli.output.unwrap_or(Format::Csv) {
                        Format::Csv => grid_to_csv(&samples, pot.dim()),
                        Format::Json => to_json(&samples)?,
                    };
                    Ok(Report::ok(payload))
                }
                (None, None) => bail!("one of --point or --grid is required"),
            }
        }
        Command::Extremal { polytope, potential, density, threshold } => {
            json_only(cli.output, "extremal")?;
            let pot = read_potential(polytope, potential.as_deref())?;
            let fit = affine_fit_default(&curvature_grid(&pot, *density)?, *threshold)?;
            let mut out = Report::ok(to_json(&fit)?);
            if !fit.is_extremal {
                out.code = EXIT_NOT_EXTREMAL;
                out.note = Some(format!("not extremal: max residual {:e}", fit.max_residual));
            }
            Ok(out)
        }
        Command::Identity { polytope, potential, tol, max_subdiv } => {
            json_only(cli.output, "identity")?;
            if !(*tol > 0.0) {
                bail!("--tol must be positive");
            }
            let pot = read_potential(polytope, potential.as_deref())?;
            let opts = QuadratureOptions { tol: *tol, max_levels: *max_subdiv };
            let report = check_identity(&pot, &opts)?;
            let mut out = Report::ok(to_json(&report)?);
            let bound = (10.0 * tol).max(1e-4);
            if !(report.abs_error < bound) {
                out.code = EXIT_IDENTITY;
                out.note = Some(format!("identity violated: |lhs - rhs| = {:e} >= {bound:e}", report.abs_error));
            }
            Ok(out)
        }
        Command::Calabi { a, density, threshold } => {
            json_only(cli.output, "calabi")?;
            let report = calabi_report(*a, *density, *threshold)?;
            let mut out = Report::ok(to_json(&report)?);
            if !report.fit.is_extremal {
                out.code = EXIT_NOT_EXTREMAL;
                out.note = Some(format!("not extremal: max residual {:e}", report.fit.max_residual));
            }
            Ok(out)
        }
        Command::Volume { polytope } => {
            let p = read_polytope(polytope)?;
            let facets = (0..p.num_facets())
                .map(|i| facet_lattice_volume(&p, i))
                .collect::<abreu::Result<Vec<f64>>>()?;
            let payload = match cli.output.unwrap_or(Format::Json) {
                Format::Json => to_json(&json!({
                    "volume": volume(&p)?,
                    "facet_lattice_volumes": facets,
                    "volume_derivative_sum": volume_derivative_sum(&p)?,
                }))?,
                Format::Csv => {
                    let mut s = String::from("facet,lattice_volume\n");
                    for (i, v) in facets.iter().enumerate() {
                        s.push_str(&format!("{i},{v:.16e}\n"));
                    }
                    s
                }
            };
            Ok(Report::ok(payload))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.payload);
            if !report.payload.ends_with('\n') {
                println!();
            }
            if let (Some(note), false) = (&report.note, cli.quiet) {
                eprintln!("{note}");
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
