//! Command-line front end: evaluate the operator, compute moduli and
//! bound quantities, run convergence sweeps, and verify the approximation
//! theorems.
//!
//! Exit codes: `0` success, `2` usage/parse/domain errors, `3` parameter
//! regime violations, `4` term-budget overruns, `5` I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bsk::bounds::{bound_quantities, verify_theorem, TheoremId, VerifyConfig};
use bsk::convergence::{run_convergence, SweepConfig};
use bsk::error::{Error, Result};
use bsk::moduli::{local_modulus, lp_modulus_profile, tau_modulus_profile, GridSpec};
use bsk::operator::{bsk_apply_budgeted, central_second_moment, moment_first, moment_second};
use bsk::quadrature::QuadratureRule;
use bsk::report::{
    fmt_g17, render_convergence_csv, render_convergence_json, render_profile_csv,
    render_profile_json, render_ratio_csv, render_ratio_json, write_text, ProfileReport,
    ReportFormat,
};
use bsk::{resolve_function, OperatorParams, DEFAULT_TERM_BUDGET};

#[derive(Parser)]
#[command(
    name = "bsk",
    version,
    about = "Shifted-basis Kantorovich operators: evaluation, moduli, bounds, convergence"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the operator to a function at a point.
    Eval(EvalArgs),
    /// Closed-form first, second, and central second moments.
    Moments(MomentsArgs),
    /// Modulus-of-smoothness profiles (omega, tau, or local oscillation).
    Modulus(ModulusArgs),
    /// The bound quantities A(n, r), M(r, d), B(r).
    Bounds(BoundsArgs),
    /// Convergence sweep: errors, modulus scales, and their ratios.
    Converge(ConvergeArgs),
    /// Verify one approximation theorem as a bound-ratio report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Catalog name (e.g. `kink`) or inline expression `expr:<text>`.
    #[arg(long)]
    func: String,
    /// Evaluation point, comma-separated coordinates in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Polynomial degree.
    #[arg(short, long)]
    n: usize,
    /// Basis shift.
    #[arg(short, long, default_value_t = 1)]
    r: usize,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// Gauss-Legendre order for cell means.
    #[arg(long, default_value_t = 8)]
    quad_order: usize,
    /// Maximum lattice terms (n+1)^d per application.
    #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct MomentsArgs {
    /// Polynomial degree.
    #[arg(short, long)]
    n: usize,
    /// Basis shift.
    #[arg(short, long, default_value_t = 1)]
    r: usize,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// Coordinate axis (zero-based).
    #[arg(long, default_value_t = 0)]
    axis: usize,
    /// Evaluation point, comma-separated coordinates in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args)]
struct ModulusArgs {
    /// Catalog name or inline expression `expr:<text>`.
    #[arg(long)]
    func: String,
    /// Which modulus: omega, tau, or local.
    #[arg(long)]
    kind: String,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// L^p exponent (omega/tau only).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Radii, comma-separated and strictly ascending.
    #[arg(long, allow_hyphen_values = true)]
    delta: String,
    /// Window centre for `local`, comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Points of the per-axis integration partition.
    #[arg(long, default_value_t = 257)]
    grid: usize,
    /// Per-axis size of shift grids and window scans (odd).
    #[arg(long, default_value_t = 65)]
    h_grid: usize,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Polynomial degree.
    #[arg(short, long)]
    n: usize,
    /// Basis shift.
    #[arg(short, long, default_value_t = 1)]
    r: usize,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Catalog name or inline expression `expr:<text>`.
    #[arg(long)]
    func: String,
    /// Basis shift.
    #[arg(short, long, default_value_t = 1)]
    r: usize,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// Explicit degree list, comma-separated ascending.
    #[arg(long)]
    n_list: Option<String>,
    /// Doubling degree ladder `start:stop`.
    #[arg(long)]
    n_geom: Option<String>,
    /// L^p exponents, comma-separated.
    #[arg(long, default_value = "1")]
    p: String,
    /// Gauss-Legendre order for cell means and norms.
    #[arg(long, default_value_t = 8)]
    quad_order: usize,
    /// Points of the per-axis modulus partition.
    #[arg(long, default_value_t = 257)]
    grid: usize,
    /// Per-axis size of shift grids and window scans (odd).
    #[arg(long, default_value_t = 65)]
    h_grid: usize,
    /// Composite cells per axis for norm integrals.
    #[arg(long, default_value_t = 64)]
    cells: usize,
    /// Maximum lattice terms (n+1)^d per application.
    #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
    budget: u128,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Theorem: tau-estimate, smooth-estimate, omega-estimate, lp-norm-bound.
    #[arg(long)]
    theorem: String,
    /// Catalog name or inline expression `expr:<text>`.
    #[arg(long)]
    func: String,
    /// Basis shift.
    #[arg(short, long, default_value_t = 1)]
    r: usize,
    /// Dimension.
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// Explicit degree list, comma-separated ascending.
    #[arg(long)]
    n_list: Option<String>,
    /// Doubling degree ladder `start:stop`.
    #[arg(long)]
    n_geom: Option<String>,
    /// L^p exponent.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Gauss-Legendre order for cell means and norms.
    #[arg(long, default_value_t = 8)]
    quad_order: usize,
    /// Points of the per-axis modulus partition.
    #[arg(long, default_value_t = 257)]
    grid: usize,
    /// Per-axis size of shift grids and window scans (odd).
    #[arg(long, default_value_t = 65)]
    h_grid: usize,
    /// Composite cells per axis for norm integrals.
    #[arg(long, default_value_t = 64)]
    cells: usize,
    /// Maximum lattice terms (n+1)^d per application.
    #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
    budget: u128,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                Error::Domain(format!("{what}: `{tok}` is not a number"))
            })
        })
        .collect()
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|_| {
                Error::Domain(format!("{what}: `{tok}` is not a non-negative integer"))
            })
        })
        .collect()
}

fn parse_point(text: &str, d: usize) -> Result<Vec<f64>> {
    let x = parse_f64_list(text, "point")?;
    if x.len() != d {
        return Err(Error::Domain(format!(
            "point has {} coordinates, expected {d}",
            x.len()
        )));
    }
    Ok(x)
}

fn degrees(n_list: &Option<String>, n_geom: &Option<String>) -> Result<Vec<usize>> {
    match (n_list, n_geom) {
        (Some(list), None) => parse_usize_list(list, "degree list"),
        (None, Some(geom)) => {
            let parts: Vec<&str> = geom.split(':').collect();
            if parts.len() != 2 {
                return Err(Error::Domain(format!(
                    "degree ladder must be `start:stop`, got `{geom}`"
                )));
            }
            let start = parts[0].trim().parse::<usize>().map_err(|_| {
                Error::Domain(format!("degree ladder start `{}` is not an integer", parts[0]))
            })?;
            let stop = parts[1].trim().parse::<usize>().map_err(|_| {
                Error::Domain(format!("degree ladder stop `{}` is not an integer", parts[1]))
            })?;
            SweepConfig::doubling_degrees(start, stop)
        }
        (Some(_), Some(_)) => Err(Error::Domain(
            "pass either --n-list or --n-geom, not both".into(),
        )),
        (None, None) => Err(Error::Domain(
            "one of --n-list or --n-geom is required".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Eval(args) => {
            let f = resolve_function(&args.func, args.d)?;
            let x = parse_point(&args.x, args.d)?;
            let params = OperatorParams::new(args.n, args.r, args.d)?;
            let rule = QuadratureRule::gauss_legendre(args.quad_order)?;
            let value = bsk_apply_budgeted(&params, &f, &x, &rule, args.budget)?;
            println!("{}", fmt_g17(value));
            Ok(())
        }
        Cmd::Moments(args) => {
            let params = OperatorParams::new(args.n, args.r, args.d)?;
            let x = parse_point(&args.x, args.d)?;
            println!("first = {}", fmt_g17(moment_first(&params, args.axis, &x)?));
            println!("second = {}", fmt_g17(moment_second(&params, args.axis, &x)?));
            println!(
                "central = {}",
                fmt_g17(central_second_moment(&params, args.axis, &x)?)
            );
            Ok(())
        }
        Cmd::Modulus(args) => {
            let f = resolve_function(&args.func, args.d)?;
            let grid = GridSpec {
                x_points: args.grid,
                h_points: args.h_grid,
            };
            let deltas = parse_f64_list(&args.delta, "radius list")?;
            let format = ReportFormat::parse(&args.format)?;
            let values = match args.kind.as_str() {
                "omega" => lp_modulus_profile(&f, &deltas, args.p, &grid)?,
                "tau" => tau_modulus_profile(&f, &deltas, args.p, &grid)?,
                "local" => {
                    let x_text = args.x.as_ref().ok_or_else(|| {
                        Error::Domain("`--kind local` requires --x".into())
                    })?;
                    let x = parse_point(x_text, args.d)?;
                    deltas
                        .iter()
                        .map(|&delta| local_modulus(&f, &x, delta, &grid))
                        .collect::<Result<Vec<f64>>>()?
                }
                other => {
                    return Err(Error::Domain(format!(
                        "unknown modulus kind `{other}`; expected omega, tau, or local"
                    )))
                }
            };
            let profile = ProfileReport {
                kind: args.kind.clone(),
                label: f.label().to_string(),
                d: args.d,
                p: args.p,
                deltas,
                values,
            };
            let text = match format {
                ReportFormat::Csv => render_profile_csv(&profile),
                ReportFormat::Json => render_profile_json(&profile),
            };
            write_text(args.out.as_deref(), &text)
        }
        Cmd::Bounds(args) => {
            let params = OperatorParams::new(args.n, args.r, args.d)?;
            let q = bound_quantities(&params)?;
            println!("a_nr = {}", fmt_g17(q.a_nr));
            println!("m_r = {}", fmt_g17(q.m_r));
            println!("b_r = {}", fmt_g17(q.b_r));
            Ok(())
        }
        Cmd::Converge(args) => {
            let f = resolve_function(&args.func, args.d)?;
            let format = ReportFormat::parse(&args.format)?;
            let cfg = SweepConfig {
                r: args.r,
                d: args.d,
                n_list: degrees(&args.n_list, &args.n_geom)?,
                p_list: parse_f64_list(&args.p, "exponent list")?,
                quad_order: args.quad_order,
                cells_per_axis: args.cells,
                grid: GridSpec {
                    x_points: args.grid,
                    h_points: args.h_grid,
                },
                budget: args.budget,
            };
            let report = run_convergence(&f, &cfg)?;
            let text = match format {
                ReportFormat::Csv => render_convergence_csv(&report),
                ReportFormat::Json => render_convergence_json(&report),
            };
            write_text(args.out.as_deref(), &text)
        }
        Cmd::Verify(args) => {
            let f = resolve_function(&args.func, args.d)?;
            let theorem = TheoremId::parse(&args.theorem)?;
            let format = ReportFormat::parse(&args.format)?;
            let cfg = VerifyConfig {
                p: args.p,
                quad_order: args.quad_order,
                cells_per_axis: args.cells,
                grid: GridSpec {
                    x_points: args.grid,
                    h_points: args.h_grid,
                },
                budget: args.budget,
            };
            let n_list = degrees(&args.n_list, &args.n_geom)?;
            let report = verify_theorem(theorem, &f, args.r, &n_list, &cfg)?;
            let text = match format {
                ReportFormat::Csv => render_ratio_csv(&report),
                ReportFormat::Json => render_ratio_json(&report),
            };
            write_text(args.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
