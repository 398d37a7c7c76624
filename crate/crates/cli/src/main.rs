//! `wedgeflow`: states, polars, transition angles, configurations and
//! free-boundary solves for regular reflection off a wedge.

// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wedgeflow_core::fbsolver::{solve_free_boundary, Domain, SolveStatus, SolverConfig};
use wedgeflow_core::geometry::{build_configuration, initial_shock_guess};
use wedgeflow_core::io::{
    rerun_diagnostics, to_json, write_atomic, write_solve_output, SolveParams, SolveRecord,
};
use wedgeflow_core::polar::{self, solve_state2, Problem};
use wedgeflow_core::states::normal_reflection;
use wedgeflow_core::{Branch, Error};

#[derive(Parser, Debug)]
#[command(
    name = "wedgeflow",
    version,
    about = "Regular shock reflection by a wedge in self-similar potential flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detachment and sonic angles, critical density, incident-flow regime.
    Angles(GasArgs),
    /// State (2) at one wedge angle.
    Polar(AngleArgs),
    /// Both polar roots over a grid of wedge angles.
    Sweep(SweepArgs),
    /// Points, flat shock and sonic circle of the reflection configuration.
    Configure(AngleArgs),
    /// Free-boundary solve; writes field.csv, shock.csv and diagnostics.json.
    Solve(SolveArgs),
    /// Normal reflection (wedge angle pi/2).
    NormalReflection(GasArgs),
    /// Recompute the diagnostics from the output of `solve`.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug, Clone)]
struct GasArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    rho0: f64,
    #[arg(long)]
    rho1: f64,
    /// Output file (standard output if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct AngleArgs {
    #[command(flatten)]
    gas: GasArgs,
    /// Wedge half-angle in degrees.
    #[arg(long)]
    theta_deg: f64,
    #[arg(long, value_enum, default_value_t = BranchArg::Weak)]
    branch: BranchArg,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    gas: GasArgs,
    /// Angle grid in degrees, `start:stop:count` (inclusive).
    #[arg(long)]
    thetas: String,
}

#[derive(Args, Debug, Clone)]
struct SolveArgs {
    #[command(flatten)]
    angle: AngleArgs,
    /// Mesh resolution `N1xN2`.
    #[arg(long, default_value = "64x64")]
    grid: String,
    #[arg(long)]
    tol_pde: Option<f64>,
    #[arg(long)]
    tol_rh: Option<f64>,
    #[arg(long)]
    relax: Option<f64>,
    #[arg(long)]
    delta_e: Option<f64>,
    #[arg(long)]
    max_outer: Option<usize>,
    #[arg(long)]
    max_inner: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct DiagnoseArgs {
    /// Directory written by `solve`.
    #[arg(long)]
    dir: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BranchArg {
    Weak,
    Strong,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Weak => Branch::Weak,
            BranchArg::Strong => Branch::Strong,
        }
    }
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::NonPositiveDensity(_)
            | Error::NoIncidentShock { .. }
            | Error::DegenerateAngle(_)
            | Error::Parse(_) => 2,
            Error::NoRoot { .. }
            | Error::NoCriticalDensity { .. }
            | Error::NoIntersection(_)
            | Error::GuessInfeasible(_)
            | Error::Vacuum { .. }
            | Error::NoSonicThreshold { .. }
            | Error::NonMonotoneClassification { .. } => 3,
            Error::InnerDiverged { .. }
            | Error::VacuumEncountered { .. }
            | Error::SensitivityDegenerate { .. } => 4,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn problem(gas: &GasArgs) -> CliResult<Problem> {
    if !(gas.gamma > 1.0) || !gas.gamma.is_finite() {
        return Err(Failure::invalid(format!(
            "gamma must exceed 1, got {}",
            gas.gamma
        )));
    }
    if !(gas.rho0 > 0.0) || !gas.rho0.is_finite() {
        return Err(Failure::invalid(format!(
            "rho0 must be positive, got {}",
            gas.rho0
        )));
    }
    if !(gas.rho1 > gas.rho0) || !gas.rho1.is_finite() {
        return Err(Failure::invalid(format!(
            "rho1 must exceed rho0, got rho1 = {} and rho0 = {}",
            gas.rho1, gas.rho0
        )));
    }
    Ok(Problem::new(gas.gamma, gas.rho0, gas.rho1)?)
}

fn theta_rad(theta_deg: f64) -> CliResult<f64> {
    if !(theta_deg > 0.0 && theta_deg < 90.0) {
        return Err(Failure::invalid(format!(
            "theta must lie in (0, 90) degrees, got {theta_deg}"
        )));
    }
    Ok(theta_deg.to_radians())
}

fn json_only(gas: &GasArgs) -> CliResult<()> {
    match gas.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::invalid("csv output is only available for sweep")),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(Failure::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_thetas(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::invalid(format!("--thetas expects start:stop:count, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !(start > 0.0 && stop < 90.0 && start <= stop) {
        return Err(Failure::invalid(format!(
            "--thetas needs 0 < start <= stop < 90 and count >= 1, got `{spec}`"
        )));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect())
}

fn parse_grid(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || Failure::invalid(format!("--grid expects N1xN2, got `{spec}`"));
    let (a, b) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn run_angles(args: &GasArgs) -> CliResult<()> {
    json_only(args)?;
    let pb = problem(args)?;
    let angles = polar::transition_angles(&pb)?;
    let rho1_cr = match polar::critical_density(&pb.gas) {
        Ok(c) => Some(c.rho1_cr),
        Err(Error::NoCriticalDensity { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = report::Angles {
        theta_d_deg: angles.theta_d.to_degrees(),
        theta_s_deg: angles.theta_s.to_degrees(),
        rho1_cr,
        u1: pb.u1(),
        c1: pb.c1(),
        regime: if pb.u1() <= pb.c1() {
            "u1<=c1"
        } else {
            "u1>c1"
        },
    };
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn run_polar(args: &AngleArgs) -> CliResult<()> {
    json_only(&args.gas)?;
    let pb = problem(&args.gas)?;
    let sol = solve_state2(&pb, theta_rad(args.theta_deg)?, args.branch.into())?;
    emit(
        args.gas.out.as_deref(),
        &to_json(&report::PolarReport::new(&pb, &sol))?,
    )
}

fn run_sweep(args: &SweepArgs) -> CliResult<()> {
    let pb = problem(&args.gas)?;
    let degrees = parse_thetas(&args.thetas)?;
    let radians: Vec<f64> = degrees.iter().map(|d| d.to_radians()).collect();
    let rows = polar::sweep(&pb, &radians);
    let text = match args.gas.format {
        Format::Csv => report::sweep_csv(&degrees, &rows),
        Format::Json => to_json(&report::sweep_json(&degrees, &rows))?,
    };
    emit(args.gas.out.as_deref(), &text)
}

fn run_configure(args: &AngleArgs) -> CliResult<()> {
    json_only(&args.gas)?;
    let pb = problem(&args.gas)?;
    let sol = solve_state2(&pb, theta_rad(args.theta_deg)?, args.branch.into())?;
    let config = build_configuration(&pb, &sol)?;
    emit(
        args.gas.out.as_deref(),
        &to_json(&report::Configuration::new(&config))?,
    )
}

fn run_normal_reflection(args: &GasArgs) -> CliResult<()> {
    json_only(args)?;
    let pb = problem(args)?;
    let nr = normal_reflection(&pb.gas, pb.state1.rho)?;
    let report = report::NormalReflection {
        rho2_bar: nr.rho2_bar,
        xi_bar: nr.xi_bar,
    };
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn run_solve(args: &SolveArgs) -> CliResult<()> {
    let gas = &args.angle.gas;
    json_only(gas)?;
    let pb = problem(gas)?;
    let theta_w = theta_rad(args.angle.theta_deg)?;
    let (n1, n2) = parse_grid(&args.grid)?;
    let mut solver = SolverConfig::with_grid(n1, n2);
    if let Some(v) = args.tol_pde {
        solver.tol_pde = v;
    }
    if let Some(v) = args.tol_rh {
        solver.tol_rh = v;
    }
    if let Some(v) = args.relax {
        solver.relax = v;
    }
    if let Some(v) = args.delta_e {
        solver.delta_e = v;
    }
    if let Some(v) = args.max_outer {
        solver.max_outer = v;
    }
    if let Some(v) = args.max_inner {
        solver.max_inner = v;
    }
    solver.validate()?;
    let branch: Branch = args.angle.branch.into();
    let sol = solve_state2(&pb, theta_w, branch)?;
    let config = build_configuration(&pb, &sol)?;
    let guess = initial_shock_guess(&config, solver.n2)?;
    let domain = Domain::from_configuration(&config);
    let solution = solve_free_boundary(&domain, &guess.curve, &solver)?;
    let params = SolveParams {
        gamma: gas.gamma,
        rho0: gas.rho0,
        rho1: gas.rho1,
        theta_deg: args.angle.theta_deg,
        branch,
    };
    let record = SolveRecord::new(params, solver, &solution);
    let dir = gas.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_solve_output(&dir, &domain, &record, &solution)?;
    print!("{}", to_json(&record)?);
    match solution.status {
        SolveStatus::Converged => Ok(()),
        SolveStatus::NotConverged => Err(Failure {
            code: 4,
            message: format!(
                "not converged after {} outer iterations (flux jump {:e}); diagnostics written to {}",
                solution.outer_iterations,
                solution.diagnostics.rh_residual_max,
                dir.display()
            ),
        }),
    }
}

fn run_diagnose(args: &DiagnoseArgs) -> CliResult<()> {
    let (_, diagnostics) = rerun_diagnostics(&args.dir)?;
    emit(args.out.as_deref(), &to_json(&diagnostics)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Angles(a) => run_angles(a),
        Command::Polar(a) => run_polar(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Configure(a) => run_configure(a),
        Command::Solve(a) => run_solve(a),
        Command::NormalReflection(a) => run_normal_reflection(a),
        Command::Diagnose(a) => run_diagnose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wedgeflow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
