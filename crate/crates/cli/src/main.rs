//! Command-line orchestration: solve | verify | sweep | oracle.
//!
//! Exit codes: 0 success; 1 residuals or oracle comparisons out of
//! tolerance; 2 parameter errors; 3 non-convergence; 4 i/o or file-format
//! errors. Every failure path emits a machine-readable error object on
//! stderr.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gnlab_core::algebra;
use gnlab_core::error::Error;
use gnlab_core::grid::GridSpec;
use gnlab_core::params::Params;
use gnlab_core::solver::{petviashvili_solve, InitialField, SolverConfig};
use gnlab_core::verify::{self, Tolerances};
use gnlab_core::{io, spectral};

use report::{solve_document, to_json, InitSection, VerifyDocument, VersionsSection};

#[derive(Parser)]
#[command(
    name = "gnlab",
    version,
    about = "Ground states of -\u{394}u + (-\u{394})^s u = |u|^{p-2}u and the interpolation best constant"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a ground state and report identities and the best constant
    Solve(SolveArgs),
    /// Check a stored field against the published identity tolerances
    Verify(VerifyArgs),
    /// Solve along a parameter axis and emit one CSV row per point
    Sweep(SweepArgs),
    /// Closed-form Gaussian, determinant, weight-scan, and derivative oracles
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Spatial dimension (field computations support 3)
    #[arg(long, default_value_t = 3)]
    dim: u32,
    /// Fractional order in (0, 1)
    #[arg(long)]
    s: f64,
    /// Nonlinearity exponent in (2N/(N-2s), 2N/(N-2))
    #[arg(long)]
    p: f64,
}

impl ProblemArgs {
    fn params(&self) -> Result<Params, Error> {
        Params::new(self.dim, self.s, self.p)
    }
}

#[derive(Args)]
struct GridArgs {
    /// Samples per axis (power of two, at least 8)
    #[arg(long = "grid", default_value_t = 64)]
    grid: usize,
    /// Box half-width L; the domain is [-L, L)^3
    #[arg(long = "box", default_value_t = 12.0)]
    half_width: f64,
}

impl GridArgs {
    fn spec(&self, dim: u32) -> Result<GridSpec, Error> {
        GridSpec::new(dim, self.grid, self.half_width)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Relative-change stopping tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Stabilizer exponent (default (p-1)/(p-2))
    #[arg(long)]
    gamma: Option<f64>,
    /// Truncate the nonlinear term by the 2/3 rule
    #[arg(long, default_value_t = false)]
    dealias: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            gamma: self.gamma,
            dealias: self.dealias,
            init: InitialField::default(),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Seed for the inequality sampler
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random fields for inequality sampling (0 disables)
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Where to store the computed field (FLD1)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to store the JSON report (stdout when omitted)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Omit wall-clock entries so identical runs are byte-identical
    #[arg(long, default_value_t = false)]
    no_timestamp: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Field file to check
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to store the JSON report (stdout when omitted)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Omit wall-clock entries so identical runs are byte-identical
    #[arg(long, default_value_t = false)]
    no_timestamp: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SweepAxis {
    P,
    S,
}

#[derive(Args)]
struct SweepArgs {
    /// Which parameter to sweep
    #[arg(long)]
    axis: SweepAxis,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Number of sweep points (rows)
    #[arg(long)]
    steps: usize,
    /// Spatial dimension
    #[arg(long, default_value_t = 3)]
    dim: u32,
    /// Fractional order (fixed when sweeping p)
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Nonlinearity exponent (fixed when sweeping s)
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Where to store the CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Fractional order for the Gaussian table
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Nonlinearity exponent for the determinant table
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    /// Samples per axis for the Gaussian table
    #[arg(long = "grid", default_value_t = 64)]
    grid: usize,
    /// Box half-width for the Gaussian table
    #[arg(long = "box", default_value_t = 10.0)]
    half_width: f64,
    /// Seed for derivative-check directions
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let (code, kind) = match &err {
            Error::Parameter(_) | Error::Degenerate(_) | Error::NoRoot(_) => (2, "parameter"),
            Error::Io(_) => (4, "io"),
            Error::Format(_) => (4, "format"),
        };
        Failure::new(code, kind, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": { "kind": failure.kind, "message": failure.message }
                })
            );
            ExitCode::from(failure.code)
        }
    }
}

fn emit(text: &str, path: &Option<PathBuf>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<(), Failure> {
    let params = args.problem.params()?;
    let grid = args.grid.spec(args.problem.dim)?;
    let cfg = args.solver.config();
    let gamma = args
        .solver
        .gamma
        .unwrap_or((params.p() - 1.0) / (params.p() - 2.0));

    let (field, solve) = petviashvili_solve(&params, grid, &cfg)?;

    let gn_sample_min = if args.samples > 0 {
        Some(
            verify::gn_sample(&solve.final_triple, &params, grid, args.seed, args.samples)?
                .min_ratio,
        )
    } else {
        None
    };
    let from_c = algebra::best_constant_from_c(solve.energy_c, &params)?;
    let (amplitude, width) = match cfg.init {
        InitialField::Gaussian { amplitude, width } => (amplitude, width),
        InitialField::Explicit(_) => (f64::NAN, f64::NAN),
    };
    let doc = solve_document(
        &params,
        grid,
        cfg.tol,
        cfg.max_iter,
        gamma,
        cfg.dealias,
        InitSection { amplitude, width },
        &solve,
        from_c,
        gn_sample_min,
        !args.no_timestamp,
    );

    if let Some(out) = &args.out {
        io::save_field(&field, out)?;
    }
    emit(&to_json(&doc), &args.report)?;

    if !solve.converged {
        return Err(Failure::new(
            3,
            "non_convergence",
            format!("no convergence within {} iterations (report persisted)", cfg.max_iter),
        ));
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let params = args.problem.params()?;
    let field = io::load_field(&args.input)?;
    let grid = field.grid();
    let triple = spectral::norm_triple(&field, &params)?;
    let identities = verify::check_identities(&triple, &params, Some(&field))?;
    let tolerances = Tolerances::published(grid);
    let pass = tolerances.admits(&identities);
    let doc = VerifyDocument {
        params: (&params).into(),
        grid: grid.into(),
        triple,
        identities,
        tolerances,
        pass,
        versions: VersionsSection::current(),
        timestamp: (!args.no_timestamp).then(report::now_unix),
    };
    emit(&to_json(&doc), &args.report)?;
    if !pass {
        return Err(Failure::new(1, "tolerance", "identity residuals exceed the published tolerances"));
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.steps == 0 {
        return Err(Failure::new(2, "parameter", "sweep needs at least one step"));
    }
    let values: Vec<f64> = (0..args.steps)
        .map(|i| {
            if args.steps == 1 {
                args.from
            } else {
                args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64
            }
        })
        .collect();
    // admissibility of every point is checked before any computation
    let points: Vec<Params> = values
        .iter()
        .map(|v| match args.axis {
            SweepAxis::P => Params::new(args.dim, args.s, *v),
            SweepAxis::S => Params::new(args.dim, *v, args.p),
        })
        .collect::<Result<_, _>>()?;
    let grid = args.grid.spec(args.dim)?;
    let cfg = args.solver.config();

    let mut csv = String::from(
        "N,s,p,a,b,m,c,C_best,nehari_res,pohozaev_res,iterations,converged\n",
    );
    for params in &points {
        let (_, solve) = petviashvili_solve(params, grid, &cfg)?;
        let t = solve.final_triple;
        let ids = &solve.identity_report;
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
            params.dim(),
            params.s(),
            params.p(),
            t.a,
            t.b,
            t.m,
            solve.energy_c,
            solve.best_constant,
            ids.nehari_residual,
            ids.pohozaev_residual,
            solve.iterations,
            solve.converged,
        ));
    }
    emit(&csv, &args.out)
}

fn run_oracle(args: OracleArgs) -> Result<(), Failure> {
    let params = Params::new(3, args.s, args.p)?;
    let grid = GridSpec::cubic(args.grid, args.half_width)?;
    let mut ok = true;

    println!("gaussian oracle (n={}, L={}, s={}):", grid.n(), grid.half_width(), params.s());
    println!("  {:<14} {:>22} {:>22} {:>11} {:>9}", "row", "computed", "exact", "rel_err", "tol");
    for r in verify::gaussian_oracle(&params, grid)? {
        let status = if r.rel_err <= r.tol { "ok" } else { "FAIL" };
        if r.rel_err > r.tol {
            ok = false;
        }
        println!(
            "  {:<14} {:>22.15e} {:>22.15e} {:>11.3e} {:>9.1e} {}",
            r.name, r.computed, r.exact, r.rel_err, r.tol, status
        );
    }

    let k = 1.0;
    let d = algebra::cramer_dets(&params, k)?;
    println!(
        "cramer determinants (N={}, s={}, p={}, k={k}): detD={:.6} detD1={:.6} detD2={:.6} detD3={:.6} x=({:.6}, {:.6}, {:.6})",
        params.dim(), params.s(), params.p(), d.det_d, d.det_d1, d.det_d2, d.det_d3, d.x1, d.x2, d.x3
    );
    let xscale = (params.dim_f() - 2.0 * params.s()) / (1.0 - params.s());
    if (d.x1 - d.det_d1 / d.det_d).abs() > 1e-12 * xscale
        || (d.x2 - d.det_d2 / d.det_d).abs() > 1e-12 * xscale
        || (d.det_d3 / d.det_d).abs() > 1e-12 * xscale
    {
        println!("  closed forms disagree with direct determinant evaluation");
        ok = false;
    }

    let mut min_g3 = f64::INFINITY;
    let mut min_g4 = f64::INFINITY;
    let mut scanned = 0usize;
    for i in 0..200 {
        let t = 0.01 * (8.0f64 / 0.01).powf(i as f64 / 199.0);
        if (t - 1.0).abs() <= 1e-3 {
            continue;
        }
        let (g3, g4) = algebra::g3_g4(t, params.dim(), params.s())?;
        min_g3 = min_g3.min(g3);
        min_g4 = min_g4.min(g4);
        scanned += 1;
    }
    println!("comparison-weight scan ({scanned} log-spaced points in (0.01, 8), t != 1): min g3 = {min_g3:.3e}, min g4 = {min_g4:.3e}");
    if min_g3 <= 0.0 || min_g4 <= 0.0 {
        println!("  negative comparison weight found");
        ok = false;
    }

    let probe = gnlab_core::Field::gaussian(grid, 1.0, 1.0, [0.0; 3])?;
    let checks = verify::derivative_checks(&probe, &params, args.seed)?;
    println!(
        "derivative checks: dJ/dz vs FD {:.3e} (tol 1e-6), gateaux vs FD {:.3e} (tol 1e-5)",
        checks.djdz_fd_relerr, checks.gateaux_fd_relerr
    );
    if checks.djdz_fd_relerr > 1e-6 || checks.gateaux_fd_relerr > 1e-5 {
        ok = false;
    }

    if ok {
        println!("oracle: all comparisons within tolerance");
        Ok(())
    } else {
        Err(Failure::new(1, "oracle", "oracle comparisons out of tolerance"))
    }
}
