use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use layermesh::analysis::{self, convergence_table, table_csv, ErrorReport, REPORT_HEADER};
use layermesh::io;
use layermesh::mpde1d::{check_target_n, generate_mesh_1d_with};
use layermesh::mpde2d::generate_mesh_2d;
use layermesh::problem::{Dim, REGISTRY};
use layermesh::{make_problem, DensityParams, DriverOptions, Error, ProblemId};

/// Layer-adapted mesh generation for two-parameter
/// reaction-convection-diffusion problems.
#[derive(Parser, Debug)]
#[command(name = "layermesh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a 1D mesh, solve on it and report the estimated error.
    Solve1d(SolveArgs),
    /// Generate a 2D mesh, solve on it and report the estimated error.
    Solve2d(SolveArgs),
    /// Convergence table over lists of eps and N.
    Table(TableArgs),
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Layer proportion control in 1D.
    #[arg(long, default_value_t = 0.28)]
    k: f64,
    /// x-direction proportion control in 2D.
    #[arg(long, default_value_t = 0.28)]
    k1: f64,
    /// y-direction proportion control in 2D.
    #[arg(long, default_value_t = 0.28)]
    k2: f64,
    #[arg(long, default_value_t = 2.5)]
    sigma: f64,
    /// Stopping tolerance of the 1D fixed point.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Fixed-point iterations after each 2D refinement.
    #[arg(long = "level-iters", default_value_t = 5)]
    level_iters: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Registered problem name.
    #[arg(long)]
    problem: String,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    mu: f64,
    /// Intervals per direction (power of 2, at least 16).
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    density: DensityArgs,
    /// Error report CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh file: plain text in 1D, legacy VTK in 2D.
    #[arg(long = "mesh-out")]
    mesh_out: Option<PathBuf>,
    /// Nodal solution dump.
    #[arg(long = "solution-out")]
    solution_out: Option<PathBuf>,
    /// Iteration log CSV.
    #[arg(long = "log-out")]
    log_out: Option<PathBuf>,
    /// Lexicographic coordinate dump (2D only).
    #[arg(long = "lex-out")]
    lex_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long)]
    problem: String,
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    eps: Vec<f64>,
    #[arg(long)]
    mu: f64,
    /// Comma-separated N values, consecutive doublings.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n: Vec<usize>,
    #[command(flatten)]
    density: DensityArgs,
    /// Table CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownProblem(_) | Error::InvalidParameter(_) | Error::Dimension(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl DensityArgs {
    fn params(&self) -> DensityParams {
        DensityParams {
            k: self.k,
            k1: self.k1,
            k2: self.k2,
            sigma: self.sigma,
            tol: self.tol,
        }
    }

    fn options(&self) -> DriverOptions {
        DriverOptions {
            level_iterations: self.level_iters,
            ..DriverOptions::default()
        }
    }

    fn header(&self, dim: Dim) -> Vec<(&'static str, String)> {
        let mut h = Vec::new();
        match dim {
            Dim::One => {
                h.push(("k", format!("{:e}", self.k)));
                h.push(("tol", format!("{:e}", self.tol)));
            }
            Dim::Two => {
                h.push(("k1", format!("{:e}", self.k1)));
                h.push(("k2", format!("{:e}", self.k2)));
                h.push(("level_iters", self.level_iters.to_string()));
            }
        }
        h.push(("sigma", format!("{:e}", self.sigma)));
        h.push(("initial_n", DriverOptions::default().initial_n.to_string()));
        h
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be a positive number, got {v}")))
    }
}

fn problem_dim(name: &str) -> Result<Dim, Failure> {
    if !REGISTRY.contains(&name) {
        return Err(Failure::Usage(format!(
            "unknown problem `{name}`; known: {}",
            REGISTRY.join(", ")
        )));
    }
    Ok(make_problem(&ProblemId::new(name, 1.0, 1.0))?.dim())
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Numerical(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => emit(Some(p), text),
        None => Ok(()),
    }
}

fn solve(args: &SolveArgs, dim: Dim) -> Result<(), Failure> {
    check_positive("eps", args.eps)?;
    check_positive("mu", args.mu)?;
    let opts = args.density.options();
    check_target_n(args.n, opts.initial_n)?;
    let dp = args.density.params();
    dp.validate(1)?;
    if problem_dim(&args.problem)? != dim {
        return Err(Failure::Usage(format!(
            "problem `{}` is not {}",
            args.problem,
            if dim == Dim::One { "one-dimensional" } else { "two-dimensional" }
        )));
    }
    if dim == Dim::One && args.lex_out.is_some() {
        return Err(Failure::Usage("--lex-out applies to solve2d only".into()));
    }
    let p = make_problem(&ProblemId::new(args.problem.as_str(), args.eps, args.mu))?;

    let mut hdr = vec![
        ("problem", args.problem.clone()),
        ("eps", format!("{:e}", args.eps)),
        ("mu", format!("{:e}", args.mu)),
        ("n", args.n.to_string()),
    ];
    hdr.extend(args.density.header(dim));

    let report = match dim {
        Dim::One => {
            let (mesh, u, log) = match generate_mesh_1d_with(&p, args.n, &dp, &opts) {
                Err(Error::NotConverged { level, iterations, log }) => {
                    write_file(&args.log_out, &(io::header(&hdr) + &log.to_csv()))?;
                    return Err(Error::NotConverged { level, iterations, log }.into());
                }
                r => r?,
            };
            write_file(&args.mesh_out, &io::write_mesh1d(&mesh, &hdr))?;
            write_file(&args.solution_out, &io::write_nodal_1d(&mesh, &u.coeffs, &hdr))?;
            write_file(&args.log_out, &(io::header(&hdr) + &log.to_csv()))?;
            ErrorReport {
                eps: args.eps,
                mu: args.mu,
                n: args.n,
                error: analysis::estimate_error_1d(&p, &mesh)?,
                rate: None,
                iterations: log.final_count(),
            }
        }
        Dim::Two => {
            let (mesh, u, log) = generate_mesh_2d(&p, args.n, &dp, &opts)?;
            write_file(&args.mesh_out, &io::write_vtk(&mesh, Some(&u.coeffs), &hdr))?;
            write_file(&args.lex_out, &io::write_lexicographic(&mesh, None, &hdr))?;
            write_file(&args.solution_out, &io::write_lexicographic(&mesh, Some(&u.coeffs), &hdr))?;
            write_file(&args.log_out, &(io::header(&hdr) + &log.to_csv()))?;
            ErrorReport {
                eps: args.eps,
                mu: args.mu,
                n: args.n,
                error: analysis::estimate_error_2d(&p, &mesh)?,
                rate: None,
                iterations: log.level_counts.last().map_or(0, |&(_, c)| c),
            }
        }
    };
    let text = format!("{}{REPORT_HEADER}\n{}\n", io::header(&hdr), report.csv_row());
    emit(args.out.as_deref(), &text)
}

fn table(args: &TableArgs) -> Result<(), Failure> {
    if args.eps.is_empty() {
        return Err(Failure::Usage("empty --eps list".into()));
    }
    if args.n.is_empty() {
        return Err(Failure::Usage("empty --n list".into()));
    }
    for &e in &args.eps {
        check_positive("eps", e)?;
    }
    check_positive("mu", args.mu)?;
    let opts = args.density.options();
    for &n in &args.n {
        check_target_n(n, opts.initial_n)?;
    }
    let dp = args.density.params();
    dp.validate(1)?;
    let dim = problem_dim(&args.problem)?;

    let rows = convergence_table(&args.problem, &args.eps, args.mu, &args.n, &dp, &opts)?;
    let list = |v: Vec<String>| v.join(",");
    let mut hdr = vec![
        ("problem", args.problem.clone()),
        ("eps", list(args.eps.iter().map(|e| format!("{e:e}")).collect())),
        ("mu", format!("{:e}", args.mu)),
        ("n", list(args.n.iter().map(|n| n.to_string()).collect())),
    ];
    hdr.extend(args.density.header(dim));
    let text = io::header(&hdr) + &table_csv(&rows, args.mu);
    emit(args.out.as_deref(), &text)?;
    let failed: Vec<String> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().err().map(|e| format!("eps={:e}: {e}", r.eps)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(failed.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve1d(a) => solve(a, Dim::One),
        Command::Solve2d(a) => solve(a, Dim::Two),
        Command::Table(a) => table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
